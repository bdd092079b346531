#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace towerlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input exceeds a configured computation bound (CLI exit status 2).
struct BoundsError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// Freely reduced word on two generators x, y, stored as runs of
/// (generator, signed exponent).
class FreeWord {
 public:
  struct Syllable {
    std::uint8_t gen;  // 0 = x, 1 = y
    std::int64_t exp;  // nonzero
  };

  FreeWord() = default;

  static FreeWord generator(unsigned g, std::int64_t e = 1);

  // Append a^e and reduce against the tail.
  void append(unsigned g, std::int64_t e);
  void append(const FreeWord& w);

  FreeWord inverse() const;
  FreeWord operator*(const FreeWord& o) const;
  FreeWord pow(std::int64_t k) const;

  bool empty() const { return syl_.empty(); }
  std::size_t length() const;  // letter count
  const std::vector<Syllable>& syllables() const { return syl_; }

  std::int64_t exponent_sum(unsigned g) const;
  // Membership in the Frattini subgroup of the free pro-2 group: both
  // exponent sums even.
  bool in_frattini() const;

  bool operator==(const FreeWord& o) const;

  std::string str() const;
  static FreeWord parse(const std::string& text);

 private:
  std::vector<Syllable> syl_;
};

inline FreeWord commutator(const FreeWord& a, const FreeWord& b) {
  return a.inverse() * b.inverse() * a * b;
}

/// The order-3 substitution x -> y^-1, y -> x y^-1, applied k times.
FreeWord sigma_apply(const FreeWord& w, unsigned k = 1);

/// Pair {v, sigma(v)} with v = u^-1 sigma(u); u must lie in the Frattini
/// subgroup (even exponent sums).
struct RelatorPair {
  FreeWord v;
  FreeWord sigma_v;
};

RelatorPair make_pair(const FreeWord& u);

struct FpPresentation {
  std::vector<FreeWord> relators;
  bool sigma_closed = false;

  static FpPresentation from_pairs(const std::vector<FreeWord>& us);
  static FpPresentation plain(std::vector<FreeWord> relators);
};

}  // namespace towerlab
