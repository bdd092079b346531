#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <cstring>
#include <string>
#include <vector>

namespace towerlab {

// Exponent vectors over F_2.  An element of a pc group with n <= 512
// generators is one Mask<kEltWords>; loops are bounded by the presentation's
// active word count, so small groups pay for one or two words only.
template <std::size_t W>
using Mask = std::array<std::uint64_t, W>;

constexpr std::size_t kEltWords = 8;
using Elt = Mask<kEltWords>;

template <std::size_t W>
constexpr Mask<W> zero_mask() {
  return Mask<W>{};
}

template <std::size_t W>
inline bool get_bit(const Mask<W>& m, unsigned i) {
  return (m[i >> 6] >> (i & 63)) & 1u;
}

template <std::size_t W>
inline void set_bit(Mask<W>& m, unsigned i) {
  m[i >> 6] |= std::uint64_t{1} << (i & 63);
}

template <std::size_t W>
inline void clear_bit(Mask<W>& m, unsigned i) {
  m[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
}

template <std::size_t W>
inline void toggle_bit(Mask<W>& m, unsigned i) {
  m[i >> 6] ^= std::uint64_t{1} << (i & 63);
}

template <std::size_t W>
inline bool is_zero(const Mask<W>& m, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w)
    if (m[w]) return false;
  return true;
}

template <std::size_t W>
inline bool mask_eq(const Mask<W>& a, const Mask<W>& b, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w)
    if (a[w] != b[w]) return false;
  return true;
}

template <std::size_t W>
inline void xor_into(Mask<W>& a, const Mask<W>& b, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w) a[w] ^= b[w];
}

template <std::size_t W>
inline void or_into(Mask<W>& a, const Mask<W>& b, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w) a[w] |= b[w];
}

// Index of the lowest set bit, or -1.
template <std::size_t W>
inline int lowest_bit(const Mask<W>& m, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w)
    if (m[w]) return int(w * 64 + unsigned(__builtin_ctzll(m[w])));
  return -1;
}

// Index of the highest set bit, or -1.
template <std::size_t W>
inline int highest_bit(const Mask<W>& m, unsigned nw) {
  for (int w = int(nw) - 1; w >= 0; --w)
    if (m[w]) return w * 64 + 63 - int(__builtin_clzll(m[w]));
  return -1;
}

template <std::size_t W>
inline unsigned popcount(const Mask<W>& m, unsigned nw) {
  unsigned c = 0;
  for (unsigned w = 0; w < nw; ++w) c += unsigned(__builtin_popcountll(m[w]));
  return c;
}

// True iff some bit with index strictly greater than i is set.
template <std::size_t W>
inline bool any_above(const Mask<W>& m, unsigned i, unsigned nw) {
  unsigned w = i >> 6, r = i & 63;
  if (r != 63 && (m[w] >> (r + 1)) != 0) return true;
  for (unsigned v = w + 1; v < nw; ++v)
    if (m[v]) return true;
  return false;
}

// a := bits of m strictly above index i.
template <std::size_t W>
inline Mask<W> bits_above(const Mask<W>& m, unsigned i, unsigned nw) {
  Mask<W> r{};
  unsigned w = i >> 6, b = i & 63;
  for (unsigned v = w; v < nw; ++v) r[v] = m[v];
  if (b == 63)
    r[w] = 0;
  else
    r[w] &= ~((std::uint64_t{2} << b) - 1);
  return r;
}

// True iff all set bits of a are also set in b.
template <std::size_t W>
inline bool subset_of(const Mask<W>& a, const Mask<W>& b, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

template <std::size_t W>
inline Mask<W> single_bit(unsigned i) {
  Mask<W> m{};
  set_bit(m, i);
  return m;
}

// Lexicographic compare treating the mask as reversed bit string; enough for
// deterministic tie-breaking.
template <std::size_t W>
inline int compare(const Mask<W>& a, const Mask<W>& b, unsigned nw) {
  for (unsigned w = 0; w < nw; ++w) {
    if (a[w] != b[w]) return a[w] < b[w] ? -1 : 1;
  }
  return 0;
}

template <std::size_t W>
inline std::string to_string(const Mask<W>& m, unsigned n) {
  std::string s;
  for (unsigned i = 0; i < n; ++i)
    if (get_bit(m, i)) {
      if (!s.empty()) s += ' ';
      s += std::to_string(i + 1);
    }
  return s.empty() ? "-" : s;
}

// Row echelon form over F_2 with width-W rows; pivot = lowest set bit.
template <std::size_t W>
class Echelon {
 public:
  explicit Echelon(unsigned nw) : nw_(nw) {}

  // Reduce r by the current rows (pivot bits cleared).
  void reduce(Mask<W>& r) const {
    for (const Row& row : rows_)
      if (get_bit(r, row.pivot)) xor_into(r, row.bits, nw_);
  }

  // Insert r if independent; returns false if it reduces to zero.
  bool add(Mask<W> r) {
    reduce(r);
    int p = lowest_bit(r, nw_);
    if (p < 0) return false;
    for (Row& row : rows_)
      if (get_bit(row.bits, unsigned(p))) xor_into(row.bits, r, nw_);
    rows_.push_back(Row{r, unsigned(p)});
    return true;
  }

  bool contains(Mask<W> r) const {
    reduce(r);
    return lowest_bit(r, nw_) < 0;
  }

  unsigned rank() const { return unsigned(rows_.size()); }
  unsigned words() const { return nw_; }

  struct Row {
    Mask<W> bits;
    unsigned pivot;
  };
  const std::vector<Row>& rows() const { return rows_; }

  bool has_pivot(unsigned i) const {
    for (const Row& row : rows_)
      if (row.pivot == i) return true;
    return false;
  }

 private:
  unsigned nw_;
  std::vector<Row> rows_;
};

}  // namespace towerlab
