#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "towerlab/towers.hpp"

namespace towerlab {

/// Deterministic splitmix64 stream; census randomness is derived from
/// (seed, sample index), so results do not depend on the worker layout.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  static Rng for_sample(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

struct SearchConfig {
  std::uint64_t seed = 1;
  std::uint64_t samples = 1000000;
  unsigned min_len = 0;
  unsigned max_len = 14;
  unsigned class_cap = 12;
  unsigned order_cap_log2 = 24;
  unsigned pairs = 2;
  unsigned workers = 1;

  std::string str() const;
};

/// Uniformly sampled freely reduced word with length uniform in
/// [min_len, max_len], rejection-sampled into the Frattini subgroup (both
/// exponent sums even).
FreeWord sample_frattini_word(Rng& rng, unsigned min_len, unsigned max_len);

struct CensusRecord {
  std::vector<FreeWord> us;  // the sampled u_i; relators are the pairs pi_u
  PcPresentation group;
  Fingerprint fp;
  SpecialVerdict verdict;
  unsigned nuclear_rank = 0;
  std::uint64_t first_seen = 0;
  std::uint64_t hits = 0;

  std::string line() const;  // one machine-readable record line
};

struct CensusResult {
  SearchConfig cfg;
  std::vector<CensusRecord> records;
  std::uint64_t finite_samples = 0;
  std::uint64_t capped_samples = 0;
  // first few capped presentations, for the infinite-candidate pipeline
  std::vector<std::vector<FreeWord>> capped_exemplars;
};

CensusResult run_census(const SearchConfig& cfg,
                        const std::function<void(std::uint64_t)>& progress = {});

struct GrowthProfile {
  std::vector<unsigned> log2_orders;  // |Q_c| for c = 1..reached
  bool capped = false;                // still growing at the cap

  std::vector<unsigned> diffs() const;
};

struct FinitenessOutcome {
  bool finite = false;
  std::optional<QuotientResult> quotient;  // the stabilized group if finite
  GrowthProfile profile;
};

FinitenessOutcome finiteness_probe(const FpPresentation& pres,
                                   unsigned class_cap,
                                   unsigned order_cap_log2 = 64);

GrowthProfile growth_profile(const FpPresentation& pres, unsigned class_cap,
                             unsigned order_cap_log2 = 128);

struct PeriodicityVerdict {
  enum Kind { kPeriodic, kAperiodic, kInconclusive } kind = kInconclusive;
  unsigned preperiod = 0;
  unsigned period = 0;
};

/// Ultimate periodicity of the difference sequence: detected over the last
/// two thirds of the window, requiring at least two full periods.
PeriodicityVerdict periodicity_verdict(const GrowthProfile& profile,
                                       unsigned min_window = 6);

struct FabResult {
  bool pass = false;
  bool inconclusive = false;
  unsigned checked_subgroups = 0;
  std::string witness;  // failing subgroup and the growing abelianization
};

/// Abelianizations of all subgroups of index <= 2^max_index_log2 must agree
/// between the two deepest computed quotients.
FabResult fab_probe(const FpPresentation& pres, unsigned max_index_log2 = 4,
                    unsigned class_cap = 12, unsigned order_cap_log2 = 64);

struct RankResult {
  bool bounded = false;
  bool inconclusive = false;
  unsigned max_rank = 0;
  std::vector<unsigned> max_rank_by_class;
};

/// Generator ranks of the tracked normal subgroups (2-central series terms
/// and normal subgroups of index <= 16) across growing class; bounded iff
/// the maximum stabilizes over the last three classes.
RankResult rank_probe(const FpPresentation& pres, unsigned index_bound_log2 = 12,
                      unsigned class_cap = 12, unsigned order_cap_log2 = 64);

}  // namespace towerlab
