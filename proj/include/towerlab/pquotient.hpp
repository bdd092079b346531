#pragma once

#include <array>
#include <vector>

#include "towerlab/pcgroup.hpp"
#include "towerlab/words.hpp"

namespace towerlab {

struct QuotientResult {
  PcPresentation group;
  unsigned class_reached = 0;
  bool capped = false;  // a cap stopped growth; false means Q_{c+1} = Q_c
  std::array<Elt, 2> images{};          // images of x, y
  std::vector<unsigned> log2_orders;    // |Q_c| for c = 1..class_reached

  std::string serialize(const FpPresentation& pres) const;
};

/// Maximal 2-class-c quotient of <x,y | relators> for c up to class_cap,
/// stopping early once the order exceeds 2^order_cap_log2.
QuotientResult two_quotient(const FpPresentation& pres, unsigned class_cap,
                            unsigned order_cap_log2 = 510);

struct CoverResult {
  PcPresentation cover;
  std::vector<std::uint16_t> mult_gens;     // cover gens spanning the multiplicator
  std::vector<std::uint16_t> nucleus_gens;  // subset of weight class+1
  unsigned mult_dim() const { return unsigned(mult_gens.size()); }
  unsigned nuclear_rank() const { return unsigned(nucleus_gens.size()); }
};

/// 2-covering group of a canonical presentation: the largest central
/// extension by an elementary abelian 2-group with the same generator count.
CoverResult two_cover(const PcPresentation& g);

/// dim H^2(G, F_2), computed as the multiplicator dimension of the cover.
unsigned relation_rank(const PcPresentation& g);

/// Canonical weighted presentation of the group presented by any consistent
/// pc presentation, together with lifts of the canonical generators.
struct CanonicalForm {
  PcPresentation group;
  std::vector<Elt> lift;  // canonical gen -> element of the input

  /// Express an element of the input group in canonical coordinates.
  Elt pull(const PcPresentation& raw, const Elt& e) const;
};

CanonicalForm canonicalize(const PcPresentation& raw, const Elt& gx,
                           const Elt& gy);

/// Order-3 automorphism induced on a quotient by the substitution sigma;
/// requires the relator set to be sigma-closed (checked by evaluation).
Automorphism induce_sigma(const QuotientResult& q, const FpPresentation& pres);

/// Unique extension of an automorphism of the base group to its cover.
Automorphism extend_to_cover(const CoverResult& cr, const PcPresentation& base,
                             const Automorphism& a);

/// Action of a cover automorphism on the multiplicator, as row masks over
/// mult_gens coordinates: row k = image of mult gen k.
std::vector<std::uint32_t> multiplicator_action(const CoverResult& cr,
                                                const Automorphism& cover_aut);

/// Verify tau^3 = id and tau != id.
bool is_order3(const PcPresentation& pc, const Automorphism& tau);

}  // namespace towerlab
