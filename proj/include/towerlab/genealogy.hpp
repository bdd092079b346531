#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "towerlab/pcgroup.hpp"
#include "towerlab/pquotient.hpp"

namespace towerlab {

struct GenealogyLimits {
  // brute-force automorphism enumeration bound on |G|
  unsigned aut_order_log2 = 11;
  // subspace enumeration bound on the multiplicator dimension
  unsigned mult_dim = 10;
};

enum class AutMode { kFull, kOrder3Witness };

struct AutomorphismSet {
  bool full = false;
  std::uint64_t order = 0;                   // |Aut(G)| in full mode
  std::vector<std::array<Elt, 2>> elements;  // generator-image pairs
  std::optional<Automorphism> witness;       // an order-3 automorphism, if any
};

/// Brute-force automorphisms over generator-image pairs restricted to bases
/// of the Frattini quotient.  Full mode refuses groups beyond the bound.
AutomorphismSet automorphisms(const PcPresentation& g, AutMode mode,
                              const GenealogyLimits& lim = {});

/// Rebuild the full image vector of a verified generator-image pair.
Automorphism materialize(const PcPresentation& g, const std::array<Elt, 2>& p);

struct ValidityResult {
  bool valid = false;
  std::optional<Automorphism> witness;
};

/// Valid = 2-generated with an automorphism of order 3.
ValidityResult is_valid(const PcPresentation& g,
                        const GenealogyLimits& lim = {});

/// Isomorphism-invariant screen used before iso_test.
struct Fingerprint {
  unsigned order_log2 = 0;
  unsigned two_class = 0;
  unsigned rank = 0;
  unsigned derived_length = 0;
  Ipad ipad;  // maximal-subgroup slot holds the least abelianization
  std::vector<std::string> sub4_abelianizations;  // sorted multiset

  std::string str() const;
  bool operator==(const Fingerprint& o) const { return str() == o.str(); }
};

Fingerprint fingerprint(const PcPresentation& g);

/// True iff isomorphic; screens by fingerprint, then searches generator
/// images.  Refuses groups beyond the brute-force bound.
bool iso_test(const PcPresentation& g, const PcPresentation& h,
              const GenealogyLimits& lim = {});

/// One immediate descendant per isomorphism class; valid_only restricts to
/// children admitting an order-3 automorphism (the parent must be valid).
struct Descendants {
  std::vector<PcPresentation> children;
  unsigned mult_dim = 0;
  unsigned nuclear_rank = 0;
};

Descendants immediate_descendants(const PcPresentation& g, bool valid_only,
                                  const GenealogyLimits& lim = {});

/// Dimension of the nucleus of the 2-cover; 0 iff childless.
unsigned nuclear_rank(const PcPresentation& g);

}  // namespace towerlab
