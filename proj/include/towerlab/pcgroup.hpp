#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "towerlab/bits.hpp"
#include "towerlab/words.hpp"

namespace towerlab {

enum class DefKind : std::uint8_t { kImage, kPower, kComm };

// How a generator of weight >= 2 arises: a = a_a^2 (kPower) or a = (a_a, a_b)
// (kComm, a > b).  kImage marks the two weight-1 images of x and y.
struct GenDef {
  DefKind kind = DefKind::kImage;
  std::uint16_t a = 0;
  std::uint16_t b = 0;
};

/// Invariant factors of a finite abelian 2-group, stored as exponents:
/// factors 2^e with e nondecreasing.  Empty = trivial group.
struct AbelianType {
  std::vector<std::uint8_t> exps;

  unsigned rank() const { return unsigned(exps.size()); }
  unsigned order_log2() const {
    unsigned s = 0;
    for (auto e : exps) s += e;
    return s;
  }
  std::string str() const;
  static AbelianType parse(const std::string& text);

  bool operator==(const AbelianType& o) const { return exps == o.exps; }
  bool operator!=(const AbelianType& o) const { return !(*this == o); }
  bool operator<(const AbelianType& o) const { return exps < o.exps; }
};

/// True iff B is a quotient of A: invariant-factor dominance after aligning
/// from the top.
bool abelian_is_quotient(const AbelianType& a, const AbelianType& b);

/// The paper's IPAD triple (G^ab, M^ab, Phi(G)^ab).
struct Ipad {
  AbelianType g_ab, m_ab, phi_ab;

  std::string str() const;
  bool operator==(const Ipad& o) const {
    return g_ab == o.g_ab && m_ab == o.m_ab && phi_ab == o.phi_ab;
  }
  bool operator!=(const Ipad& o) const { return !(*this == o); }
  bool operator<(const Ipad& o) const;
};

/// Consistent power-commutator presentation of a finite 2-group.  Elements
/// are 0/1 exponent vectors (Elt); normal form a_1^{e_1}...a_n^{e_n}.
/// Immutable after construction.
class PcPresentation {
 public:
  struct Builder {
    std::vector<std::uint8_t> weights;
    std::vector<GenDef> defs;           // may be empty for raw quotients
    std::vector<Elt> pow_tails;         // tail of a_i^2
    std::vector<Elt> comm_tails;        // triangular, (j,i) j>i at j(j-1)/2+i
    bool canonical = false;

    PcPresentation build() const;
  };

  PcPresentation() = default;  // trivial group

  unsigned ngens() const { return n_; }
  unsigned nwords() const { return nw_; }
  unsigned order_log2() const { return n_; }
  unsigned two_class() const { return class_; }
  unsigned weight(unsigned i) const { return weights_[i]; }
  bool canonical() const { return canonical_; }
  const GenDef& def(unsigned i) const { return defs_[i]; }
  bool has_defs() const { return !defs_.empty(); }
  // some defining relation carries tail entries beyond the defined generator
  bool defining_suffixes() const { return defining_suffixes_; }

  const Elt& power_tail(unsigned i) const { return pow_[i]; }
  const Elt& comm_tail(unsigned j, unsigned i) const {  // j > i
    return comm_[std::size_t(j) * (j - 1) / 2 + i];
  }
  // Generator count of the Frattini quotient; for canonical presentations
  // this is the number of weight-1 generators.
  unsigned rank() const;

  Elt one() const { return Elt{}; }
  Elt gen(unsigned i) const { return single_bit<kEltWords>(i); }

  void mul_inplace(Elt& acc, const Elt& rhs) const;
  Elt mul(Elt a, const Elt& b) const {
    mul_inplace(a, b);
    return a;
  }
  Elt mul_gen(Elt a, unsigned g) const;
  Elt inverse(const Elt& u) const;
  Elt conj(const Elt& u, const Elt& by) const;      // by^-1 u by
  Elt commutator(const Elt& a, const Elt& b) const;  // a^-1 b^-1 a b
  Elt power(Elt base, std::uint64_t e) const;
  unsigned order_log2_of(const Elt& u) const;  // order = 2^result

  /// Image of w under x -> gx, y -> gy.
  Elt evaluate(const FreeWord& w, const Elt& gx, const Elt& gy) const;

  /// Expression of a_i as a free word in x and y through the definition
  /// chain (canonical presentations only).
  FreeWord definition_word(unsigned i) const;

  /// Exhaustive overlap check; throws Error with a description on failure.
  void verify_consistency() const;

  std::string serialize() const;
  static PcPresentation deserialize(const std::string& text);

  bool identical(const PcPresentation& o) const;  // bit-exact equality

 private:
  friend struct Builder;
  unsigned n_ = 0;
  unsigned nw_ = 1;
  unsigned class_ = 0;
  bool canonical_ = false;
  bool defining_suffixes_ = false;
  std::vector<std::uint8_t> weights_;
  std::vector<GenDef> defs_;
  std::vector<Elt> pow_;
  std::vector<Elt> comm_;
  std::vector<Elt> commuting_;  // bits above i commuting with a_i

  void init_commuting();
};

/// Generator images of a homomorphism G -> G; img[i] = image of a_i.
struct Automorphism {
  std::vector<Elt> img;

  Elt apply(const PcPresentation& pc, const Elt& e) const;
};

Automorphism compose(const PcPresentation& pc, const Automorphism& f,
                     const Automorphism& g);  // f after g

/// Echelonized subgroup basis: rows sorted by leading generator index,
/// one row per occupied slot, |H| = 2^rows.
class SubgroupBasis {
 public:
  explicit SubgroupBasis(const PcPresentation& pc);

  const PcPresentation& group() const { return *pc_; }
  const std::vector<Elt>& rows() const { return rows_; }
  unsigned order_log2() const { return unsigned(rows_.size()); }
  unsigned index_log2() const { return pc_->ngens() - order_log2(); }
  int slot_row(unsigned lead) const { return slot_[lead]; }

  Elt sift(Elt g) const;  // canonical coset representative
  bool contains(Elt g) const { return is_zero(sift(g), pc_->nwords()); }
  bool insert(Elt g) { return insert_pos(g) >= 0; }
  int insert_pos(Elt g);  // row index of the inserted residue, or -1
  void canonicalize();    // reduced echelon form
  bool is_normal() const;

  /// Usage parities of basis rows when sifting a member g to the identity;
  /// the abelianized relation reads g + sum(used rows) = 0.
  std::vector<std::uint8_t> express(Elt g) const;

  std::string key() const;  // canonical serialized form

  static SubgroupBasis span(const PcPresentation& pc,
                            const std::vector<Elt>& gens);
  static SubgroupBasis closure(const PcPresentation& pc,
                               const std::vector<Elt>& gens);
  static SubgroupBasis normal_closure(const PcPresentation& pc,
                                      const std::vector<Elt>& gens,
                                      const Automorphism* sigma = nullptr);
  static SubgroupBasis whole(const PcPresentation& pc);

 private:
  const PcPresentation* pc_;
  std::vector<Elt> rows_;
  std::vector<std::int16_t> slot_;  // leading index -> row or -1
};

/// Smallest normal subgroup containing z, closed under sigma when supplied.
SubgroupBasis normal_sigma_closure(const PcPresentation& pc, const Elt& z,
                                   const Automorphism* sigma = nullptr);

/// Invariant factors of H/[H,H] (whole group when H omitted).
AbelianType abelianization(const PcPresentation& pc,
                           const SubgroupBasis* h = nullptr);

/// The three index-2 subgroups of a 2-generated group.
std::vector<SubgroupBasis> maximal_subgroups(const PcPresentation& pc);

/// Frattini subgroup P_1(G).
SubgroupBasis frattini_subgroup(const PcPresentation& pc);

/// Descending 2-central series P_0 = G, P_{k+1} = P_k^2 [G, P_k], down to 1.
/// Returns P_0 .. P_class; length-1 vector for the trivial group.
std::vector<SubgroupBasis> two_central_series(const PcPresentation& pc);

/// All subgroups of index <= 2^max_index_log2, each exactly once.
std::vector<SubgroupBasis> low_index_subgroups(const PcPresentation& pc,
                                               unsigned max_index_log2);

/// IPAD of a 2-generated group; throws Error if the three maximal-subgroup
/// abelianizations disagree (the group is then not valid).
Ipad ipad_of(const PcPresentation& pc);
/// Same but without the agreement check; m_ab = first maximal subgroup.
Ipad ipad_of_unchecked(const PcPresentation& pc);

/// Split of the defining relation of generator k (canonical presentations):
/// tail = P . a_k . S, so that a_k = P^-1 . (source value) . S^-1.
std::pair<Elt, Elt> defining_relation_split(const PcPresentation& pc,
                                            unsigned k);

/// Extend images of the weight-1 generators of g through its definition
/// chain into h, without verifying relations.  Exact whenever the assignment
/// extends to a homomorphism (iterated to a fixpoint when defining relations
/// carry higher-weight tails).
Automorphism extend_images_unchecked(const PcPresentation& g,
                                     const PcPresentation& h, const Elt& u,
                                     const Elt& v);

/// Extend images of the weight-1 generators of g through its definition
/// chain into h; verifies g's relations and surjectivity.  Returns nothing
/// if the map is not an isomorphism onto h.
std::optional<Automorphism> extend_images_into(const PcPresentation& g,
                                               const PcPresentation& h,
                                               const Elt& u, const Elt& v);

/// Rebuild a consistent presentation with generators stably re-sorted by
/// weight; perm_new_to_old records the permutation used.
PcPresentation resort_by_weight(const PcPresentation& pc,
                                std::vector<unsigned>* perm_new_to_old);

/// Quotient of G by a normal subgroup, presented on the transversal
/// coordinates.  The result is consistent but not canonical.
struct QuotientMap {
  PcPresentation q;
  std::vector<std::int32_t> new_index;  // old gen -> new gen or -1
  Elt project(const PcPresentation& g, const SubgroupBasis& n,
              const Elt& e) const;
};

QuotientMap quotient_by_normal(const PcPresentation& pc,
                               const SubgroupBasis& n);

}  // namespace towerlab
