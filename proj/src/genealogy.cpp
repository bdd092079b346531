#include "towerlab/genealogy.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace towerlab {

namespace {

constexpr std::uint64_t kCosetBits[3] = {1, 2, 3};  // xbar, ybar, xbar*ybar

bool quick_order3(const PcPresentation& g, const Automorphism& t) {
  Elt x1 = t.apply(g, t.apply(g, t.img[0]));
  if (!mask_eq(x1, g.gen(0), g.nwords())) return false;
  Elt y1 = t.apply(g, t.apply(g, t.img[1]));
  return mask_eq(y1, g.gen(1), g.nwords());
}

}  // namespace

Automorphism materialize(const PcPresentation& g,
                         const std::array<Elt, 2>& p) {
  return extend_images_unchecked(g, g, p[0], p[1]);
}

AutomorphismSet automorphisms(const PcPresentation& g, AutMode mode,
                              const GenealogyLimits& lim) {
  if (g.rank() != 2) throw Error("automorphisms: group is not 2-generated");
  if (!g.canonical()) throw Error("automorphisms: canonical input required");
  if (mode == AutMode::kFull && g.order_log2() > lim.aut_order_log2)
    throw BoundsError("automorphisms: order 2^" +
                      std::to_string(g.order_log2()) + " exceeds bound 2^" +
                      std::to_string(lim.aut_order_log2));
  const unsigned n = g.ngens();
  if (n > 64) throw BoundsError("automorphisms: more than 64 generators");
  AutomorphismSet out;
  const unsigned ord_x = g.order_log2_of(g.gen(0));
  const unsigned ord_y = g.order_log2_of(g.gen(1));
  const std::uint64_t phi_count = std::uint64_t(1) << (n - 2);

  // order-3 candidates live over the sigma pattern, listed first
  static const std::pair<unsigned, unsigned> patterns[6] = {
      {1, 2}, {2, 0}, {0, 1}, {1, 0}, {0, 2}, {2, 1}};
  const unsigned npat = mode == AutMode::kOrder3Witness ? 1 : 6;

  for (unsigned p = 0; p < npat; ++p) {
    auto [pa, pb] = patterns[p];
    for (std::uint64_t mu = 0; mu < phi_count; ++mu) {
      Elt u{};
      u[0] = kCosetBits[pa] | (mu << 2);
      if (g.order_log2_of(u) != ord_x) continue;
      for (std::uint64_t mv = 0; mv < phi_count; ++mv) {
        Elt v{};
        v[0] = kCosetBits[pb] | (mv << 2);
        if (g.order_log2_of(v) != ord_y) continue;
        std::optional<Automorphism> a = extend_images_into(g, g, u, v);
        if (!a) continue;
        if (mode == AutMode::kOrder3Witness) {
          if (quick_order3(g, *a)) {
            out.witness = *a;
            return out;
          }
          continue;
        }
        if (!out.witness && quick_order3(g, *a)) out.witness = *a;
        out.elements.push_back(std::array<Elt, 2>{u, v});
      }
    }
  }
  if (mode == AutMode::kFull) {
    out.full = true;
    out.order = out.elements.size();
  }
  return out;
}

ValidityResult is_valid(const PcPresentation& g, const GenealogyLimits& lim) {
  ValidityResult r;
  if (g.ngens() < 2 || g.rank() != 2) return r;
  // necessary screen: the three maximal subgroups must be isomorphic
  std::vector<SubgroupBasis> ms = maximal_subgroups(g);
  AbelianType a0 = abelianization(g, &ms[0]);
  if (a0 != abelianization(g, &ms[1]) || a0 != abelianization(g, &ms[2]))
    return r;
  AutomorphismSet s = automorphisms(g, AutMode::kOrder3Witness, lim);
  r.valid = s.witness.has_value();
  r.witness = s.witness;
  return r;
}

namespace {

SubgroupBasis derived_of(const PcPresentation& pc, const SubgroupBasis& h) {
  std::vector<Elt> gens;
  for (const Elt& a : h.rows())
    for (const Elt& b : h.rows()) {
      Elt c = pc.commutator(a, b);
      if (!is_zero(c, pc.nwords())) gens.push_back(c);
    }
  SubgroupBasis d(pc);
  std::deque<Elt> work(gens.begin(), gens.end());
  std::vector<Elt> ins;
  while (!work.empty()) {
    Elt g = work.front();
    work.pop_front();
    Elt r = d.sift(g);
    if (is_zero(r, pc.nwords())) continue;
    d.insert(r);
    work.push_back(pc.mul(r, r));
    for (const Elt& e : ins) {
      work.push_back(pc.mul(r, e));
      work.push_back(pc.mul(e, r));
    }
    for (const Elt& b : h.rows()) work.push_back(pc.conj(r, b));
    ins.push_back(r);
  }
  d.canonicalize();
  return d;
}

}  // namespace

Fingerprint fingerprint(const PcPresentation& g) {
  Fingerprint f;
  f.order_log2 = g.order_log2();
  f.two_class = g.two_class();
  f.rank = g.ngens() ? g.rank() : 0;
  f.ipad.g_ab = abelianization(g);
  if (f.rank == 2) {
    std::vector<SubgroupBasis> ms = maximal_subgroups(g);
    std::vector<AbelianType> abs;
    for (const SubgroupBasis& m : ms) abs.push_back(abelianization(g, &m));
    std::sort(abs.begin(), abs.end());
    f.ipad.m_ab = abs[0];
  }
  SubgroupBasis phi = frattini_subgroup(g);
  f.ipad.phi_ab = abelianization(g, &phi);
  SubgroupBasis d = SubgroupBasis::whole(g);
  while (d.order_log2() > 0) {
    SubgroupBasis next = derived_of(g, d);
    if (next.order_log2() == d.order_log2())
      throw Error("fingerprint: derived series stalled");
    d = next;
    ++f.derived_length;
  }
  if (f.rank == 2)
    for (const SubgroupBasis& s : low_index_subgroups(g, 2))
      f.sub4_abelianizations.push_back(abelianization(g, &s).str());
  std::sort(f.sub4_abelianizations.begin(), f.sub4_abelianizations.end());
  return f;
}

std::string Fingerprint::str() const {
  std::ostringstream os;
  os << order_log2 << '|' << two_class << '|' << rank << '|' << derived_length
     << '|' << ipad.str() << '|';
  for (const std::string& s : sub4_abelianizations) os << s << ',';
  return os.str();
}

namespace {

bool iso_search(const PcPresentation& g, const PcPresentation& h) {
  const unsigned n = h.ngens();
  if (n > 64) throw BoundsError("iso_test: more than 64 generators");
  const unsigned ord_x = g.order_log2_of(g.gen(0));
  const unsigned ord_y = g.order_log2_of(g.gen(1));
  const std::uint64_t phi_count = std::uint64_t(1) << (n - 2);
  static const std::pair<unsigned, unsigned> patterns[6] = {
      {0, 1}, {1, 2}, {2, 0}, {1, 0}, {0, 2}, {2, 1}};
  for (auto [pa, pb] : patterns)
    for (std::uint64_t mu = 0; mu < phi_count; ++mu) {
      Elt u{};
      u[0] = kCosetBits[pa] | (mu << 2);
      if (h.order_log2_of(u) != ord_x) continue;
      for (std::uint64_t mv = 0; mv < phi_count; ++mv) {
        Elt v{};
        v[0] = kCosetBits[pb] | (mv << 2);
        if (h.order_log2_of(v) != ord_y) continue;
        if (extend_images_into(g, h, u, v)) return true;
      }
    }
  return false;
}

}  // namespace

bool iso_test(const PcPresentation& g, const PcPresentation& h,
              const GenealogyLimits& lim) {
  if (g.order_log2() != h.order_log2()) return false;
  if (g.two_class() != h.two_class()) return false;
  if (g.order_log2() > lim.aut_order_log2)
    throw BoundsError("iso_test: order exceeds the brute-force bound");
  if (g.ngens() == 0) return true;
  if (g.rank() != h.rank()) return false;
  if (g.rank() < 2) return abelianization(g) == abelianization(h);
  if (!(fingerprint(g) == fingerprint(h))) return false;
  return iso_search(g, h);
}

unsigned nuclear_rank(const PcPresentation& g) {
  return two_cover(g).nuclear_rank();
}

namespace {

// rref subspace of F_2^m over uint32 rows, pivots ascending
struct SmallSpan {
  std::vector<std::uint32_t> rows;

  void insert(std::uint32_t v) {
    for (std::uint32_t r : rows)
      if (v & (r & (~r + 1))) v ^= r;
    if (!v) return;
    std::uint32_t p = v & (~v + 1);
    for (std::uint32_t& r : rows)
      if (r & p) r ^= v;
    rows.push_back(v);
    std::sort(rows.begin(), rows.end(), [](std::uint32_t a, std::uint32_t b) {
      return (a & (~a + 1)) < (b & (~b + 1));
    });
  }

  bool contains(std::uint32_t v) const {
    for (std::uint32_t r : rows)
      if (v & (r & (~r + 1))) v ^= r;
    return v == 0;
  }

  std::string key() const {
    std::string s;
    for (std::uint32_t r : rows) {
      char buf[10];
      std::snprintf(buf, sizeof buf, "%08x", r);
      s += buf;
    }
    return s;
  }
};

// Every subspace exactly once, as its reduced echelon basis: pick the pivot
// set, then fill the free entries (positions above the pivot and outside the
// pivot set).
void enum_subspaces(unsigned m,
                    const std::function<void(const SmallSpan&)>& f) {
  for (std::uint32_t pset = 0; pset < (std::uint32_t(1) << m); ++pset) {
    std::vector<unsigned> piv;
    for (unsigned p = 0; p < m; ++p)
      if ((pset >> p) & 1) piv.push_back(p);
    std::vector<std::vector<unsigned>> free_pos(piv.size());
    unsigned total = 0;
    for (std::size_t r = 0; r < piv.size(); ++r)
      for (unsigned q = piv[r] + 1; q < m; ++q)
        if (!((pset >> q) & 1)) {
          free_pos[r].push_back(q);
          ++total;
        }
    if (total > 48)
      throw BoundsError("enum_subspaces: free-entry count too large");
    SmallSpan s;
    s.rows.resize(piv.size());
    for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << total); ++bits) {
      unsigned at = 0;
      for (std::size_t r = 0; r < piv.size(); ++r) {
        std::uint32_t row = std::uint32_t(1) << piv[r];
        for (unsigned q : free_pos[r]) {
          if ((bits >> at) & 1) row |= std::uint32_t(1) << q;
          ++at;
        }
        s.rows[r] = row;
      }
      f(s);
    }
  }
}

std::uint32_t apply_mat(const std::vector<std::uint32_t>& mat,
                        std::uint32_t v) {
  std::uint32_t r = 0;
  while (v) {
    unsigned k = unsigned(__builtin_ctz(v));
    v &= v - 1;
    r ^= mat[k];
  }
  return r;
}

SmallSpan apply_mat_span(const std::vector<std::uint32_t>& mat,
                         const SmallSpan& s) {
  SmallSpan out;
  for (std::uint32_t r : s.rows) out.insert(apply_mat(mat, r));
  return out;
}

}  // namespace

Descendants immediate_descendants(const PcPresentation& g, bool valid_only,
                                  const GenealogyLimits& lim) {
  if (!g.canonical())
    throw Error("immediate_descendants: canonical input required");
  CoverResult cr = two_cover(g);
  Descendants out;
  out.mult_dim = cr.mult_dim();
  out.nuclear_rank = cr.nuclear_rank();
  if (out.nuclear_rank == 0) return out;
  const unsigned m = out.mult_dim;
  if (m > lim.mult_dim)
    throw BoundsError("immediate_descendants: multiplicator dimension " +
                      std::to_string(m) + " exceeds bound " +
                      std::to_string(lim.mult_dim));

  std::vector<int> coord(cr.cover.ngens(), -1);
  for (unsigned k = 0; k < m; ++k) coord[cr.mult_gens[k]] = int(k);
  std::uint32_t zmask = 0;
  for (std::uint16_t ng : cr.nucleus_gens)
    zmask |= std::uint32_t(1) << coord[ng];

  AutomorphismSet auts = automorphisms(g, AutMode::kFull, lim);
  Automorphism sigma;
  Automorphism sigma2;
  std::vector<std::uint32_t> sigma_mat;
  if (valid_only) {
    if (!auts.witness)
      throw Error("immediate_descendants: valid_only needs a valid parent");
    sigma = *auts.witness;
    sigma2 = compose(g, sigma, sigma);
    sigma_mat = multiplicator_action(cr, extend_to_cover(cr, g, sigma));
  }

  // distinct matrices of the acting group (normalizer of <sigma> when
  // restricting to sigma-invariant subspaces)
  std::set<std::vector<std::uint32_t>> mats;
  for (const std::array<Elt, 2>& pr : auts.elements) {
    Automorphism a = materialize(g, pr);
    if (valid_only) {
      // a sigma = sigma a  or  a sigma = sigma^2 a, checked on generators
      Elt asx = a.apply(g, sigma.img[0]);
      Elt asy = a.apply(g, sigma.img[1]);
      bool ok = (mask_eq(asx, sigma.apply(g, a.img[0]), g.nwords()) &&
                 mask_eq(asy, sigma.apply(g, a.img[1]), g.nwords())) ||
                (mask_eq(asx, sigma2.apply(g, a.img[0]), g.nwords()) &&
                 mask_eq(asy, sigma2.apply(g, a.img[1]), g.nwords()));
      if (!ok) continue;
    }
    mats.insert(multiplicator_action(cr, extend_to_cover(cr, g, a)));
  }

  std::vector<SmallSpan> allowable;
  enum_subspaces(m, [&](const SmallSpan& s) {
    if (s.rows.size() == m) return;  // proper subgroups only
    SmallSpan test = s;
    std::uint32_t zm = zmask;
    while (zm) {
      unsigned k = unsigned(__builtin_ctz(zm));
      zm &= zm - 1;
      test.insert(std::uint32_t(1) << k);
    }
    if (test.rows.size() != m) return;
    if (valid_only)
      for (std::uint32_t r : s.rows)
        if (!s.contains(apply_mat(sigma_mat, r))) return;
    allowable.push_back(s);
  });

  std::unordered_set<std::string> visited;
  std::vector<SmallSpan> reps;
  for (const SmallSpan& s : allowable) {
    std::string k0 = s.key();
    if (visited.count(k0)) continue;
    visited.insert(k0);
    SmallSpan best = s;
    std::string bestk = k0;
    for (const auto& mat : mats) {
      SmallSpan img = apply_mat_span(mat, s);
      std::string k = img.key();
      visited.insert(k);
      if (k < bestk) {
        bestk = k;
        best = img;
      }
    }
    reps.push_back(best);
  }
  std::sort(reps.begin(), reps.end(),
            [](const SmallSpan& a, const SmallSpan& b) {
              return a.key() < b.key();
            });

  for (const SmallSpan& rep : reps) {
    std::vector<Elt> rows;
    for (std::uint32_t r : rep.rows) {
      Elt e{};
      std::uint32_t v = r;
      while (v) {
        unsigned k = unsigned(__builtin_ctz(v));
        v &= v - 1;
        set_bit(e, cr.mult_gens[k]);
      }
      rows.push_back(e);
    }
    SubgroupBasis nb = SubgroupBasis::span(cr.cover, rows);
    nb.canonicalize();
    QuotientMap qm = quotient_by_normal(cr.cover, nb);
    Elt gx = qm.project(cr.cover, nb, cr.cover.gen(0));
    Elt gy = qm.project(cr.cover, nb, cr.cover.gen(1));
    CanonicalForm cf = canonicalize(qm.q, gx, gy);
    out.children.push_back(std::move(cf.group));
  }
  return out;
}

}  // namespace towerlab
