#include "towerlab/pcgroup.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "towerlab/snf.hpp"

namespace towerlab {

// ---------------------------------------------------------------- abelian

std::string AbelianType::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(std::uint64_t{1} << exps[i]);
  }
  return s + "]";
}

AbelianType AbelianType::parse(const std::string& text) {
  AbelianType t;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  };
  skip();
  if (pos >= text.size() || text[pos] != '[')
    throw ParseError("abelian type must start with '['");
  ++pos;
  skip();
  if (pos < text.size() && text[pos] == ']') {
    ++pos;
    return t;
  }
  for (;;) {
    skip();
    std::uint64_t v = 0;
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
      v = v * 10 + std::uint64_t(text[pos] - '0');
      ++pos;
    }
    if (pos == start) throw ParseError("expected integer in abelian type");
    if (v < 2 || (v & (v - 1)) != 0)
      throw ParseError("abelian type entries must be 2-powers >= 2, got " +
                       std::to_string(v));
    unsigned e = unsigned(__builtin_ctzll(v));
    if (!t.exps.empty() && e < t.exps.back())
      throw ParseError("abelian type entries must be nondecreasing");
    t.exps.push_back(std::uint8_t(e));
    skip();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      continue;
    }
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      return t;
    }
    throw ParseError("expected ',' or ']' in abelian type");
  }
}

bool abelian_is_quotient(const AbelianType& a, const AbelianType& b) {
  // B is a quotient of A iff rank(B) <= rank(A) and, aligning the largest
  // factors, each factor of B divides the corresponding factor of A.
  if (b.rank() > a.rank()) return false;
  std::size_t off = a.rank() - b.rank();
  for (std::size_t i = 0; i < b.exps.size(); ++i)
    if (b.exps[i] > a.exps[off + i]) return false;
  return true;
}

std::string Ipad::str() const {
  return "[" + g_ab.str() + ";" + m_ab.str() + ";" + phi_ab.str() + "]";
}

bool Ipad::operator<(const Ipad& o) const {
  if (g_ab != o.g_ab) return g_ab < o.g_ab;
  if (m_ab != o.m_ab) return m_ab < o.m_ab;
  return phi_ab < o.phi_ab;
}

// ----------------------------------------------------------- presentation

PcPresentation PcPresentation::Builder::build() const {
  PcPresentation pc;
  pc.n_ = unsigned(weights.size());
  pc.nw_ = pc.n_ ? (pc.n_ + 63) / 64 : 1;
  pc.weights_ = weights;
  pc.defs_ = defs;
  pc.pow_ = pow_tails;
  pc.comm_ = comm_tails;
  pc.canonical_ = canonical;
  if (pc.pow_.size() != pc.n_ ||
      pc.comm_.size() != std::size_t(pc.n_) * (pc.n_ ? pc.n_ - 1 : 0) / 2)
    throw Error("pc builder: tail table size mismatch");
  for (unsigned i = 0; i < pc.n_; ++i) {
    if (highest_bit(pc.pow_[i], pc.nw_) >= 0 &&
        lowest_bit(pc.pow_[i], pc.nw_) <= int(i))
      throw Error("pc builder: power tail must use larger indices");
    for (unsigned j = i + 1; j < pc.n_; ++j) {
      const Elt& t = pc.comm_tail(j, i);
      if (highest_bit(t, pc.nw_) >= 0 && lowest_bit(t, pc.nw_) <= int(j))
        throw Error("pc builder: commutator tail must use larger indices");
    }
  }
  pc.class_ = 0;
  for (unsigned i = 0; i < pc.n_; ++i)
    pc.class_ = std::max<unsigned>(pc.class_, weights[i]);
  pc.init_commuting();
  pc.defining_suffixes_ = false;
  for (unsigned i = 0; i < pc.n_ && !pc.defs_.empty(); ++i) {
    const GenDef& d = pc.defs_[i];
    if (d.kind == DefKind::kImage) continue;
    const Elt& tail =
        d.kind == DefKind::kPower ? pc.pow_[d.a] : pc.comm_tail(d.a, d.b);
    if (any_above(tail, i, pc.nw_)) pc.defining_suffixes_ = true;
  }
  return pc;
}

void PcPresentation::init_commuting() {
  commuting_.assign(n_, Elt{});
  for (unsigned i = 0; i < n_; ++i)
    for (unsigned j = i + 1; j < n_; ++j)
      if (is_zero(comm_tail(j, i), nw_)) set_bit(commuting_[i], j);
}

unsigned PcPresentation::rank() const {
  unsigned d = 0;
  while (d < n_ && weights_[d] == 1) ++d;
  return d;
}

namespace {
thread_local std::vector<Elt> g_stack;
}

void PcPresentation::mul_inplace(Elt& acc, const Elt& rhs) const {
  if (is_zero(rhs, nw_)) return;
  std::vector<Elt>& st = g_stack;
  const std::size_t base = st.size();
  st.push_back(rhs);
  while (st.size() > base) {
    int gi = lowest_bit(st.back(), nw_);
    clear_bit(st.back(), unsigned(gi));
    if (is_zero(st.back(), nw_)) st.pop_back();
    const unsigned g = unsigned(gi);
    // merge a_g into acc from the right
    for (;;) {
      if (!any_above(acc, g, nw_)) {
        if (!get_bit(acc, g)) {
          set_bit(acc, g);
        } else {
          clear_bit(acc, g);
          // acc now lives below g; the square tail lives above g
          or_into(acc, pow_[g], nw_);
        }
        break;
      }
      if (!get_bit(acc, g)) {
        Elt high = bits_above(acc, g, nw_);
        if (subset_of(high, commuting_[g], nw_)) {
          set_bit(acc, g);
          break;
        }
      }
      // a_h a_g = a_g a_h (a_h, a_g): peel the top syllable
      unsigned h = unsigned(highest_bit(acc, nw_));
      clear_bit(acc, h);
      Elt entry = comm_tail(h, g);
      set_bit(entry, h);
      st.push_back(entry);
    }
  }
}

Elt PcPresentation::mul_gen(Elt a, unsigned g) const {
  mul_inplace(a, single_bit<kEltWords>(g));
  return a;
}

Elt PcPresentation::inverse(const Elt& u) const {
  Elt r = u, v{};
  while (!is_zero(r, nw_)) {
    unsigned l = unsigned(lowest_bit(r, nw_));
    Elt g = single_bit<kEltWords>(l);
    mul_inplace(r, g);
    mul_inplace(v, g);
  }
  return v;
}

Elt PcPresentation::conj(const Elt& u, const Elt& by) const {
  Elt r = inverse(by);
  mul_inplace(r, u);
  mul_inplace(r, by);
  return r;
}

Elt PcPresentation::commutator(const Elt& a, const Elt& b) const {
  Elt r = inverse(a);
  Elt bi = inverse(b);
  mul_inplace(r, bi);
  mul_inplace(r, a);
  mul_inplace(r, b);
  return r;
}

Elt PcPresentation::power(Elt base, std::uint64_t e) const {
  Elt r{};
  while (e) {
    if (e & 1) mul_inplace(r, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return r;
}

unsigned PcPresentation::order_log2_of(const Elt& u) const {
  Elt e = u;
  unsigned k = 0;
  while (!is_zero(e, nw_)) {
    e = mul(e, e);
    ++k;
    if (k > n_ + 1) throw Error("order computation diverged (inconsistent?)");
  }
  return k;
}

Elt PcPresentation::evaluate(const FreeWord& w, const Elt& gx,
                             const Elt& gy) const {
  Elt acc{};
  for (const FreeWord::Syllable& s : w.syllables()) {
    Elt base = s.gen == 0 ? gx : gy;
    std::int64_t e = s.exp;
    if (e < 0) {
      base = inverse(base);
      e = -e;
    }
    mul_inplace(acc, power(base, std::uint64_t(e)));
  }
  return acc;
}

FreeWord PcPresentation::definition_word(unsigned i) const {
  if (defs_.empty()) throw Error("presentation carries no definitions");
  const GenDef& d = defs_[i];
  if (d.kind == DefKind::kImage) return FreeWord::generator(d.a);
  auto [p, s] = defining_relation_split(*this, i);
  FreeWord source =
      d.kind == DefKind::kPower
          ? definition_word(d.a).pow(2)
          : towerlab::commutator(definition_word(d.a), definition_word(d.b));
  FreeWord pw, sw;
  for (unsigned b = 0; b < n_; ++b) {
    if (get_bit(p, b)) pw.append(definition_word(b));
    if (get_bit(s, b)) sw.append(definition_word(b));
  }
  return pw.inverse() * source * sw.inverse();
}

void PcPresentation::verify_consistency() const {
  auto gen_elt = [&](unsigned i) { return single_bit<kEltWords>(i); };
  for (unsigned i = 0; i < n_; ++i) {
    // a_i (a_i a_i) = (a_i a_i) a_i
    Elt lhs = mul(gen_elt(i), mul(gen_elt(i), gen_elt(i)));
    Elt rhs = mul(mul(gen_elt(i), gen_elt(i)), gen_elt(i));
    if (!mask_eq(lhs, rhs, nw_))
      throw Error("inconsistent: power-power overlap at " +
                  std::to_string(i + 1));
    for (unsigned j = 0; j < n_; ++j) {
      if (j == i) continue;
      unsigned a = std::max(i, j), b = std::min(i, j);
      Elt l2 = mul(gen_elt(a), mul(gen_elt(b), gen_elt(b)));
      Elt r2 = mul(mul(gen_elt(a), gen_elt(b)), gen_elt(b));
      if (!mask_eq(l2, r2, nw_))
        throw Error("inconsistent: power overlap (" + std::to_string(a + 1) +
                    "," + std::to_string(b + 1) + ")");
    }
  }
  for (unsigned k = 2; k < n_; ++k)
    for (unsigned j = 1; j < k; ++j)
      for (unsigned i = 0; i < j; ++i) {
        Elt lhs = mul(gen_elt(k), mul(gen_elt(j), gen_elt(i)));
        Elt rhs = mul(mul(gen_elt(k), gen_elt(j)), gen_elt(i));
        if (!mask_eq(lhs, rhs, nw_))
          throw Error("inconsistent: associativity (" + std::to_string(k + 1) +
                      "," + std::to_string(j + 1) + "," + std::to_string(i + 1) +
                      ")");
      }
}

std::string PcPresentation::serialize() const {
  std::ostringstream os;
  os << "pcp 1\n";
  os << "n " << n_ << "\n";
  if (n_) {
    os << "w";
    for (unsigned i = 0; i < n_; ++i) os << ' ' << unsigned(weights_[i]);
    os << "\n";
  }
  if (!defs_.empty()) {
    for (unsigned i = 0; i < n_; ++i) {
      os << "d " << i + 1 << ' ';
      switch (defs_[i].kind) {
        case DefKind::kImage:
          os << "img " << defs_[i].a + 1;
          break;
        case DefKind::kPower:
          os << "pow " << defs_[i].a + 1;
          break;
        case DefKind::kComm:
          os << "comm " << defs_[i].a + 1 << ' ' << defs_[i].b + 1;
          break;
      }
      os << "\n";
    }
  }
  auto emit = [&](const Elt& t, const std::string& head) {
    os << head;
    for (unsigned b = 0; b < n_; ++b)
      if (get_bit(t, b)) os << ' ' << b + 1;
    os << "\n";
  };
  for (unsigned i = 0; i < n_; ++i)
    if (!is_zero(pow_[i], nw_))
      emit(pow_[i], "p " + std::to_string(i + 1));
  for (unsigned j = 1; j < n_; ++j)
    for (unsigned i = 0; i < j; ++i)
      if (!is_zero(comm_tail(j, i), nw_))
        emit(comm_tail(j, i),
             "c " + std::to_string(j + 1) + " " + std::to_string(i + 1));
  os << "end\n";
  return os.str();
}

PcPresentation PcPresentation::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  unsigned version = 0;
  if (!(is >> tag >> version) || tag != "pcp" || version != 1)
    throw ParseError("bad pcp header");
  Builder b;
  unsigned n = 0;
  bool have_defs = false;
  while (is >> tag) {
    if (tag == "end") break;
    if (tag == "n") {
      if (!(is >> n)) throw ParseError("bad n line");
      b.weights.assign(n, 1);
      b.pow_tails.assign(n, Elt{});
      b.comm_tails.assign(std::size_t(n) * (n ? n - 1 : 0) / 2, Elt{});
    } else if (tag == "w") {
      for (unsigned i = 0; i < n; ++i) {
        unsigned w;
        if (!(is >> w)) throw ParseError("bad weight line");
        b.weights[i] = std::uint8_t(w);
      }
    } else if (tag == "d") {
      unsigned i;
      std::string kind;
      if (!(is >> i >> kind)) throw ParseError("bad definition line");
      if (!have_defs) {
        b.defs.assign(n, GenDef{});
        have_defs = true;
      }
      GenDef d;
      unsigned a = 0, bb = 0;
      if (kind == "img") {
        is >> a;
        d = GenDef{DefKind::kImage, std::uint16_t(a - 1), 0};
      } else if (kind == "pow") {
        is >> a;
        d = GenDef{DefKind::kPower, std::uint16_t(a - 1), 0};
      } else if (kind == "comm") {
        is >> a >> bb;
        d = GenDef{DefKind::kComm, std::uint16_t(a - 1), std::uint16_t(bb - 1)};
      } else {
        throw ParseError("bad definition kind " + kind);
      }
      b.defs.at(i - 1) = d;
    } else if (tag == "p" || tag == "c") {
      unsigned j = 0, i = 0;
      Elt t{};
      if (tag == "p") {
        if (!(is >> i)) throw ParseError("bad power line");
      } else {
        if (!(is >> j >> i)) throw ParseError("bad commutator line");
      }
      std::string rest;
      std::getline(is, rest);
      std::istringstream rs(rest);
      unsigned bit;
      while (rs >> bit) {
        if (bit < 1 || bit > n) throw ParseError("tail index out of range");
        set_bit(t, bit - 1);
      }
      if (tag == "p")
        b.pow_tails.at(i - 1) = t;
      else
        b.comm_tails.at(std::size_t(j - 1) * (j - 2) / 2 + (i - 1)) = t;
    } else {
      throw ParseError("unknown pcp line tag " + tag);
    }
  }
  if (tag != "end") throw ParseError("missing pcp end");
  b.canonical = have_defs;
  return b.build();
}

bool PcPresentation::identical(const PcPresentation& o) const {
  if (n_ != o.n_ || weights_ != o.weights_) return false;
  for (unsigned i = 0; i < n_; ++i)
    if (!mask_eq(pow_[i], o.pow_[i], nw_)) return false;
  for (std::size_t k = 0; k < comm_.size(); ++k)
    if (!mask_eq(comm_[k], o.comm_[k], nw_)) return false;
  return true;
}

// ----------------------------------------------------------- automorphism

Elt Automorphism::apply(const PcPresentation& pc, const Elt& e) const {
  Elt r{};
  for (unsigned i = 0; i < pc.ngens(); ++i)
    if (get_bit(e, i)) pc.mul_inplace(r, img[i]);
  return r;
}

Automorphism compose(const PcPresentation& pc, const Automorphism& f,
                     const Automorphism& g) {
  Automorphism h;
  h.img.resize(pc.ngens());
  for (unsigned i = 0; i < pc.ngens(); ++i) h.img[i] = f.apply(pc, g.img[i]);
  return h;
}

// -------------------------------------------------------------- subgroups

SubgroupBasis::SubgroupBasis(const PcPresentation& pc)
    : pc_(&pc), slot_(pc.ngens(), -1) {}

Elt SubgroupBasis::sift(Elt g) const {
  const unsigned nw = pc_->nwords();
  for (;;) {
    int hit = -1;
    for (unsigned w = 0; w < nw; ++w) {
      std::uint64_t m = g[w];
      while (m) {
        unsigned b = w * 64 + unsigned(__builtin_ctzll(m));
        if (slot_[b] >= 0) {
          hit = int(b);
          break;
        }
        m &= m - 1;
      }
      if (hit >= 0) break;
    }
    if (hit < 0) return g;
    pc_->mul_inplace(g, rows_[std::size_t(slot_[unsigned(hit)])]);
  }
}

int SubgroupBasis::insert_pos(Elt g) {
  g = sift(g);
  int lead = lowest_bit(g, pc_->nwords());
  if (lead < 0) return -1;
  // keep rows sorted by leading index
  std::size_t at = 0;
  while (at < rows_.size() && lowest_bit(rows_[at], pc_->nwords()) < lead) ++at;
  rows_.insert(rows_.begin() + std::ptrdiff_t(at), g);
  for (auto& s : slot_)
    if (s >= int(at)) ++s;
  slot_[unsigned(lead)] = std::int16_t(at);
  return int(at);
}

void SubgroupBasis::canonicalize() {
  const unsigned nw = pc_->nwords();
  for (std::size_t k = rows_.size(); k-- > 0;) {
    Elt& r = rows_[k];
    for (;;) {
      int hit = -1;
      for (unsigned w = 0; w < nw && hit < 0; ++w) {
        std::uint64_t m = r[w];
        while (m) {
          unsigned b = w * 64 + unsigned(__builtin_ctzll(m));
          if (slot_[b] >= 0 && slot_[b] != int(k)) {
            hit = int(b);
            break;
          }
          m &= m - 1;
        }
      }
      if (hit < 0) break;
      Elt next = rows_[std::size_t(slot_[unsigned(hit)])];
      pc_->mul_inplace(r, next);
    }
  }
}

bool SubgroupBasis::is_normal() const {
  for (const Elt& r : rows_)
    for (unsigned g = 0; g < pc_->ngens(); ++g) {
      Elt c = pc_->conj(r, pc_->gen(g));
      if (!contains(c)) return false;
    }
  return true;
}

std::vector<std::uint8_t> SubgroupBasis::express(Elt g) const {
  const unsigned nw = pc_->nwords();
  std::vector<std::uint8_t> used(rows_.size(), 0);
  for (;;) {
    int hit = -1;
    for (unsigned w = 0; w < nw && hit < 0; ++w) {
      std::uint64_t m = g[w];
      while (m) {
        unsigned b = w * 64 + unsigned(__builtin_ctzll(m));
        if (slot_[b] >= 0) {
          hit = int(b);
          break;
        }
        m &= m - 1;
      }
    }
    if (hit < 0) break;
    unsigned row = unsigned(slot_[unsigned(hit)]);
    used[row] ^= 1;
    pc_->mul_inplace(g, rows_[row]);
  }
  if (!is_zero(g, nw)) throw Error("express: element not in subgroup");
  return used;
}

std::string SubgroupBasis::key() const {
  std::string s;
  for (const Elt& r : rows_) {
    for (unsigned w = 0; w < pc_->nwords(); ++w) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx",
                    static_cast<unsigned long long>(r[w]));
      s += buf;
    }
    s += '|';
  }
  return s;
}

SubgroupBasis SubgroupBasis::span(const PcPresentation& pc,
                                  const std::vector<Elt>& gens) {
  SubgroupBasis b(pc);
  for (const Elt& g : gens) b.insert(g);
  return b;
}

namespace {

SubgroupBasis close_impl(const PcPresentation& pc, const std::vector<Elt>& gens,
                         bool normal, const Automorphism* sigma) {
  SubgroupBasis b(pc);
  std::deque<Elt> work(gens.begin(), gens.end());
  std::vector<Elt> inserted;
  while (!work.empty()) {
    Elt g = work.front();
    work.pop_front();
    Elt r = b.sift(g);
    if (is_zero(r, pc.nwords())) continue;
    b.insert(r);
    work.push_back(pc.mul(r, r));
    for (const Elt& e : inserted) {
      work.push_back(pc.mul(r, e));
      work.push_back(pc.mul(e, r));
    }
    if (normal)
      for (unsigned k = 0; k < pc.ngens(); ++k)
        work.push_back(pc.conj(r, pc.gen(k)));
    if (sigma) work.push_back(sigma->apply(pc, r));
    inserted.push_back(r);
  }
  b.canonicalize();
  return b;
}

}  // namespace

SubgroupBasis SubgroupBasis::closure(const PcPresentation& pc,
                                     const std::vector<Elt>& gens) {
  return close_impl(pc, gens, false, nullptr);
}

SubgroupBasis SubgroupBasis::normal_closure(const PcPresentation& pc,
                                            const std::vector<Elt>& gens,
                                            const Automorphism* sigma) {
  return close_impl(pc, gens, true, sigma);
}

SubgroupBasis SubgroupBasis::whole(const PcPresentation& pc) {
  SubgroupBasis b(pc);
  for (unsigned i = 0; i < pc.ngens(); ++i) b.insert(pc.gen(i));
  return b;
}

SubgroupBasis normal_sigma_closure(const PcPresentation& pc, const Elt& z,
                                   const Automorphism* sigma) {
  std::vector<Elt> gens{z};
  return SubgroupBasis::normal_closure(pc, gens, sigma);
}

// ---------------------------------------------------------- abelian types

AbelianType abelianization(const PcPresentation& pc, const SubgroupBasis* h) {
  std::vector<Elt> basis;
  SubgroupBasis full = SubgroupBasis::whole(pc);
  const SubgroupBasis& sb = h ? *h : full;
  const std::size_t k = sb.rows().size();
  if (k == 0) return AbelianType{};

  IntMat rows;
  rows.reserve(k + k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    Elt sq = pc.mul(sb.rows()[i], sb.rows()[i]);
    std::vector<std::uint8_t> used = sb.express(sq);
    std::vector<BigInt> row(k, 0);
    for (std::size_t j = 0; j < k; ++j) row[j] = used[j];
    row[i] += 2;
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      Elt c = pc.commutator(sb.rows()[j], sb.rows()[i]);
      if (is_zero(c, pc.nwords())) continue;
      std::vector<std::uint8_t> used = sb.express(c);
      std::vector<BigInt> row(k, 0);
      bool nz = false;
      for (std::size_t t = 0; t < k; ++t) {
        row[t] = used[t];
        nz = nz || used[t];
      }
      if (nz) rows.push_back(std::move(row));
    }
  std::vector<BigInt> diag = smith_normal_form(std::move(rows));
  AbelianType t;
  for (const BigInt& d : diag) {
    if (d == 0)
      throw Error("abelianization: infinite factor (not a finite 2-group)");
    if (d == 1) continue;
    BigInt v = d;
    unsigned e = 0;
    while (v % 2 == 0) {
      v /= 2;
      ++e;
    }
    if (v != 1) throw Error("abelianization: non-2-power invariant factor");
    t.exps.push_back(std::uint8_t(e));
  }
  std::sort(t.exps.begin(), t.exps.end());
  return t;
}

SubgroupBasis frattini_subgroup(const PcPresentation& pc) {
  std::vector<Elt> gens;
  for (unsigned i = 0; i < pc.ngens(); ++i) {
    gens.push_back(pc.mul(pc.gen(i), pc.gen(i)));
    for (unsigned j = i + 1; j < pc.ngens(); ++j)
      gens.push_back(pc.commutator(pc.gen(j), pc.gen(i)));
  }
  return SubgroupBasis::normal_closure(pc, gens);
}

std::vector<SubgroupBasis> maximal_subgroups(const PcPresentation& pc) {
  SubgroupBasis phi = frattini_subgroup(pc);
  if (pc.ngens() - phi.order_log2() != 2)
    throw Error("maximal_subgroups: group is not 2-generated");
  // complement representatives of the three lines of G/Phi
  std::vector<Elt> reps;
  unsigned a = 0, b = 0;
  {
    std::vector<unsigned> free_slots;
    for (unsigned i = 0; i < pc.ngens(); ++i)
      if (phi.slot_row(i) < 0) free_slots.push_back(i);
    a = free_slots[0];
    b = free_slots[1];
  }
  reps.push_back(pc.gen(a));
  reps.push_back(pc.gen(b));
  reps.push_back(pc.mul(pc.gen(a), pc.gen(b)));
  std::vector<SubgroupBasis> ms;
  for (const Elt& r : reps) {
    std::vector<Elt> gens = {r};
    for (const Elt& e : phi.rows()) gens.push_back(e);
    SubgroupBasis m = SubgroupBasis::span(pc, gens);
    m.canonicalize();
    ms.push_back(std::move(m));
  }
  return ms;
}

std::vector<SubgroupBasis> two_central_series(const PcPresentation& pc) {
  std::vector<SubgroupBasis> series;
  series.push_back(SubgroupBasis::whole(pc));
  for (;;) {
    const SubgroupBasis& cur = series.back();
    if (cur.order_log2() == 0) break;
    std::vector<Elt> gens;
    for (const Elt& b : cur.rows()) {
      gens.push_back(pc.mul(b, b));
      for (unsigned g = 0; g < pc.ngens(); ++g)
        gens.push_back(pc.commutator(pc.gen(g), b));
    }
    SubgroupBasis next = SubgroupBasis::normal_closure(pc, gens);
    if (next.order_log2() == cur.order_log2())
      throw Error("two_central_series did not terminate");
    series.push_back(std::move(next));
  }
  return series;
}

std::vector<SubgroupBasis> low_index_subgroups(const PcPresentation& pc,
                                               unsigned max_index_log2) {
  std::vector<SubgroupBasis> all;
  std::unordered_set<std::string> seen;
  std::vector<SubgroupBasis> layer;
  layer.push_back(SubgroupBasis::whole(pc));
  all.push_back(layer[0]);
  seen.insert(layer[0].key());
  for (unsigned depth = 0; depth < max_index_log2; ++depth) {
    std::vector<SubgroupBasis> next;
    for (const SubgroupBasis& h : layer) {
      // Frattini subgroup of H
      std::vector<Elt> fg;
      for (const Elt& b : h.rows()) {
        fg.push_back(pc.mul(b, b));
        for (const Elt& c : h.rows()) fg.push_back(pc.commutator(b, c));
      }
      // close within H under conjugation by basis elements
      SubgroupBasis phi(pc);
      {
        std::deque<Elt> work(fg.begin(), fg.end());
        std::vector<Elt> ins;
        while (!work.empty()) {
          Elt g = work.front();
          work.pop_front();
          Elt r = phi.sift(g);
          if (is_zero(r, pc.nwords())) continue;
          phi.insert(r);
          work.push_back(pc.mul(r, r));
          for (const Elt& e : ins) {
            work.push_back(pc.mul(r, e));
            work.push_back(pc.mul(e, r));
          }
          for (const Elt& b : h.rows()) work.push_back(pc.conj(r, b));
          ins.push_back(r);
        }
      }
      unsigned d = h.order_log2() - phi.order_log2();
      // complements of Phi(H) inside H
      std::vector<Elt> comp;
      for (const Elt& r : h.rows())
        if (!phi.contains(r)) comp.push_back(r);
      // comp spans d independent directions mod Phi(H); rebuild exactly d
      {
        SubgroupBasis probe = phi;
        std::vector<Elt> indep;
        for (const Elt& c : comp)
          if (probe.insert(c)) indep.push_back(c);
        comp = indep;
        if (comp.size() != d)
          throw Error("low_index_subgroups: complement extraction failed");
      }
      // hyperplanes of F_2^d
      for (std::uint32_t f = 1; f < (1u << d); ++f) {
        std::vector<Elt> gens;
        for (const Elt& e : phi.rows()) gens.push_back(e);
        // kernel of the functional f: vectors v with <f,v> = 0
        for (unsigned i = 0; i < d; ++i) {
          if (!((f >> i) & 1)) {
            gens.push_back(comp[i]);
          } else {
            for (unsigned j = i + 1; j < d; ++j)
              if ((f >> j) & 1) gens.push_back(pc.mul(comp[i], comp[j]));
          }
        }
        SubgroupBasis s = SubgroupBasis::span(pc, gens);
        s.canonicalize();
        if (s.order_log2() + 1 != h.order_log2())
          throw Error("low_index_subgroups: bad hyperplane");
        std::string k = s.key();
        if (seen.insert(k).second) {
          next.push_back(s);
          all.push_back(s);
        }
      }
    }
    layer = std::move(next);
    if (layer.empty()) break;
  }
  return all;
}

Ipad ipad_of_unchecked(const PcPresentation& pc) {
  Ipad p;
  p.g_ab = abelianization(pc);
  std::vector<SubgroupBasis> ms = maximal_subgroups(pc);
  p.m_ab = abelianization(pc, &ms[0]);
  SubgroupBasis phi = frattini_subgroup(pc);
  p.phi_ab = abelianization(pc, &phi);
  return p;
}

Ipad ipad_of(const PcPresentation& pc) {
  Ipad p;
  p.g_ab = abelianization(pc);
  std::vector<SubgroupBasis> ms = maximal_subgroups(pc);
  std::vector<AbelianType> abs;
  for (const SubgroupBasis& m : ms) abs.push_back(abelianization(pc, &m));
  if (abs[0] != abs[1] || abs[1] != abs[2])
    throw Error("ipad: maximal-subgroup abelianizations disagree "
                "(group is not valid)");
  p.m_ab = abs[0];
  SubgroupBasis phi = frattini_subgroup(pc);
  p.phi_ab = abelianization(pc, &phi);
  return p;
}

// ------------------------------------------------------- definition chains

std::pair<Elt, Elt> defining_relation_split(const PcPresentation& pc,
                                            unsigned k) {
  const GenDef& d = pc.def(k);
  if (d.kind == DefKind::kImage)
    throw Error("defining_relation_split: weight-1 generator");
  const Elt& tail = d.kind == DefKind::kPower ? pc.power_tail(d.a)
                                              : pc.comm_tail(d.a, d.b);
  if (!get_bit(tail, k))
    throw Error("defining_relation_split: generator missing from its "
                "defining relation");
  Elt p{}, s{};
  for (unsigned b = 0; b < pc.ngens(); ++b) {
    if (!get_bit(tail, b) || b == k) continue;
    if (b < k)
      set_bit(p, b);
    else
      set_bit(s, b);
  }
  return {p, s};
}

Automorphism extend_images_unchecked(const PcPresentation& g,
                                     const PcPresentation& h, const Elt& u,
                                     const Elt& v) {
  const unsigned n = g.ngens();
  Automorphism a;
  a.img.assign(n, Elt{});
  auto img_of_mask = [&](const Elt& m) {
    Elt r{};
    for (unsigned b = 0; b < n; ++b)
      if (get_bit(m, b)) h.mul_inplace(r, a.img[b]);
    return r;
  };
  // Defining relations may carry tails of strictly larger weight; ascending
  // Gauss-Seidel passes gain one weight level per round.
  const unsigned passes = g.defining_suffixes() ? g.two_class() + 1 : 1;
  for (unsigned pass = 0; pass < passes; ++pass) {
    bool changed = false;
    for (unsigned i = 0; i < n; ++i) {
      const GenDef& d = g.def(i);
      Elt r;
      if (d.kind == DefKind::kImage) {
        r = d.a == 0 ? u : v;
      } else {
        auto [p, s] = defining_relation_split(g, i);
        Elt source = d.kind == DefKind::kPower
                         ? h.mul(a.img[d.a], a.img[d.a])
                         : h.commutator(a.img[d.a], a.img[d.b]);
        r = is_zero(p, g.nwords()) ? Elt{} : h.inverse(img_of_mask(p));
        h.mul_inplace(r, source);
        if (!is_zero(s, g.nwords()))
          h.mul_inplace(r, h.inverse(img_of_mask(s)));
      }
      if (!mask_eq(r, a.img[i], h.nwords())) {
        a.img[i] = r;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return a;
}

std::optional<Automorphism> extend_images_into(const PcPresentation& g,
                                               const PcPresentation& h,
                                               const Elt& u, const Elt& v) {
  const unsigned n = g.ngens();
  Automorphism a = extend_images_unchecked(g, h, u, v);
  auto img_of_mask = [&](const Elt& m) {
    Elt r{};
    for (unsigned b = 0; b < n; ++b)
      if (get_bit(m, b)) h.mul_inplace(r, a.img[b]);
    return r;
  };
  // verify the non-defining relations
  std::vector<bool> pow_def(n, false);
  std::vector<std::vector<bool>> comm_def(n);
  for (unsigned i = 0; i < n; ++i) comm_def[i].assign(i, false);
  for (unsigned i = 0; i < n; ++i) {
    const GenDef& d = g.def(i);
    if (d.kind == DefKind::kPower) pow_def[d.a] = true;
    if (d.kind == DefKind::kComm) comm_def[d.a][d.b] = true;
  }
  for (unsigned i = 0; i < n; ++i) {
    if (pow_def[i]) continue;
    Elt lhs = h.mul(a.img[i], a.img[i]);
    if (!mask_eq(lhs, img_of_mask(g.power_tail(i)), h.nwords()))
      return std::nullopt;
  }
  for (unsigned j = 1; j < n; ++j)
    for (unsigned i = 0; i < j; ++i) {
      if (comm_def[j][i]) continue;
      // a_j a_i = a_i a_j (a_j, a_i), avoiding inverses
      Elt lhs = h.mul(a.img[j], a.img[i]);
      Elt rhs = h.mul(a.img[i], a.img[j]);
      h.mul_inplace(rhs, img_of_mask(g.comm_tail(j, i)));
      if (!mask_eq(lhs, rhs, h.nwords())) return std::nullopt;
    }
  if (g.ngens() != h.ngens()) return std::nullopt;
  SubgroupBasis span(h);
  for (unsigned i = 0; i < n; ++i) span.insert(a.img[i]);
  if (span.order_log2() != h.ngens()) return std::nullopt;
  return a;
}

PcPresentation resort_by_weight(const PcPresentation& pc,
                                std::vector<unsigned>* perm_new_to_old) {
  const unsigned n = pc.ngens();
  std::vector<unsigned> perm(n);
  for (unsigned i = 0; i < n; ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(), [&](unsigned a, unsigned b) {
    return pc.weight(a) < pc.weight(b);
  });
  bool sorted = true;
  for (unsigned i = 0; i < n; ++i) sorted = sorted && perm[i] == i;
  if (perm_new_to_old) *perm_new_to_old = perm;
  if (sorted) return pc;

  std::vector<unsigned> inv(n);
  for (unsigned i = 0; i < n; ++i) inv[perm[i]] = i;

  PcPresentation::Builder b;
  b.weights.resize(n);
  b.defs.resize(n);
  b.pow_tails.assign(n, Elt{});
  b.comm_tails.assign(std::size_t(n) * (n - 1) / 2, Elt{});
  for (unsigned i = 0; i < n; ++i) {
    b.weights[i] = std::uint8_t(pc.weight(perm[i]));
    GenDef d = pc.def(perm[i]);
    if (d.kind != DefKind::kImage) {
      d.a = std::uint16_t(inv[d.a]);
      if (d.kind == DefKind::kComm) d.b = std::uint16_t(inv[d.b]);
    }
    b.defs[i] = d;
  }

  // Normal form along the new chain, extracted in the old group: strip
  // generators in new order; suffix spans are subgroups since the new order
  // is graded by weight, so coordinates peel off greedily.
  std::vector<Elt> gen_inv(n);
  for (unsigned i = 0; i < n; ++i) gen_inv[i] = pc.inverse(pc.gen(i));
  auto renormalize = [&](Elt val) {
    Elt out{};
    for (unsigned t = 0; t < n; ++t) {
      unsigned o = perm[t];
      if (!get_bit(val, o)) continue;
      set_bit(out, t);
      val = pc.mul(gen_inv[o], val);
    }
    if (!is_zero(val, pc.nwords()))
      throw Error("resort_by_weight: renormalization failed");
    return out;
  };
  for (unsigned i = 0; i < n; ++i) {
    b.pow_tails[i] = renormalize(pc.mul(pc.gen(perm[i]), pc.gen(perm[i])));
    for (unsigned j = unsigned(i) + 1; j < n; ++j)
      b.comm_tails[std::size_t(j) * (j - 1) / 2 + i] =
          renormalize(pc.commutator(pc.gen(perm[j]), pc.gen(perm[i])));
  }
  b.canonical = pc.canonical();
  return b.build();
}

// ---------------------------------------------------------------- quotient

Elt QuotientMap::project(const PcPresentation& g, const SubgroupBasis& n,
                         const Elt& e) const {
  Elt r = n.sift(e);
  Elt out{};
  for (unsigned i = 0; i < g.ngens(); ++i)
    if (get_bit(r, i)) {
      if (new_index[i] < 0) throw Error("project: sift left a kernel bit");
      set_bit(out, unsigned(new_index[i]));
    }
  return out;
}

QuotientMap quotient_by_normal(const PcPresentation& pc,
                               const SubgroupBasis& n) {
  QuotientMap qm;
  qm.new_index.assign(pc.ngens(), -1);
  std::vector<unsigned> keep;
  for (unsigned i = 0; i < pc.ngens(); ++i)
    if (n.slot_row(i) < 0) {
      qm.new_index[i] = std::int32_t(keep.size());
      keep.push_back(i);
    }
  PcPresentation::Builder b;
  const unsigned m = unsigned(keep.size());
  b.weights.resize(m);
  for (unsigned i = 0; i < m; ++i) b.weights[i] = std::uint8_t(pc.weight(keep[i]));
  b.pow_tails.assign(m, Elt{});
  b.comm_tails.assign(std::size_t(m) * (m ? m - 1 : 0) / 2, Elt{});
  auto compress = [&](const Elt& e) {
    Elt r = n.sift(e);
    Elt out{};
    for (unsigned i = 0; i < pc.ngens(); ++i)
      if (get_bit(r, i)) set_bit(out, unsigned(qm.new_index[i]));
    return out;
  };
  for (unsigned i = 0; i < m; ++i) {
    b.pow_tails[i] = compress(pc.mul(pc.gen(keep[i]), pc.gen(keep[i])));
    for (unsigned j = i + 1; j < m; ++j)
      b.comm_tails[std::size_t(j) * (j - 1) / 2 + i] =
          compress(pc.commutator(pc.gen(keep[j]), pc.gen(keep[i])));
  }
  b.canonical = false;
  qm.q = b.build();
  return qm;
}

}  // namespace towerlab
