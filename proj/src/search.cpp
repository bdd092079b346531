#include "towerlab/search.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace towerlab {

namespace {
inline std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

Rng Rng::for_sample(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix(s);
  s = a ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
  return Rng(s);
}

std::uint64_t Rng::next() { return splitmix(state_); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  for (;;) {
    std::uint64_t r = next();
    if (r < limit) return r % n;
  }
}

std::string SearchConfig::str() const {
  std::ostringstream os;
  os << "seed=" << seed << " samples=" << samples << " min-len=" << min_len
     << " max-len=" << max_len << " class-cap=" << class_cap << " order-cap=2^"
     << order_cap_log2 << " pairs=" << pairs << " workers=" << workers;
  return os.str();
}

FreeWord sample_frattini_word(Rng& rng, unsigned min_len, unsigned max_len) {
  if (max_len < min_len) throw Error("sample_frattini_word: bad bounds");
  for (;;) {
    unsigned len = min_len + unsigned(rng.below(max_len - min_len + 1));
    FreeWord w;
    int last = -1;  // letter code 2*gen + (exp>0)
    for (unsigned i = 0; i < len; ++i) {
      int code;
      if (last < 0) {
        code = int(rng.below(4));
      } else {
        // anything except the inverse of the previous letter
        int banned = last ^ 1;
        code = int(rng.below(3));
        if (code >= banned) ++code;
      }
      w.append(unsigned(code >> 1), (code & 1) ? 1 : -1);
      last = code;
    }
    if (w.in_frattini()) return w;
  }
}

std::vector<unsigned> GrowthProfile::diffs() const {
  std::vector<unsigned> d;
  for (std::size_t i = 1; i < log2_orders.size(); ++i)
    d.push_back(log2_orders[i] - log2_orders[i - 1]);
  return d;
}

FinitenessOutcome finiteness_probe(const FpPresentation& pres,
                                   unsigned class_cap,
                                   unsigned order_cap_log2) {
  FinitenessOutcome out;
  QuotientResult q = two_quotient(pres, class_cap, order_cap_log2);
  out.profile.log2_orders = q.log2_orders;
  out.profile.capped = q.capped;
  out.finite = !q.capped;
  if (out.finite) out.quotient = std::move(q);
  return out;
}

GrowthProfile growth_profile(const FpPresentation& pres, unsigned class_cap,
                             unsigned order_cap_log2) {
  QuotientResult q = two_quotient(pres, class_cap, order_cap_log2);
  GrowthProfile p;
  p.log2_orders = q.log2_orders;
  p.capped = q.capped;
  return p;
}

PeriodicityVerdict periodicity_verdict(const GrowthProfile& profile,
                                       unsigned min_window) {
  PeriodicityVerdict v;
  std::vector<unsigned> d = profile.diffs();
  if (d.size() < min_window || !profile.capped) {
    v.kind = PeriodicityVerdict::kInconclusive;
    return v;
  }
  const unsigned window_start = unsigned(d.size()) / 3;
  for (unsigned p = 1; p <= (unsigned(d.size()) - window_start) / 2; ++p) {
    bool ok = true;
    for (unsigned i = window_start; i + p < d.size() && ok; ++i)
      ok = d[i] == d[i + p];
    if (!ok) continue;
    // extend the periodic tail backwards for the preperiod
    unsigned t = window_start;
    while (t > 0 && d[t - 1] == d[t - 1 + p]) --t;
    v.kind = PeriodicityVerdict::kPeriodic;
    v.preperiod = t;
    v.period = p;
    return v;
  }
  v.kind = PeriodicityVerdict::kAperiodic;
  return v;
}

namespace {

// preimage in q of a subgroup of the class-base_class quotient given by
// masks over the first nb generators
SubgroupBasis preimage_subgroup(const PcPresentation& q, unsigned nb,
                                const std::vector<Elt>& rows) {
  std::vector<Elt> gens = rows;
  for (unsigned i = nb; i < q.ngens(); ++i) gens.push_back(q.gen(i));
  SubgroupBasis b = SubgroupBasis::span(q, gens);
  b.canonicalize();
  return b;
}

}  // namespace

FabResult fab_probe(const FpPresentation& pres, unsigned max_index_log2,
                    unsigned class_cap, unsigned order_cap_log2) {
  FabResult out;
  QuotientResult deep = two_quotient(pres, class_cap, order_cap_log2);
  if (!deep.capped) {
    // finite group: every abelianization is finite
    out.pass = true;
    return out;
  }
  if (deep.class_reached < max_index_log2 + 2) {
    out.inconclusive = true;
    return out;
  }
  QuotientResult prev = two_quotient(pres, deep.class_reached - 1,
                                     order_cap_log2);
  QuotientResult base = two_quotient(pres, max_index_log2, order_cap_log2);
  std::vector<SubgroupBasis> subs =
      low_index_subgroups(base.group, max_index_log2);
  out.pass = true;
  for (const SubgroupBasis& s : subs) {
    ++out.checked_subgroups;
    SubgroupBasis sp = preimage_subgroup(prev.group, base.group.ngens(),
                                         s.rows());
    SubgroupBasis sd = preimage_subgroup(deep.group, base.group.ngens(),
                                         s.rows());
    AbelianType ap = abelianization(prev.group, &sp);
    AbelianType ad = abelianization(deep.group, &sd);
    if (ap != ad) {
      out.pass = false;
      std::ostringstream os;
      os << "index-2^" << s.index_log2() << " subgroup: " << ap.str()
         << " -> " << ad.str() << " between classes "
         << prev.class_reached << " and " << deep.class_reached;
      out.witness = os.str();
      return out;
    }
  }
  return out;
}

RankResult rank_probe(const FpPresentation& pres, unsigned index_bound_log2,
                      unsigned class_cap, unsigned order_cap_log2) {
  RankResult out;
  QuotientResult deep = two_quotient(pres, class_cap, order_cap_log2);
  if (!deep.capped) {
    out.bounded = true;
    // rank of a finite group: maximum over the tracked normal subgroups
    std::vector<SubgroupBasis> series = two_central_series(deep.group);
    for (const SubgroupBasis& p : series) {
      if (p.order_log2() == 0) continue;
      SubgroupBasis phi = frattini_subgroup(deep.group);
      (void)phi;
      out.max_rank = std::max<unsigned>(
          out.max_rank, unsigned(abelianization(deep.group, &p).rank()));
    }
    return out;
  }
  const unsigned top = deep.class_reached;
  if (top < 6) {
    out.inconclusive = true;
    return out;
  }
  QuotientResult base = two_quotient(pres, 4, order_cap_log2);
  std::vector<SubgroupBasis> normals;
  for (const SubgroupBasis& s : low_index_subgroups(base.group, 4))
    if (s.is_normal()) normals.push_back(s);

  for (unsigned c = top - 2; c <= top; ++c) {
    QuotientResult q = two_quotient(pres, c, order_cap_log2);
    unsigned mx = 0;
    // central series terms with index within the bound
    for (unsigned k = 1; k <= q.group.two_class(); ++k) {
      std::vector<Elt> rows;
      unsigned index_log2 = 0;
      for (unsigned i = 0; i < q.group.ngens(); ++i) {
        if (q.group.weight(i) > k)
          rows.push_back(q.group.gen(i));
        else
          ++index_log2;
      }
      if (index_log2 > index_bound_log2 || rows.empty()) continue;
      SubgroupBasis pk = SubgroupBasis::span(q.group, rows);
      // generator rank d(P_k) = log2 of P_k / Phi(P_k)
      std::vector<Elt> fr;
      for (const Elt& a : pk.rows()) {
        fr.push_back(q.group.mul(a, a));
        for (const Elt& b : pk.rows()) fr.push_back(q.group.commutator(a, b));
      }
      SubgroupBasis phi = SubgroupBasis::closure(q.group, fr);
      mx = std::max<unsigned>(mx, pk.order_log2() - phi.order_log2());
    }
    for (const SubgroupBasis& s : normals) {
      SubgroupBasis sp = preimage_subgroup(q.group, base.group.ngens(),
                                           s.rows());
      std::vector<Elt> fr;
      for (const Elt& a : sp.rows()) {
        fr.push_back(q.group.mul(a, a));
        for (const Elt& b : sp.rows()) fr.push_back(q.group.commutator(a, b));
      }
      SubgroupBasis phi = SubgroupBasis::closure(q.group, fr);
      mx = std::max<unsigned>(mx, sp.order_log2() - phi.order_log2());
    }
    out.max_rank_by_class.push_back(mx);
  }
  out.max_rank = out.max_rank_by_class.back();
  out.bounded = out.max_rank_by_class[0] == out.max_rank_by_class[1] &&
                out.max_rank_by_class[1] == out.max_rank_by_class[2];
  return out;
}

// ----------------------------------------------------------------- census

std::string CensusRecord::line() const {
  std::ostringstream os;
  os << "record first=" << first_seen << " hits=" << hits << " pairs=";
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (i) os << '|';
    os << us[i].str();
  }
  os << " order=2^" << group.order_log2() << " class=" << group.two_class()
     << " ipad=" << fp.ipad.str() << " special=" << (verdict.special ? 1 : 0)
     << " two_special=" << (verdict.two_special ? 1 : 0)
     << " rank=" << verdict.relation_rank << " nuclear=" << nuclear_rank
     << " fp=" << fp.str();
  return os.str();
}

namespace {

struct SampleOutcome {
  bool capped = false;
  std::vector<FreeWord> us;
  QuotientResult q;  // set when finite
};

SampleOutcome run_sample(const SearchConfig& cfg, std::uint64_t index) {
  SampleOutcome out;
  Rng rng = Rng::for_sample(cfg.seed, index);
  for (unsigned p = 0; p < cfg.pairs; ++p)
    out.us.push_back(sample_frattini_word(rng, cfg.min_len, cfg.max_len));
  FpPresentation pres = FpPresentation::from_pairs(out.us);
  QuotientResult q = two_quotient(pres, cfg.class_cap, cfg.order_cap_log2);
  out.capped = q.capped;
  if (!out.capped) out.q = std::move(q);
  return out;
}

}  // namespace

CensusResult run_census(const SearchConfig& cfg,
                        const std::function<void(std::uint64_t)>& progress) {
  CensusResult res;
  res.cfg = cfg;
  const unsigned workers = std::max(1u, cfg.workers);

  std::mutex mu;
  std::condition_variable cv_produced, cv_consumed;
  std::vector<std::deque<std::pair<std::uint64_t, SampleOutcome>>> queues(
      workers);
  constexpr std::size_t kQueueCap = 256;
  bool abort = false;

  auto worker_fn = [&](unsigned w) {
    for (std::uint64_t i = w; i < cfg.samples; i += workers) {
      SampleOutcome so = run_sample(cfg, i);
      std::unique_lock<std::mutex> lk(mu);
      cv_consumed.wait(lk, [&] {
        return abort || queues[w].size() < kQueueCap;
      });
      if (abort) return;
      queues[w].emplace_back(i, std::move(so));
      cv_produced.notify_all();
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker_fn, w);

  // dedup state: cheap pre-key -> record indices, most recent match first
  std::unordered_map<std::string, std::vector<std::size_t>> buckets;
  GenealogyLimits lim;
  lim.aut_order_log2 = cfg.order_cap_log2;

  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    SampleOutcome so;
    {
      std::unique_lock<std::mutex> lk(mu);
      auto& q = queues[i % workers];
      cv_produced.wait(lk, [&] { return !q.empty(); });
      so = std::move(q.front().second);
      q.pop_front();
      cv_consumed.notify_all();
    }
    if (progress && (i + 1) % 10000 == 0) progress(i + 1);
    if (so.capped) {
      ++res.capped_samples;
      if (res.capped_exemplars.size() < 64)
        res.capped_exemplars.push_back(so.us);
      continue;
    }
    ++res.finite_samples;
    const PcPresentation& g = so.q.group;
    std::ostringstream pk;
    {
      pk << g.order_log2() << '/' << g.two_class() << '/'
         << abelianization(g).str();
      if (g.ngens() >= 2 && g.rank() == 2) {
        std::vector<AbelianType> abs;
        for (const SubgroupBasis& m : maximal_subgroups(g))
          abs.push_back(abelianization(g, &m));
        std::sort(abs.begin(), abs.end());
        for (const AbelianType& a : abs) pk << '/' << a.str();
      }
    }
    std::vector<std::size_t>& bucket = buckets[pk.str()];
    bool matched = false;
    for (std::size_t at = 0; at < bucket.size(); ++at) {
      CensusRecord& r = res.records[bucket[at]];
      if (r.group.order_log2() == g.order_log2() &&
          iso_test(r.group, g, lim)) {
        ++r.hits;
        if (at != 0) std::swap(bucket[0], bucket[at]);  // move to front
        matched = true;
        break;
      }
    }
    if (matched) continue;
    CensusRecord rec;
    rec.us = so.us;
    rec.group = g;
    rec.fp = fingerprint(g);
    FpPresentation pres = FpPresentation::from_pairs(rec.us);
    Automorphism sigma = induce_sigma(so.q, pres);
    CoverResult cr = two_cover(g);
    rec.nuclear_rank = cr.nuclear_rank();
    {
      std::vector<std::uint32_t> mat =
          multiplicator_action(cr, extend_to_cover(cr, g, sigma));
      const unsigned m = cr.mult_dim();
      std::vector<std::uint32_t> rows;
      for (unsigned k = 0; k < m; ++k) {
        std::uint32_t r = mat[k] ^ (std::uint32_t(1) << k);
        for (std::uint32_t b : rows)
          if (r & (b & (~b + 1))) r ^= b;
        if (r) rows.push_back(r);
      }
      rec.verdict.fixed_dim = m - unsigned(rows.size());
      rec.verdict.relation_rank = m;
      rec.verdict.special = rec.verdict.fixed_dim == 0;
      rec.verdict.two_special =
          rec.verdict.special && rec.verdict.relation_rank <= 4;
    }
    rec.first_seen = i;
    rec.hits = 1;
    bucket.insert(bucket.begin(), res.records.size());
    res.records.push_back(std::move(rec));
  }
  for (std::thread& t : threads) t.join();
  return res;
}

}  // namespace towerlab
