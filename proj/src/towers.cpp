#include "towerlab/towers.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace towerlab {

Ipad ipad(const PcPresentation& g) { return ipad_of(g); }

Ipad parse_ipad(const std::string& text) {
  // [[..];[..];[..]] with optional outer brackets and whitespace
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.size() >= 2 && t.front() == '[' && t[1] == '[')
    t = t.substr(1, t.size() - 2);
  std::vector<std::string> parts;
  std::size_t at = 0;
  for (int k = 0; k < 3; ++k) {
    if (at >= t.size() || t[at] != '[')
      throw ParseError("ipad: expected '[' in " + text);
    std::size_t end = t.find(']', at);
    if (end == std::string::npos) throw ParseError("ipad: missing ']'");
    parts.push_back(t.substr(at, end - at + 1));
    at = end + 1;
    if (k < 2) {
      if (at >= t.size() || t[at] != ';')
        throw ParseError("ipad: expected ';' in " + text);
      ++at;
    }
  }
  if (at != t.size()) throw ParseError("ipad: trailing input in " + text);
  Ipad p;
  p.g_ab = AbelianType::parse(parts[0]);
  p.m_ab = AbelianType::parse(parts[1]);
  p.phi_ab = AbelianType::parse(parts[2]);
  return p;
}

namespace {

// IPAD component pattern: exact type, or a count of entries with a floor
struct TypePat {
  const char* exact = nullptr;  // e.g. "[2,2,4]"
  int count = 0;                // used when exact == nullptr
  unsigned min_exp = 1;         // factor >= 2^min_exp

  bool match(const AbelianType& t) const {
    if (exact) return t == AbelianType::parse(exact);
    if (int(t.rank()) != count) return false;
    for (auto e : t.exps)
      if (e < min_exp) return false;
    return true;
  }
};

struct Q3Rule {
  TypePat g, m, phi;
  const char* label;
};

// Lemma 7.4: * stands for an integer >= 8, - for an integer >= 2.
const Q3Rule kNarrowRules[] = {
    {{"[2,2]"}, {"[4]"}, {"[2]"}, "8.4"},
    {{"[4,4]"}, {"[2,2,4]"}, {"[2,2,4]"}, "64.19"},
    {{nullptr, 2, 3}, {nullptr, 3, 1}, {nullptr, 3, 1}, "256.2"},
    {{"[4,4]"}, {"[2,2,8]"}, {"[2,2,2,2,4]"}, "256.35"},
    {{"[4,4]"}, {"[2,4,4]"}, {"[4,4,4]"}, "256.36"},
    {{"[4,4]"}, {nullptr, 3, 1}, {nullptr, 3, 1}, "256.38"},
    {{nullptr, 2, 3}, {nullptr, 3, 1}, {nullptr, 5, 1}, "Q3F"},
};

// Lemma 7.5.
const Q3Rule kWideRules[] = {
    {{"[2,2]"}, {"[2]"}, {"[]"}, "4.2"},
    {{"[2,2]"}, {"[4]"}, {"[2]"}, "8.4"},
    {{"[4,4]"}, {"[2,2,4]"}, {"[2,2,2]"}, "32.2"},
    {{"[4,4]"}, {"[2,2,4]"}, {"[2,2,4]"}, "64.19"},
    {{"[4,4]"}, {"[2,2,4]"}, {"[2,2,2,2,2]"}, "128.36"},
    {{"[4,4]"}, {"[2,2,4]"}, {"[2,4,4]"}, "128.40"},
    {{nullptr, 2, 3}, {nullptr, 3, 1}, {nullptr, 3, 1}, "256.2"},
    {{"[4,4]"}, {"[2,2,8]"}, {"[2,2,2,2,4]"}, "256.35"},
    {{"[4,4]"}, {"[2,4,4]"}, {"[4,4,4]"}, "256.36"},
    {{"[4,4]"}, {nullptr, 3, 1}, {nullptr, 3, 1}, "256.38"},
    {{nullptr, 2, 3}, {nullptr, 3, 1}, {nullptr, 5, 1}, "Q3F"},
};

}  // namespace

std::string classify_q3(const Ipad& i, Q3Side side) {
  const Q3Rule* rules = side == Q3Side::kNarrow ? kNarrowRules : kWideRules;
  const std::size_t n =
      side == Q3Side::kNarrow ? std::size(kNarrowRules) : std::size(kWideRules);
  for (std::size_t k = 0; k < n; ++k)
    if (rules[k].g.match(i.g_ab) && rules[k].m.match(i.m_ab) &&
        rules[k].phi.match(i.phi_ab))
      return rules[k].label;
  return "unclassified";
}

SpecialVerdict is_special(const PcPresentation& g, const GenealogyLimits& lim) {
  ValidityResult v = is_valid(g, lim);
  if (!v.valid) throw Error("is_special: input group is not valid");
  CoverResult cr = two_cover(g);
  SpecialVerdict out;
  out.relation_rank = cr.mult_dim();
  std::vector<std::uint32_t> mat =
      multiplicator_action(cr, extend_to_cover(cr, g, *v.witness));
  // fixed space of sigma = kernel of (mat + identity)
  const unsigned m = cr.mult_dim();
  std::vector<std::uint32_t> rows;
  for (unsigned k = 0; k < m; ++k) {
    std::uint32_t r = mat[k] ^ (std::uint32_t(1) << k);
    for (std::uint32_t b : rows)
      if (r & (b & (~b + 1))) r ^= b;
    if (r) rows.push_back(r);
  }
  out.fixed_dim = m - unsigned(rows.size());
  out.special = out.fixed_dim == 0;
  out.two_special = out.special && out.relation_rank <= 4;
  std::ostringstream ev;
  ev << "fixed_dim=" << out.fixed_dim << " relation_rank=" << out.relation_rank;
  out.evidence = ev.str();
  return out;
}

std::vector<ViableQuotient> viable_quotients(const PcPresentation& g,
                                             const Automorphism& sigma,
                                             const GenealogyLimits& lim) {
  if (g.order_log2() > lim.aut_order_log2)
    throw BoundsError("viable_quotients: order exceeds the bound");
  if (g.ngens() > 24)
    throw BoundsError("viable_quotients: element enumeration too large");
  if (!extend_images_into(g, g, sigma.img[0], sigma.img[1]))
    throw Error("viable_quotients: sigma is not an automorphism");
  if (!is_order3(g, sigma))
    throw Error("viable_quotients: sigma is not of order 3");

  // involution conjugacy-class representatives, plus the identity
  const std::uint64_t size = std::uint64_t(1) << g.ngens();
  std::vector<bool> seen(size, false);
  std::vector<Elt> zreps{g.one()};
  for (std::uint64_t w = 1; w < size; ++w) {
    if (seen[w]) continue;
    Elt e{};
    e[0] = w;
    if (g.order_log2_of(e) != 1) continue;
    // sweep the conjugacy class
    std::vector<std::uint64_t> orbit{w};
    seen[w] = true;
    for (std::size_t at = 0; at < orbit.size(); ++at) {
      Elt cur{};
      cur[0] = orbit[at];
      for (unsigned k = 0; k < g.ngens(); ++k) {
        Elt c = g.conj(cur, g.gen(k));
        if (!seen[c[0]]) {
          seen[c[0]] = true;
          orbit.push_back(c[0]);
        }
      }
    }
    zreps.push_back(e);
  }

  std::vector<ViableQuotient> out;
  for (const Elt& z : zreps) {
    SubgroupBasis n = normal_sigma_closure(g, z, &sigma);
    QuotientMap qm = quotient_by_normal(g, n);
    CanonicalForm cf = canonicalize(qm.q, qm.project(g, n, g.gen(0)),
                                    qm.project(g, n, g.gen(1)));
    bool dup = false;
    for (const ViableQuotient& v : out)
      if (v.quotient.order_log2() == cf.group.order_log2() &&
          iso_test(v.quotient, cf.group, lim)) {
        dup = true;
        break;
      }
    if (dup) continue;
    ViableQuotient vq;
    vq.z = z;
    vq.kernel_order_log2 = n.order_log2();
    vq.kernel_elementary = true;
    for (const Elt& r : n.rows())
      if (g.order_log2_of(r) > 1) vq.kernel_elementary = false;
    vq.quotient = cf.group;
    out.push_back(std::move(vq));
  }
  return out;
}

void NamedGroupCatalog::add(CatalogEntry e) {
  if (index_.count(e.key)) throw Error("catalog: duplicate key " + e.key);
  index_[e.key] = entries_.size();
  for (const std::string& a : e.aliases) {
    if (index_.count(a)) throw Error("catalog: duplicate alias " + a);
    index_[a] = entries_.size();
  }
  entries_.push_back(std::move(e));
}

bool NamedGroupCatalog::has(const std::string& key) const {
  return index_.count(key) > 0;
}

const CatalogEntry& NamedGroupCatalog::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw Error("catalog: unknown group id " + key);
  return entries_[it->second];
}

std::string NamedGroupCatalog::serialize() const {
  std::ostringstream os;
  os << "catalog 1\n";
  for (const CatalogEntry& e : entries_) {
    os << "entry " << e.key << "\n";
    for (const std::string& a : e.aliases) os << "alias " << a << "\n";
    if (!e.provenance.empty()) os << "provenance " << e.provenance << "\n";
    os << "order " << e.order_log2 << "\n";
    os << "class " << e.two_class << "\n";
    os << "ipad " << e.ipad.str() << "\n";
    os << "flags" << (e.valid ? " valid" : "") << (e.special ? " special" : "")
       << (e.two_special ? " two_special" : "") << "\n";
    os << e.group.serialize();
    os << "end-entry\n";
  }
  return os.str();
}

NamedGroupCatalog NamedGroupCatalog::parse(const std::string& text,
                                           bool verify) {
  NamedGroupCatalog cat;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "catalog 1")
    throw ParseError("catalog: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("entry ", 0) != 0)
      throw ParseError("catalog: expected entry line, got " + line);
    CatalogEntry e;
    e.key = line.substr(6);
    std::string pcp_text;
    bool in_pcp = false;
    while (std::getline(is, line)) {
      if (line == "end-entry") break;
      if (in_pcp) {
        pcp_text += line + "\n";
        if (line == "end") in_pcp = false;
        continue;
      }
      if (line.rfind("alias ", 0) == 0)
        e.aliases.push_back(line.substr(6));
      else if (line.rfind("provenance ", 0) == 0)
        e.provenance = line.substr(11);
      else if (line.rfind("order ", 0) == 0)
        e.order_log2 = unsigned(std::stoul(line.substr(6)));
      else if (line.rfind("class ", 0) == 0)
        e.two_class = unsigned(std::stoul(line.substr(6)));
      else if (line.rfind("ipad ", 0) == 0)
        e.ipad = parse_ipad(line.substr(5));
      else if (line.rfind("flags", 0) == 0) {
        e.valid = line.find(" valid") != std::string::npos;
        e.special = line.find(" special") != std::string::npos;
        e.two_special = line.find(" two_special") != std::string::npos;
      } else if (line.rfind("pcp ", 0) == 0) {
        pcp_text = line + "\n";
        in_pcp = true;
      } else {
        throw ParseError("catalog: unknown entry line " + line);
      }
    }
    e.group = PcPresentation::deserialize(pcp_text);
    if (verify) {
      if (e.group.order_log2() != e.order_log2)
        throw Error("catalog: order mismatch for " + e.key);
      if (e.group.two_class() != e.two_class)
        throw Error("catalog: class mismatch for " + e.key);
      e.group.verify_consistency();
      if (e.valid && !(ipad_of(e.group) == e.ipad))
        throw Error("catalog: ipad mismatch for " + e.key);
    }
    cat.add(std::move(e));
  }
  return cat;
}

NamedGroupCatalog NamedGroupCatalog::load(const std::string& path,
                                          bool verify) {
  std::ifstream in(path);
  if (!in) throw IoError("catalog: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), verify);
}

SelectVerdict is_select(
    const PcPresentation& g,
    const std::vector<std::pair<std::string, const PcPresentation*>>& specials,
    const GenealogyLimits& lim) {
  SelectVerdict out;
  ValidityResult v = is_valid(g, lim);
  if (!v.valid) throw Error("is_select: input group is not valid");
  CoverResult cr = two_cover(g);
  std::vector<std::uint32_t> mat =
      multiplicator_action(cr, extend_to_cover(cr, g, *v.witness));
  const unsigned m = cr.mult_dim();
  std::vector<std::uint32_t> rows;
  for (unsigned k = 0; k < m; ++k) {
    std::uint32_t r = mat[k] ^ (std::uint32_t(1) << k);
    for (std::uint32_t b : rows)
      if (r & (b & (~b + 1))) r ^= b;
    if (r) rows.push_back(r);
  }
  unsigned fixed_dim = m - unsigned(rows.size());
  out.screen_pass = fixed_dim <= 1;
  if (!out.screen_pass) return out;
  for (const auto& [key, hp] : specials) {
    const PcPresentation& h = *hp;
    if (h.order_log2() < g.order_log2()) continue;
    if (h.order_log2() == g.order_log2()) {
      if (iso_test(g, h, lim)) {  // special groups are select with z = 1
        out.confirmed = true;
        out.witness = key;
        return out;
      }
      continue;
    }
    ValidityResult hv = is_valid(h, lim);
    if (!hv.valid) continue;
    for (const ViableQuotient& q : viable_quotients(h, *hv.witness, lim))
      if (q.quotient.order_log2() == g.order_log2() &&
          iso_test(q.quotient, g, lim)) {
        out.confirmed = true;
        out.witness = key;
        return out;
      }
  }
  return out;
}

}  // namespace towerlab
