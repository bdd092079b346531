// Builds data/catalog.txt: the named-group catalog derived from the valid
// descendant tree, with identifications pinned by order, IPAD, tree position,
// and special/select structure.
#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>

#include "towerlab/towers.hpp"

using namespace towerlab;

namespace {

struct Node {
  PcPresentation g;
  Ipad ip;
  int parent = -1;
  std::vector<int> children;
  bool expanded = false;
  bool has_special = false;
  SpecialVerdict sv;
};

std::deque<Node> nodes;
std::map<std::string, int> names;  // key -> node index

int add_node(PcPresentation g, int parent) {
  Node n;
  n.g = std::move(g);
  n.ip = ipad_of(n.g);
  n.parent = parent;
  nodes.push_back(std::move(n));
  return int(nodes.size()) - 1;
}

void fail(const std::string& msg) {
  std::fprintf(stderr, "gen_catalog: %s\n", msg.c_str());
  std::exit(1);
}

void name_node(const std::string& key, int idx) {
  if (names.count(key)) fail("duplicate name " + key);
  names[key] = idx;
}

int unique_child(int parent, const std::string& ipad_str, unsigned order_log2,
                 const std::string& what) {
  int found = -1;
  for (int c : nodes[parent].children) {
    if (nodes[c].g.order_log2() != order_log2) continue;
    if (nodes[c].ip.str() != ipad_str) continue;
    if (found >= 0) fail("ambiguous identification for " + what);
    found = c;
  }
  if (found < 0) fail("no match for " + what);
  return found;
}

void expand(int i) {
  if (nodes[i].expanded) return;
  Descendants d = immediate_descendants(nodes[i].g, true);
  for (PcPresentation& c : d.children)
    nodes[i].children.push_back(add_node(std::move(c), i));
  nodes[i].expanded = true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "data/catalog.txt";

  int root = add_node(two_quotient(FpPresentation::plain({}), 1).group, -1);
  // all valid groups of order <= 512 arise below parents of order <= 256
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].g.order_log2() > 8) continue;
    expand(int(i));
    std::fprintf(stderr, "expanded node %zu (2^%u): %zu children, %zu total\n",
                 i, nodes[i].g.order_log2(), nodes[i].children.size(),
                 nodes.size());
  }

  // special census over valid groups of order <= 512
  std::vector<int> specials;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].g.order_log2() > 9) continue;
    nodes[i].sv = is_special(nodes[i].g);
    nodes[i].has_special = true;
    if (nodes[i].sv.special) specials.push_back(int(i));
  }
  std::fprintf(stderr, "specials of order <= 512: %zu\n", specials.size());
  if (specials.size() != 6) fail("expected exactly 6 special groups");

  // fixed names
  name_node("4.2", root);
  for (int c : nodes[root].children) {
    switch (nodes[c].g.order_log2()) {
      case 3: name_node("8.4", c); break;
      case 4: name_node("16.2", c); break;
      case 5: name_node("32.2", c); break;
      default: fail("unexpected child of the root");
    }
  }
  if (nodes[names["32.2"]].ip.str() != "[[4,4];[2,2,4];[2,2,2]]")
    fail("32.2 should be the free class-2 quotient");
  {
    const std::vector<int>& c16 = nodes[names["16.2"]].children;
    if (c16.size() != 1) fail("16.2 should have one valid child");
    name_node("64.2", c16[0]);
    const std::vector<int>& c64 = nodes[names["64.2"]].children;
    if (c64.size() != 1) fail("64.2 should have one valid child");
    name_node("256.39", c64[0]);
  }
  int q2f = names["32.2"];
  if (nodes[q2f].children.size() != 11) fail("32.2 should have 11 valid children");
  std::vector<int> pair_128_40_41;
  for (int c : nodes[q2f].children) {
    unsigned o = nodes[c].g.order_log2();
    std::string ip = nodes[c].ip.str();
    if (o == 6) name_node("64.19", c);
    else if (o == 7 && ip == "[[8,8];[2,4,8];[2,4,4]]") name_node("128.5", c);
    else if (o == 7 && ip == "[[4,4];[2,2,4];[2,2,2,2,2]]") name_node("128.36", c);
    else if (o == 7 && ip == "[[4,4];[2,2,4];[2,4,4]]") pair_128_40_41.push_back(c);
    else if (o == 8 && ip == "[[8,8];[2,4,8];[4,4,4]]") name_node("256.2", c);
    else if (o == 8 && ip == "[[4,4];[2,2,8];[2,2,2,2,4]]") name_node("256.35", c);
    else if (o == 8 && ip == "[[4,4];[2,4,4];[4,4,4]]") name_node("256.36", c);
    else if (o == 8 && ip == "[[4,4];[2,2,8];[4,4,4]]") name_node("256.38", c);
    else if (o == 9) name_node("512.3", c);
    else if (o == 10) name_node("Q3F", c);
    else fail("unidentified child of 32.2: 2^" + std::to_string(o) + " " + ip);
  }
  if (pair_128_40_41.size() != 2) fail("expected two order-128 twins");

  // the two childless children of 128.5 sharing an IPAD
  {
    std::vector<int> twins;
    for (int c : nodes[names["128.5"]].children)
      if (nodes[c].ip.str() == "[[8,8];[2,4,8];[2,8,8]]") twins.push_back(c);
    if (twins.size() != 2) fail("expected the 512.104/512.106 pair");
    std::sort(twins.begin(), twins.end(), [](int a, int b) {
      return nodes[a].g.serialize() < nodes[b].g.serialize();
    });
    name_node("512.104", twins[0]);
    name_node("512.106", twins[1]);
  }

  // the six specials: 8.4, 64.19, 256.36 plus three of order 512
  for (int s : specials) {
    unsigned o = nodes[s].g.order_log2();
    if (o == 3 || o == 6 || (o == 8 && names.count("256.36") &&
                             names["256.36"] == s))
      continue;
    if (o != 9 && o != 3 && o != 6 && o != 8) fail("unexpected special order");
    if (o == 9) {
      if (!nodes[s].sv.two_special) {
        name_node("512.844", s);  // relation rank 6
        if (nodes[s].sv.relation_rank != 6) fail("512.844 should have rank 6");
      } else if (nodes[s].ip.str() == "[[4,4];[2,2,8];[4,4,8]]") {
        name_node("512.858", s);
      } else if (nodes[s].ip.str() == "[[8,8];[2,4,8];[4,4,4]]") {
        name_node("512.451", s);
        if (nodes[s].parent != names["256.2"]) fail("512.451 parent");
      } else {
        fail("unidentified order-512 special");
      }
    }
  }
  for (const char* k : {"512.844", "512.858", "512.451"})
    if (!names.count(k)) fail(std::string("missing special ") + k);

  // N-labels
  std::map<std::string, std::string> alias;  // alias -> key
  alias["N.1"] = "8.4";
  alias["N.2"] = "64.19";
  alias["N.3"] = "256.36";
  alias["N.4"] = "512.858";
  alias["N.5"] = "512.451";
  {
    std::vector<int> kids = nodes[names["256.36"]].children;
    if (kids.size() != 2) fail("256.36 should have two valid children");
    std::sort(kids.begin(), kids.end(), [](int a, int b) {
      return nodes[a].g.serialize() < nodes[b].g.serialize();
    });
    name_node("N.6", kids[0]);
    name_node("N.7", kids[1]);
    for (int k : kids) {
      if (nodes[k].g.order_log2() != 10) fail("N.6/N.7 should have order 2^10");
      nodes[k].sv = is_special(nodes[k].g);
      nodes[k].has_special = true;
      if (!nodes[k].sv.two_special) fail("N.6/N.7 should be 2-special");
    }
  }
  {
    expand(names["512.844"]);
    std::vector<int> kids = nodes[names["512.844"]].children;
    if (kids.size() != 3) fail("512.844 should have three valid children");
    int n8 = -1;
    for (int k : kids) {
      nodes[k].sv = is_special(nodes[k].g);
      nodes[k].has_special = true;
      if (nodes[k].sv.two_special) {
        if (n8 >= 0) fail("ambiguous N.8");
        n8 = k;
      }
    }
    if (n8 < 0) fail("no 2-special child of 512.844");
    if (nodes[n8].g.order_log2() != 11 || nodes[n8].g.two_class() != 5)
      fail("N.8 should have order 2^11 and class 5");
    name_node("N.8", n8);
  }
  auto pick_two_special_child = [&](const char* parent_key, const char* nk) {
    int found = -1;
    for (int k : nodes[names[parent_key]].children) {
      if (nodes[k].g.order_log2() != 11) continue;
      if (!nodes[k].has_special) {
        nodes[k].sv = is_special(nodes[k].g);
        nodes[k].has_special = true;
      }
      if (nodes[k].sv.two_special) {
        if (found >= 0) fail(std::string("ambiguous ") + nk);
        found = k;
      }
    }
    if (found < 0) fail(std::string("no match for ") + nk);
    if (nodes[found].g.two_class() != 4) fail(std::string(nk) + " class");
    name_node(nk, found);
  };
  pick_two_special_child("256.38", "N.9");
  pick_two_special_child("256.2", "N.10");

  // viable quotients of N.1 .. N.10: the 2-select groups
  std::vector<PcPresentation> selects;  // distinct, order <= 512
  for (int k = 1; k <= 10; ++k) {
    std::string nk = "N." + std::to_string(k);
    int idx = alias.count(nk) ? names[alias[nk]] : names[nk];
    ValidityResult v = is_valid(nodes[idx].g);
    if (!v.valid) fail(nk + " not valid?");
    for (const ViableQuotient& q :
         viable_quotients(nodes[idx].g, *v.witness)) {
      if (q.quotient.order_log2() > 9) continue;
      if (q.quotient.ngens() == 0 || q.quotient.rank() != 2) continue;
      bool dup = false;
      for (const PcPresentation& s : selects)
        if (s.order_log2() == q.quotient.order_log2() &&
            iso_test(s, q.quotient)) {
          dup = true;
          break;
        }
      if (!dup) selects.push_back(q.quotient);
    }
  }
  std::fprintf(stderr, "2-select groups of order <= 512: %zu\n",
               selects.size());
  if (selects.size() != 14) fail("expected 14 two-select groups");

  // match selects against named nodes; leftovers are 256.305/306 and the
  // twin that becomes 128.40
  std::vector<int> matched_nodes;
  std::vector<PcPresentation> unnamed_256;
  for (const PcPresentation& s : selects) {
    int hit = -1;
    for (const auto& [key, idx] : names)
      if (nodes[idx].g.order_log2() == s.order_log2() &&
          iso_test(nodes[idx].g, s)) {
        hit = idx;
        break;
      }
    if (hit >= 0) {
      matched_nodes.push_back(hit);
      continue;
    }
    if (s.order_log2() == 7) {
      // exactly one of the order-128 twins is select: that is 128.40
      int which = -1;
      for (int t : pair_128_40_41)
        if (iso_test(nodes[t].g, s)) which = t;
      if (which < 0) fail("order-128 select not among the twins");
      name_node("128.40", which);
      name_node("128.41", which == pair_128_40_41[0] ? pair_128_40_41[1]
                                                     : pair_128_40_41[0]);
    } else if (s.order_log2() == 8) {
      unnamed_256.push_back(s);
    } else {
      fail("unexpected unnamed select of order 2^" +
           std::to_string(s.order_log2()));
    }
  }
  if (!names.count("128.40")) fail("128.40 not identified via selects");
  if (unnamed_256.size() != 2) fail("expected two order-256 selects beyond the tree names");
  {
    // locate them among the valid tree nodes for canonical storage
    std::vector<int> found;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].g.order_log2() != 8) continue;
      for (const PcPresentation& s : unnamed_256)
        if (iso_test(nodes[i].g, s)) found.push_back(int(i));
    }
    if (found.size() != 2) fail("could not locate 256.305/306 in the tree");
    std::sort(found.begin(), found.end(), [](int a, int b) {
      return nodes[a].g.serialize() < nodes[b].g.serialize();
    });
    name_node("256.305", found[0]);
    name_node("256.306", found[1]);
  }

  // emit
  NamedGroupCatalog cat;
  std::map<std::string, std::vector<std::string>> aliases_of;
  for (const auto& [a, key] : alias) aliases_of[key].push_back(a);
  aliases_of["32.2"].push_back("Q2F");
  for (const auto& [key, idx] : names) {
    if (key.rfind("N.", 0) == 0 && alias.count(key)) continue;
    CatalogEntry e;
    e.key = key;
    if (aliases_of.count(key)) e.aliases = aliases_of[key];
    e.order_log2 = nodes[idx].g.order_log2();
    e.two_class = nodes[idx].g.two_class();
    e.ipad = nodes[idx].ip;
    e.valid = true;
    if (!nodes[idx].has_special && e.order_log2 <= 11) {
      nodes[idx].sv = is_special(nodes[idx].g);
      nodes[idx].has_special = true;
    }
    e.special = nodes[idx].sv.special;
    e.two_special = nodes[idx].sv.two_special;
    int p = nodes[idx].parent;
    std::string ppart = "root";
    for (const auto& [k2, i2] : names)
      if (i2 == p) ppart = k2;
    e.provenance =
        "derived from the valid descendant tree; child of " + ppart +
        "; identified by order, IPAD and special/select structure";
    e.group = nodes[idx].g;
    cat.add(std::move(e));
  }
  std::ofstream out(out_path);
  out << cat.serialize();
  out.close();
  std::fprintf(stderr, "wrote %zu entries to %s\n", cat.entries().size(),
               out_path.c_str());

  // verification pass
  NamedGroupCatalog check = NamedGroupCatalog::load(out_path);
  std::fprintf(stderr, "reload OK (%zu entries)\n", check.entries().size());
  return 0;
}
