#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towerlab/genealogy.hpp"

using namespace towerlab;

namespace {

PcPresentation quotient_of(const std::vector<const char*>& relators,
                           unsigned cap) {
  std::vector<FreeWord> rs;
  for (const char* r : relators) rs.push_back(FreeWord::parse(r));
  QuotientResult q = two_quotient(FpPresentation::plain(rs), cap);
  REQUIRE_FALSE(q.capped);
  return q.group;
}

PcPresentation klein() { return two_quotient(FpPresentation::plain({}), 1).group; }
PcPresentation q2f() { return two_quotient(FpPresentation::plain({}), 2).group; }
PcPresentation q8() { return quotient_of({"x^2(x,y)", "y^2(x,y)"}, 4); }
PcPresentation d8() { return quotient_of({"x^2", "y^2", "(x,y)^2"}, 5); }
PcPresentation c4xc4() { return quotient_of({"(x,y)", "x^4", "y^4"}, 4); }
PcPresentation c2xc4() { return quotient_of({"(x,y)", "x^2", "y^4"}, 4); }

}  // namespace

TEST_CASE("Aut([2,2]) has order 6, Aut(Q8) has order 24") {
  AutomorphismSet a = automorphisms(klein(), AutMode::kFull);
  CHECK(a.order == 6);
  CHECK(a.witness.has_value());
  AutomorphismSet b = automorphisms(q8(), AutMode::kFull);
  CHECK(b.order == 24);
}

TEST_CASE("validity of the small groups") {
  CHECK(is_valid(klein()).valid);
  CHECK(is_valid(q8()).valid);
  CHECK(is_valid(c4xc4()).valid);
  CHECK(is_valid(q2f()).valid);
  CHECK_FALSE(is_valid(d8()).valid);   // no order-3 automorphism
  CHECK_FALSE(is_valid(c2xc4()).valid);  // [2,4]
}

TEST_CASE("fingerprints separate and are isomorphism invariants") {
  Fingerprint fq8 = fingerprint(q8());
  CHECK(fq8.order_log2 == 3);
  CHECK(fq8.two_class == 2);
  CHECK(fq8.ipad.str() == "[[2,2];[4];[2]]");
  Fingerprint fk = fingerprint(klein());
  CHECK(fk.ipad.str() == "[[2,2];[2];[]]");
  CHECK_FALSE(fq8 == fingerprint(d8()));
}

TEST_CASE("iso_test distinguishes Q8 from D8 and accepts isomorphic copies") {
  CHECK(iso_test(q8(), q8()));
  CHECK_FALSE(iso_test(q8(), d8()));
  // another presentation of Q8
  PcPresentation q8b = quotient_of({"y^2(y,x)", "x^2(y,x)"}, 4);
  CHECK(iso_test(q8(), q8b));
  CHECK(iso_test(q8b, q8()));
}

TEST_CASE("nuclear ranks") {
  CHECK(nuclear_rank(q8()) == 0);     // Q8 has no children
  CHECK(nuclear_rank(klein()) == 3);  // largest child has order 32
}

TEST_CASE("children of [2,2]: 7 in all, 3 valid") {
  Descendants all = immediate_descendants(klein(), false);
  CHECK(all.children.size() == 7);
  Descendants valid = immediate_descendants(klein(), true);
  REQUIRE(valid.children.size() == 3);
  // the valid children are Q8, [4,4], Q2(F)
  bool saw_q8 = false, saw_44 = false, saw_q2f = false;
  for (const PcPresentation& c : valid.children) {
    if (c.order_log2() == 3 && iso_test(c, q8())) saw_q8 = true;
    if (c.order_log2() == 4 && iso_test(c, c4xc4())) saw_44 = true;
    if (c.order_log2() == 5 && iso_test(c, q2f())) saw_q2f = true;
    CHECK(is_valid(c).valid);
  }
  CHECK(saw_q8);
  CHECK(saw_44);
  CHECK(saw_q2f);
  // every child has the parent as its class-1 quotient
  for (const PcPresentation& c : all.children) {
    CHECK(c.two_class() == 2);
    CHECK(abelianization(c).rank() == 2);
  }
}

TEST_CASE("children of [4,4]: the only valid child is [8,8]") {
  Descendants valid = immediate_descendants(c4xc4(), true);
  REQUIRE(valid.children.size() == 1);
  PcPresentation c88 = quotient_of({"(x,y)", "x^8", "y^8"}, 4);
  CHECK(iso_test(valid.children[0], c88));
}

TEST_CASE("children of [8,8]: 4 in all, 1 valid") {
  PcPresentation c88 = quotient_of({"(x,y)", "x^8", "y^8"}, 4);
  Descendants all = immediate_descendants(c88, false);
  CHECK(all.children.size() == 4);
  Descendants valid = immediate_descendants(c88, true);
  REQUIRE(valid.children.size() == 1);
  PcPresentation c1616 = quotient_of({"(x,y)", "x^16", "y^16"}, 5);
  CHECK(iso_test(valid.children[0], c1616));
}

TEST_CASE("children of Q2(F): 93 in all, 11 valid") {
  Descendants all = immediate_descendants(q2f(), false);
  CHECK(all.children.size() == 93);
  Descendants valid = immediate_descendants(q2f(), true);
  CHECK(valid.children.size() == 11);
  for (const PcPresentation& c : valid.children) CHECK(is_valid(c).valid);
  // IPAD monotonicity along the edges
  Ipad parent = ipad_of(q2f());
  for (const PcPresentation& c : valid.children) {
    Ipad ci = ipad_of(c);
    CHECK(abelian_is_quotient(ci.g_ab, parent.g_ab));
    CHECK(abelian_is_quotient(ci.m_ab, parent.m_ab));
    CHECK(abelian_is_quotient(ci.phi_ab, parent.phi_ab));
  }
}

TEST_CASE("iso_test is an equivalence on a small sample") {
  std::vector<PcPresentation> groups = {q8(), d8(), c4xc4(), c2xc4()};
  for (const auto& a : groups) CHECK(iso_test(a, a));
  for (const auto& a : groups)
    for (const auto& b : groups) CHECK(iso_test(a, b) == iso_test(b, a));
}
