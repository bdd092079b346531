#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towerlab/pquotient.hpp"

using namespace towerlab;

namespace {

FpPresentation free_presentation() { return FpPresentation::plain({}); }

FpPresentation abelian_4_4() {
  return FpPresentation::plain({FreeWord::parse("(x,y)"), FreeWord::parse("x^4"),
                                FreeWord::parse("y^4")});
}

FpPresentation section8_presentation() {
  return FpPresentation::from_pairs(
      {FreeWord::parse("(Y,X)^2"), FreeWord::parse("(yXYX)^2")});
}

FpPresentation abelian_2n(unsigned n) {
  return FpPresentation::plain({FreeWord::parse("(x,y)"),
                                FreeWord::generator(0).pow(1ll << n),
                                FreeWord::generator(1).pow(1ll << n)});
}

}  // namespace

TEST_CASE("free 2-quotients have orders 4, 32, 1024") {
  QuotientResult q1 = two_quotient(free_presentation(), 1);
  CHECK(q1.group.order_log2() == 2);
  CHECK(q1.class_reached == 1);
  CHECK(q1.capped);
  QuotientResult q2 = two_quotient(free_presentation(), 2);
  CHECK(q2.group.order_log2() == 5);
  QuotientResult q3 = two_quotient(free_presentation(), 3);
  CHECK(q3.group.order_log2() == 10);
  CHECK(q3.log2_orders == std::vector<unsigned>{2, 5, 10});
  q3.group.verify_consistency();
}

TEST_CASE("abelian target stabilizes") {
  QuotientResult q = two_quotient(abelian_4_4(), 6);
  CHECK_FALSE(q.capped);
  CHECK(q.class_reached == 2);
  CHECK(q.group.order_log2() == 4);
  CHECK(abelianization(q.group) == AbelianType::parse("[4,4]"));
  q.group.verify_consistency();
}

TEST_CASE("[2^n,2^n] quotients for n = 1..4") {
  for (unsigned n = 1; n <= 4; ++n) {
    QuotientResult q = two_quotient(abelian_2n(n), n + 1);
    CHECK_FALSE(q.capped);
    CHECK(q.class_reached == n);
    CHECK(q.group.order_log2() == 2 * n);
    AbelianType expect;
    expect.exps = {std::uint8_t(n), std::uint8_t(n)};
    CHECK(abelianization(q.group) == expect);
  }
}

TEST_CASE("section 8 growth sequence prefix") {
  FpPresentation fp = section8_presentation();
  QuotientResult q = two_quotient(fp, 8);
  CHECK(q.capped);
  CHECK(q.log2_orders == std::vector<unsigned>{2, 5, 8, 11, 14, 16, 20, 24});
  q.group.verify_consistency();
}

TEST_CASE("order cap routes growing presentations out") {
  QuotientResult q = two_quotient(free_presentation(), 10, 6);
  CHECK(q.capped);
  CHECK(q.group.order_log2() == 10);  // first order beyond the cap
}

TEST_CASE("quotient compatibility across caps") {
  FpPresentation fp = section8_presentation();
  QuotientResult q4 = two_quotient(fp, 4);
  QuotientResult q6 = two_quotient(fp, 6);
  REQUIRE(q6.log2_orders.size() == 6);
  for (unsigned c = 0; c < 4; ++c)
    CHECK(q4.log2_orders[c] == q6.log2_orders[c]);
}

TEST_CASE("cover of [2,2] is the free class-2 quotient") {
  QuotientResult v = two_quotient(free_presentation(), 1);
  CoverResult cr = two_cover(v.group);
  CHECK(cr.cover.order_log2() == 5);
  CHECK(cr.mult_dim() == 3);
  CHECK(cr.nuclear_rank() == 3);
  cr.cover.verify_consistency();
  QuotientResult q2 = two_quotient(free_presentation(), 2);
  CHECK(cr.cover.identical(q2.group));
}

TEST_CASE("relation rank of [2,2] is 3") {
  QuotientResult v = two_quotient(free_presentation(), 1);
  CHECK(relation_rank(v.group) == 3);
}

TEST_CASE("cover of the free class-2 group is the free class-3 group") {
  QuotientResult q2 = two_quotient(free_presentation(), 2);
  CoverResult cr = two_cover(q2.group);
  CHECK(cr.cover.order_log2() == 10);
  CHECK(cr.mult_dim() == 5);
  QuotientResult q3 = two_quotient(free_presentation(), 3);
  CHECK(cr.cover.identical(q3.group));
}

TEST_CASE("cover of [2^n,2^n] matches the paper presentation G*") {
  for (unsigned n = 1; n <= 3; ++n) {
    QuotientResult q = two_quotient(abelian_2n(n), n + 1);
    CoverResult cr = two_cover(q.group);
    CHECK(cr.cover.order_log2() == 2 * n + 3);
    // G* = <x,y | x^{2^{n+1}}, y^{2^{n+1}}, (x,y)^2, (x,(x,y)), (y,(x,y))>
    std::int64_t e = 1ll << (n + 1);
    FpPresentation gstar = FpPresentation::plain(
        {FreeWord::generator(0).pow(e), FreeWord::generator(1).pow(e),
         FreeWord::parse("(x,y)^2"), FreeWord::parse("(x,(x,y))"),
         FreeWord::parse("(y,(x,y))")});
    QuotientResult qs = two_quotient(gstar, n + 2);
    CHECK_FALSE(qs.capped);
    CHECK(qs.group.order_log2() == 2 * n + 3);
    CHECK(qs.group.two_class() == cr.cover.two_class());
    CHECK(abelianization(qs.group) == abelianization(cr.cover));
  }
}

TEST_CASE("canonicalize is idempotent on engine output") {
  QuotientResult q2 = two_quotient(free_presentation(), 2);
  CanonicalForm cf = canonicalize(q2.group, q2.group.gen(0), q2.group.gen(1));
  CHECK(cf.group.identical(q2.group));
  for (unsigned i = 0; i < cf.group.ngens(); ++i)
    CHECK(mask_eq(cf.lift[i], q2.group.gen(i), q2.group.nwords()));
}

TEST_CASE("canonicalize a transversal quotient") {
  // Q8 / center = [2,2]
  QuotientResult q2 = two_quotient(free_presentation(), 2);
  // build Q8 from its presentation to get a canonical group, then quotient
  FpPresentation q8p = FpPresentation::plain(
      {FreeWord::parse("x^2(x,y)"), FreeWord::parse("y^2(x,y)")});
  QuotientResult q8 = two_quotient(q8p, 4);
  CHECK_FALSE(q8.capped);
  CHECK(q8.group.order_log2() == 3);
  SubgroupBasis z = normal_sigma_closure(q8.group, q8.group.gen(2));
  QuotientMap qm = quotient_by_normal(q8.group, z);
  CanonicalForm cf = canonicalize(
      qm.q, qm.project(q8.group, z, q8.group.gen(0)),
      qm.project(q8.group, z, q8.group.gen(1)));
  CHECK(cf.group.ngens() == 2);
  CHECK(cf.group.two_class() == 1);
  // pull maps lifts back to canonical generators
  for (unsigned i = 0; i < 2; ++i)
    CHECK(mask_eq(cf.pull(qm.q, cf.lift[i]), cf.group.gen(i), 1));
}

TEST_CASE("induce_sigma on free quotients") {
  FpPresentation fp = free_presentation();
  QuotientResult q1 = two_quotient(fp, 1);
  Automorphism s1 = induce_sigma(q1, fp);
  CHECK(is_order3(q1.group, s1));
  // the 3-cycle on the nontrivial elements of [2,2]
  Elt x = q1.group.gen(0), y = q1.group.gen(1);
  CHECK(mask_eq(s1.apply(q1.group, x), y, 1));
  QuotientResult q2 = two_quotient(fp, 2);
  Automorphism s2 = induce_sigma(q2, fp);
  CHECK(is_order3(q2.group, s2));
  FpPresentation s8 = section8_presentation();
  QuotientResult qq = two_quotient(s8, 5);
  Automorphism tau = induce_sigma(qq, s8);
  CHECK(is_order3(qq.group, tau));
}

TEST_CASE("cover of Q8 has trivial nucleus") {
  FpPresentation q8p = FpPresentation::plain(
      {FreeWord::parse("x^2(x,y)"), FreeWord::parse("y^2(x,y)")});
  QuotientResult q8 = two_quotient(q8p, 4);
  CoverResult cr = two_cover(q8.group);
  CHECK(cr.nuclear_rank() == 0);
  CHECK(cr.mult_dim() == 2);
}

TEST_CASE("extend_to_cover and multiplicator action") {
  FpPresentation fp = free_presentation();
  QuotientResult q1 = two_quotient(fp, 1);
  Automorphism s1 = induce_sigma(q1, fp);
  CoverResult cr = two_cover(q1.group);
  Automorphism lifted = extend_to_cover(cr, q1.group, s1);
  std::vector<std::uint32_t> mat = multiplicator_action(cr, lifted);
  REQUIRE(mat.size() == 3);
  // sigma acts with order 3 on the multiplicator
  auto mat_mul = [&](const std::vector<std::uint32_t>& a,
                     const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> c(a.size(), 0);
    for (unsigned i = 0; i < a.size(); ++i)
      for (unsigned k = 0; k < a.size(); ++k)
        if ((a[i] >> k) & 1) c[i] ^= b[k];
    return c;
  };
  std::vector<std::uint32_t> m3 = mat_mul(mat, mat_mul(mat, mat));
  for (unsigned i = 0; i < 3; ++i) CHECK(m3[i] == (1u << i));
}
