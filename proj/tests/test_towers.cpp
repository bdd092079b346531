#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towerlab/towers.hpp"

using namespace towerlab;

namespace {

const NamedGroupCatalog& catalog() {
  static NamedGroupCatalog cat = NamedGroupCatalog::load(TOWERLAB_CATALOG_FILE);
  return cat;
}

}  // namespace

TEST_CASE("catalog loads and re-verifies") {
  const NamedGroupCatalog& cat = catalog();
  CHECK(cat.entries().size() >= 29);
  CHECK(cat.get("N.1").key == "8.4");
  CHECK(cat.get("N.3").key == "256.36");
  CHECK(cat.get("Q2F").key == "32.2");
  CHECK_THROWS_AS(cat.get("17.1"), Error);
  CHECK(cat.get("64.19").ipad.str() == "[[4,4];[2,2,4];[2,2,4]]");
}

TEST_CASE("ipad examples from the catalog") {
  CHECK(ipad(catalog().get("8.4").group).str() == "[[2,2];[4];[2]]");
  CHECK(ipad(catalog().get("64.19").group).str() == "[[4,4];[2,2,4];[2,2,4]]");
  CHECK(ipad(catalog().get("32.2").group).str() == "[[4,4];[2,2,4];[2,2,2]]");
}

TEST_CASE("ipad codec") {
  for (const char* s :
       {"[[4,4];[2,2,4];[2,2,4]]", "[[2,2];[2];[]]", "[[16,16];[8,16];[8,8]]"}) {
    Ipad p = parse_ipad(s);
    CHECK(p.str() == s);
  }
  CHECK(parse_ipad("[2,2]; [4]; [2]").str() == "[[2,2];[4];[2]]");
  CHECK_THROWS_AS(parse_ipad("[[3,3];[2];[2]]"), ParseError);
  CHECK_THROWS_AS(parse_ipad("[[4,2];[2];[2]]"), ParseError);
  CHECK_THROWS_AS(parse_ipad("[[4,4];[2]]"), ParseError);
}

TEST_CASE("classify_q3 narrow rules") {
  CHECK(classify_q3(parse_ipad("[[2,2];[4];[2]]"), Q3Side::kNarrow) == "8.4");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,4];[2,2,4]]"), Q3Side::kNarrow) ==
        "64.19");
  CHECK(classify_q3(parse_ipad("[[16,16];[2,8,16];[4,4,8]]"),
                    Q3Side::kNarrow) == "256.2");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,8];[2,2,2,2,4]]"),
                    Q3Side::kNarrow) == "256.35");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,4,4];[4,4,4]]"), Q3Side::kNarrow) ==
        "256.36");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,8];[4,4,8]]"), Q3Side::kNarrow) ==
        "256.38");
  CHECK(classify_q3(parse_ipad("[[8,8];[4,4,8];[2,2,4,4,8]]"),
                    Q3Side::kNarrow) == "Q3F");
  CHECK(classify_q3(parse_ipad("[[2,2];[2];[]]"), Q3Side::kNarrow) ==
        "unclassified");
}

TEST_CASE("classify_q3 wide rules") {
  CHECK(classify_q3(parse_ipad("[[2,2];[2];[]]"), Q3Side::kWide) == "4.2");
  CHECK(classify_q3(parse_ipad("[[2,2];[4];[2]]"), Q3Side::kWide) == "8.4");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,4];[2,2,2]]"), Q3Side::kWide) ==
        "32.2");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,4];[2,2,2,2,2]]"),
                    Q3Side::kWide) == "128.36");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,4];[2,4,4]]"), Q3Side::kWide) ==
        "128.40");
  CHECK(classify_q3(parse_ipad("[[8,8];[2,4,8];[4,4,4]]"), Q3Side::kWide) ==
        "256.2");
  CHECK(classify_q3(parse_ipad("[[8,8];[2,4,16];[4,8,8]]"), Q3Side::kWide) ==
        "256.2");
  CHECK(classify_q3(parse_ipad("[[4,4];[2,2,8];[4,4,4]]"), Q3Side::kWide) ==
        "256.38");
}

TEST_CASE("classification agrees with computed Q3 quotients") {
  // the lemmas cover 2-special groups (narrow side) and 2-select groups
  // (wide side)
  auto q3_of = [&](const PcPresentation& g) {
    std::vector<SubgroupBasis> series = two_central_series(g);
    const SubgroupBasis& p3 = series[std::min<std::size_t>(3, series.size() - 1)];
    QuotientMap qm = quotient_by_normal(g, p3);
    return canonicalize(qm.q, qm.project(g, p3, g.gen(0)),
                        qm.project(g, p3, g.gen(1)))
        .group;
  };
  for (int k = 1; k <= 10; ++k) {
    const CatalogEntry& e = catalog().get("N." + std::to_string(k));
    std::string label = classify_q3(e.ipad, Q3Side::kNarrow);
    REQUIRE(label != "unclassified");
    CHECK(iso_test(q3_of(e.group), catalog().get(label).group));
  }
  for (const char* k :
       {"4.2", "8.4", "32.2", "64.19", "128.40", "256.2", "256.35", "256.36",
        "256.38", "256.305", "256.306", "512.451", "512.844", "512.858"}) {
    const CatalogEntry& e = catalog().get(k);
    std::string label = classify_q3(e.ipad, Q3Side::kWide);
    REQUIRE(label != "unclassified");
    CHECK(iso_test(q3_of(e.group), catalog().get(label).group));
  }
}

TEST_CASE("special census flags match the catalog") {
  for (const char* k : {"8.4", "64.19", "256.36", "512.451", "512.858"}) {
    SpecialVerdict v = is_special(catalog().get(k).group);
    CHECK(v.special);
    CHECK(v.two_special);
    CHECK(v.fixed_dim == 0);
    CHECK(v.relation_rank <= 4);
  }
  SpecialVerdict v844 = is_special(catalog().get("512.844").group);
  CHECK(v844.special);
  CHECK_FALSE(v844.two_special);
  CHECK(v844.relation_rank == 6);
  SpecialVerdict v44 = is_special(catalog().get("16.2").group);
  CHECK_FALSE(v44.special);
  CHECK(v44.fixed_dim >= 1);
  SpecialVerdict vq2f = is_special(catalog().get("32.2").group);
  CHECK_FALSE(vq2f.special);
}

TEST_CASE("relation rank examples") {
  CHECK(relation_rank(catalog().get("4.2").group) == 3);
  CHECK(relation_rank(catalog().get("512.844").group) == 6);
  SpecialVerdict v = is_special(catalog().get("8.4").group);
  CHECK(relation_rank(catalog().get("8.4").group) == v.relation_rank);
}

TEST_CASE("viable quotients of N1 and N2") {
  const PcPresentation& n1 = catalog().get("N.1").group;
  ValidityResult v1 = is_valid(n1);
  REQUIRE(v1.valid);
  std::vector<ViableQuotient> q1 = viable_quotients(n1, *v1.witness);
  bool has_self = false, has_42 = false;
  for (const ViableQuotient& q : q1) {
    if (q.quotient.order_log2() == 3 && iso_test(q.quotient, n1)) has_self = true;
    if (q.quotient.order_log2() == 2) has_42 = true;
  }
  CHECK(has_self);
  CHECK(has_42);

  const PcPresentation& n2 = catalog().get("N.2").group;
  ValidityResult v2 = is_valid(n2);
  REQUIRE(v2.valid);
  std::vector<ViableQuotient> q2 = viable_quotients(n2, *v2.witness);
  bool has_6419 = false, has_322 = false, has_84 = false;
  for (const ViableQuotient& q : q2) {
    if (q.quotient.order_log2() == 6 &&
        iso_test(q.quotient, catalog().get("64.19").group))
      has_6419 = true;
    if (q.quotient.order_log2() == 5 &&
        iso_test(q.quotient, catalog().get("32.2").group))
      has_322 = true;
    if (q.quotient.order_log2() == 3 &&
        iso_test(q.quotient, catalog().get("8.4").group))
      has_84 = true;
  }
  CHECK(has_6419);
  CHECK(has_322);
  CHECK(has_84);
}

TEST_CASE("select verdicts") {
  std::vector<std::pair<std::string, const PcPresentation*>> specials;
  for (int k = 1; k <= 10; ++k) {
    std::string nk = "N." + std::to_string(k);
    specials.emplace_back(nk, &catalog().get(nk).group);
  }
  SelectVerdict s42 = is_select(catalog().get("4.2").group, specials);
  CHECK(s42.screen_pass);
  CHECK(s42.confirmed);
  CHECK(catalog().get(s42.witness).key == "8.4");  // witness N.1
  SelectVerdict s322 = is_select(catalog().get("32.2").group, specials);
  CHECK(s322.confirmed);
  SelectVerdict s44 = is_select(catalog().get("16.2").group, specials);
  CHECK_FALSE(s44.confirmed);
}

TEST_CASE("viable quotient of the section 8 group") {
  FpPresentation fp = FpPresentation::from_pairs(
      {FreeWord::parse("(Y,X)^2"), FreeWord::parse("(yXYX)^2")});
  QuotientResult q = two_quotient(fp, 7);
  Automorphism sigma = induce_sigma(q, fp);
  Elt z = q.group.evaluate(FreeWord::parse("(x^2Y^2)^2"), q.images[0],
                           q.images[1]);
  REQUIRE(q.group.order_log2_of(z) == 1);
  SubgroupBasis n = normal_sigma_closure(q.group, z, &sigma);
  QuotientMap qm = quotient_by_normal(q.group, n);
  CanonicalForm cf = canonicalize(qm.q, qm.project(q.group, n, q.images[0]),
                                  qm.project(q.group, n, q.images[1]));
  CHECK(cf.group.order_log2() == 11);
  CHECK(cf.group.two_class() == 5);
  CHECK(ipad(cf.group).str() == "[[4,4];[2,2,8];[2,2,2,2,4]]");
}
