#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towerlab/pcgroup.hpp"

#include <map>
#include <random>

using namespace towerlab;

namespace {

// Q8 with a1^2 = a3, a2^2 = a3, (a2,a1) = a3.
PcPresentation make_q8() {
  PcPresentation::Builder b;
  b.weights = {1, 1, 2};
  b.defs = {GenDef{DefKind::kImage, 0, 0}, GenDef{DefKind::kImage, 1, 0},
            GenDef{DefKind::kComm, 1, 0}};
  b.pow_tails.assign(3, Elt{});
  set_bit(b.pow_tails[0], 2);
  set_bit(b.pow_tails[1], 2);
  b.comm_tails.assign(3, Elt{});
  set_bit(b.comm_tails[0], 2);  // (a2, a1) = a3
  b.canonical = true;
  return b.build();
}

PcPresentation make_klein() {
  PcPresentation::Builder b;
  b.weights = {1, 1};
  b.defs = {GenDef{DefKind::kImage, 0, 0}, GenDef{DefKind::kImage, 1, 0}};
  b.pow_tails.assign(2, Elt{});
  b.comm_tails.assign(1, Elt{});
  b.canonical = true;
  return b.build();
}

PcPresentation make_c4xc4() {
  PcPresentation::Builder b;
  b.weights = {1, 1, 2, 2};
  b.defs = {GenDef{DefKind::kImage, 0, 0}, GenDef{DefKind::kImage, 1, 0},
            GenDef{DefKind::kPower, 0, 0}, GenDef{DefKind::kPower, 1, 0}};
  b.pow_tails.assign(4, Elt{});
  set_bit(b.pow_tails[0], 2);
  set_bit(b.pow_tails[1], 3);
  b.comm_tails.assign(6, Elt{});
  b.canonical = true;
  return b.build();
}

// Independent quaternion-unit oracle: elements +-1, +-i, +-j, +-k encoded as
// (sign, axis) with axis 0 = 1, 1 = i, 2 = j, 3 = k.
struct Quat {
  int sign;
  int axis;
  bool operator==(const Quat& o) const {
    return sign == o.sign && axis == o.axis;
  }
  bool operator<(const Quat& o) const {
    return std::tie(sign, axis) < std::tie(o.sign, o.axis);
  }
};

Quat qmul(Quat a, Quat b) {
  static const int tab[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1},
                                {3, 2, 1, 0}};
  static const int sgn[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1},
                                {1, -1, -1, 1}, {1, 1, -1, -1}};
  return Quat{a.sign * b.sign * sgn[a.axis][b.axis], tab[a.axis][b.axis]};
}

}  // namespace

TEST_CASE("abelian type parse, print, dominance") {
  CHECK(AbelianType::parse("[2,2,4]").str() == "[2,2,4]");
  CHECK(AbelianType::parse("[]").str() == "[]");
  CHECK_THROWS_AS(AbelianType::parse("[3,3]"), ParseError);
  CHECK_THROWS_AS(AbelianType::parse("[4,2]"), ParseError);
  CHECK(abelian_is_quotient(AbelianType::parse("[4]"), AbelianType::parse("[2]")));
  CHECK_FALSE(
      abelian_is_quotient(AbelianType::parse("[4]"), AbelianType::parse("[2,2]")));
  CHECK(abelian_is_quotient(AbelianType::parse("[4,4]"),
                            AbelianType::parse("[2,4]")));
}

TEST_CASE("Q8 collection matches the quaternion-unit table") {
  PcPresentation q8 = make_q8();
  q8.verify_consistency();
  // a1 -> i, a2 -> j, a3 -> -1
  auto value = [&](const Elt& e) {
    Quat v{1, 0};
    if (get_bit(e, 0)) v = qmul(v, Quat{1, 1});
    if (get_bit(e, 1)) v = qmul(v, Quat{1, 2});
    if (get_bit(e, 2)) v = qmul(v, Quat{-1, 0});
    return v;
  };
  std::map<Quat, Elt> elts;
  for (unsigned m = 0; m < 8; ++m) {
    Elt e{};
    e[0] = m;
    elts[value(e)] = e;
  }
  CHECK(elts.size() == 8);
  for (const auto& [qa, ea] : elts)
    for (const auto& [qb, eb] : elts) {
      Elt prod = q8.mul(ea, eb);
      CHECK(value(prod) == qmul(qa, qb));
    }
  // spec examples
  CHECK(mask_eq(q8.mul(q8.gen(0), q8.gen(0)), q8.gen(2), q8.nwords()));
  Elt ba = q8.mul(q8.gen(1), q8.gen(0));
  Elt expect{};
  set_bit(expect, 0);
  set_bit(expect, 1);
  set_bit(expect, 2);
  CHECK(mask_eq(ba, expect, q8.nwords()));
  CHECK(mask_eq(q8.mul(q8.one(), q8.gen(1)), q8.gen(1), q8.nwords()));
}

TEST_CASE("element orders in Q8") {
  PcPresentation q8 = make_q8();
  CHECK(q8.order_log2_of(q8.one()) == 0);
  CHECK(q8.order_log2_of(q8.gen(0)) == 2);  // order 4
  CHECK(q8.order_log2_of(q8.gen(2)) == 1);  // central involution
}

TEST_CASE("collection associativity on random triples") {
  PcPresentation q8 = make_q8();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10000; ++t) {
    Elt a{}, b{}, c{};
    a[0] = rng() % 8;
    b[0] = rng() % 8;
    c[0] = rng() % 8;
    CHECK(mask_eq(q8.mul(q8.mul(a, b), c), q8.mul(a, q8.mul(b, c)), 1));
  }
}

TEST_CASE("inverses and conjugation") {
  PcPresentation q8 = make_q8();
  for (unsigned m = 0; m < 8; ++m) {
    Elt e{};
    e[0] = m;
    Elt inv = q8.inverse(e);
    CHECK(is_zero(q8.mul(e, inv), 1));
    CHECK(is_zero(q8.mul(inv, e), 1));
  }
  // i^j = -i = i^3 = i * (-1)
  Elt conj = q8.conj(q8.gen(0), q8.gen(1));
  Elt expect = q8.mul(q8.gen(0), q8.gen(2));
  CHECK(mask_eq(conj, expect, 1));
}

TEST_CASE("evaluate words") {
  PcPresentation q8 = make_q8();
  CHECK(is_zero(q8.evaluate(FreeWord(), q8.gen(0), q8.gen(1)), 1));
  CHECK(mask_eq(q8.evaluate(FreeWord::generator(0), q8.gen(0), q8.gen(1)),
              q8.gen(0), 1));
  PcPresentation ab = make_c4xc4();
  CHECK(is_zero(ab.evaluate(FreeWord::parse("(x,y)"), ab.gen(0), ab.gen(1)),
                1));
}

TEST_CASE("subgroup closure examples") {
  PcPresentation q8 = make_q8();
  SubgroupBasis trivial = SubgroupBasis::closure(q8, {});
  CHECK(trivial.order_log2() == 0);
  CHECK(trivial.index_log2() == 3);
  SubgroupBasis whole =
      SubgroupBasis::closure(q8, {q8.gen(0), q8.gen(1), q8.gen(2)});
  CHECK(whole.order_log2() == 3);
  SubgroupBasis cyc = SubgroupBasis::closure(q8, {q8.gen(0)});
  CHECK(cyc.order_log2() == 2);
  CHECK(cyc.index_log2() == 1);
}

TEST_CASE("maximal subgroups of Q8 are cyclic of order 4") {
  PcPresentation q8 = make_q8();
  std::vector<SubgroupBasis> ms = maximal_subgroups(q8);
  REQUIRE(ms.size() == 3);
  for (const SubgroupBasis& m : ms) {
    CHECK(m.index_log2() == 1);
    CHECK(abelianization(q8, &m) == AbelianType::parse("[4]"));
  }
}

TEST_CASE("maximal subgroups of [2,2] have order 2") {
  PcPresentation v = make_klein();
  std::vector<SubgroupBasis> ms = maximal_subgroups(v);
  REQUIRE(ms.size() == 3);
  for (const SubgroupBasis& m : ms) CHECK(m.order_log2() == 1);
}

TEST_CASE("abelianizations") {
  PcPresentation q8 = make_q8();
  CHECK(abelianization(q8) == AbelianType::parse("[2,2]"));
  PcPresentation ab = make_c4xc4();
  CHECK(abelianization(ab) == AbelianType::parse("[4,4]"));
  SubgroupBasis phi = frattini_subgroup(q8);
  CHECK(abelianization(q8, &phi) == AbelianType::parse("[2]"));
}

TEST_CASE("ipad of Q8") {
  PcPresentation q8 = make_q8();
  CHECK(ipad_of(q8).str() == "[[2,2];[4];[2]]");
}

TEST_CASE("two-central series") {
  PcPresentation v = make_klein();
  CHECK(two_central_series(v).size() == 2);  // class 1
  PcPresentation q8 = make_q8();
  std::vector<SubgroupBasis> s = two_central_series(q8);
  REQUIRE(s.size() == 3);  // class 2
  CHECK(s[1].order_log2() == 1);
  // weight filtration agrees with the honest series
  for (unsigned k = 0; k < s.size(); ++k) {
    for (unsigned i = 0; i < q8.ngens(); ++i) {
      bool inw = q8.weight(i) > k;
      CHECK(s[k].contains(q8.gen(i)) == inw);
    }
  }
}

TEST_CASE("low index subgroups of Q8") {
  PcPresentation q8 = make_q8();
  std::vector<SubgroupBasis> subs = low_index_subgroups(q8, 2);
  std::map<unsigned, unsigned> by_index;
  for (const SubgroupBasis& s : subs) by_index[s.index_log2()]++;
  CHECK(by_index[0] == 1);
  CHECK(by_index[1] == 3);
  CHECK(by_index[2] == 1);
  PcPresentation v = make_klein();
  std::vector<SubgroupBasis> vs = low_index_subgroups(v, 1);
  CHECK(vs.size() == 4);  // whole + 3 of index 2
}

TEST_CASE("normal sigma closure without sigma") {
  PcPresentation q8 = make_q8();
  SubgroupBasis triv = normal_sigma_closure(q8, q8.one());
  CHECK(triv.order_log2() == 0);
  SubgroupBasis z = normal_sigma_closure(q8, q8.gen(2));
  CHECK(z.order_log2() == 1);
}

TEST_CASE("quotient by the centre of Q8") {
  PcPresentation q8 = make_q8();
  SubgroupBasis z = normal_sigma_closure(q8, q8.gen(2));
  QuotientMap qm = quotient_by_normal(q8, z);
  CHECK(qm.q.ngens() == 2);
  CHECK(abelianization(qm.q) == AbelianType::parse("[2,2]"));
}

TEST_CASE("serialization round trip") {
  PcPresentation q8 = make_q8();
  PcPresentation back = PcPresentation::deserialize(q8.serialize());
  CHECK(back.identical(q8));
  CHECK(back.canonical());
  CHECK(back.serialize() == q8.serialize());
}

TEST_CASE("definition words evaluate back to the generators") {
  PcPresentation q8 = make_q8();
  for (unsigned i = 0; i < q8.ngens(); ++i) {
    Elt v = q8.evaluate(q8.definition_word(i), q8.gen(0), q8.gen(1));
    CHECK(mask_eq(v, q8.gen(i), q8.nwords()));
  }
}
