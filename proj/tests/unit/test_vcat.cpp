#include <memory>

#include "doctest.h"
#include "generators.hpp"
#include "vlam/error.hpp"
#include "vlam/vcat.hpp"

using namespace vlam;

namespace {

const QuantaleSpec M = QuantaleSpec::lawvere();
const QuantaleSpec B = QuantaleSpec::boolean();

FinVCat two_point(QuantaleSpec spec, const char* d) {
  return FinVCat(spec, {"a", "b"}, {spec.unit(), spec.parse(d), spec.parse(d), spec.unit()});
}

}  // namespace

TEST_CASE("construction validates the laws") {
  CHECK_THROWS_AS(FinVCat(M, {"a", "b"}, {M.parse("1"), M.parse("0"), M.parse("0"), M.parse("0")}), Error);
  // a(a,c) = 5 > a(a,b) + a(b,c) = 2 violates transitivity.
  std::vector<QuantaleValue> t{M.parse("0"), M.parse("1"), M.parse("5"), M.parse("1"), M.parse("0"),
                               M.parse("1"), M.parse("5"), M.parse("1"), M.parse("0")};
  CHECK_THROWS_AS(FinVCat(M, {"a", "b", "c"}, t), Error);
  CHECK_THROWS_AS(FinVCat(M, {"a"}, {}), Error);
}

TEST_CASE("tensor of V-categories") {
  auto one = FinVCat::unit(M);
  auto t1 = tensor_vcat(one, one);
  CHECK(t1.size() == 1);
  CHECK(t1.at(0, 0) == M.unit());

  // Hand-computed: d((x,y),(x',y')) = d1(x,x') + d2(y,y') with d1 = 1, d2 = 2.
  auto p = tensor_vcat(two_point(M, "1"), two_point(M, "2"));
  const char* expected[4][4] = {{"0", "2", "1", "3"}, {"2", "0", "3", "1"}, {"1", "3", "0", "2"}, {"3", "1", "2", "0"}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(p.at(i, j) == M.parse(expected[i][j]));
  }
  CHECK_FALSE(p.violation());

  // Tensoring with the unit is the identity up to relabelling.
  auto c = two_point(M, "3");
  auto cu = tensor_vcat(c, one);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(cu.at(i, j) == c.at(i, j));
  }
  CHECK_THROWS_AS(tensor_vcat(c, FinVCat::unit(B)), SpecMismatch);

  testing::Rng rng(1);
  for (auto spec : {M, B, QuantaleSpec::godel(), QuantaleSpec::ultrametric()}) {
    for (int i = 0; i < 30; ++i) {
      auto a = testing::random_vcat(spec, 1 + i % 3, rng);
      auto b = testing::random_vcat(spec, 1 + (i / 3) % 3, rng);
      CHECK_FALSE(tensor_vcat(a, b).violation());
    }
  }
}

TEST_CASE("hom distance") {
  auto c = std::make_shared<const FinVCat>(two_point(M, "3"));
  CHECK(hom_distance(identity_functor(c), identity_functor(c)) == M.unit());
  VFunctorTable f{c, c, {0, 1}};
  VFunctorTable g{c, c, {0, 0}};
  // Differ only at b, where the targets are 3 apart.
  CHECK(hom_distance(f, g) == M.parse("3"));

  auto chain = std::make_shared<const FinVCat>(FinVCat(B, {"0", "1"}, {B.top(), B.top(), B.bottom(), B.top()}));
  VFunctorTable lo{chain, chain, {0, 0}};
  VFunctorTable hi{chain, chain, {0, 1}};
  CHECK(hom_distance(lo, hi) == B.top());
  CHECK(hom_distance(hi, lo) == B.bottom());

  auto other = std::make_shared<const FinVCat>(FinVCat::unit(M));
  CHECK_THROWS_AS(hom_distance(f, VFunctorTable{other, c, {0}}), Error);
}

TEST_CASE("enriched composition inequality") {
  testing::Rng rng(9);
  for (auto spec : {M, B, QuantaleSpec::godel()}) {
    for (int trial = 0; trial < 10; ++trial) {
      auto x = std::make_shared<const FinVCat>(testing::random_vcat(spec, 2 + trial % 2, rng));
      auto y = std::make_shared<const FinVCat>(testing::random_vcat(spec, 2, rng));
      auto z = std::make_shared<const FinVCat>(testing::random_vcat(spec, 2, rng));
      auto xy = enumerate_hom(*x, *y);
      auto yz = enumerate_hom(*y, *z);
      for (const auto& f1 : xy.tables) {
        for (const auto& g1 : xy.tables) {
          for (const auto& f2 : yz.tables) {
            for (const auto& g2 : yz.tables) {
              VFunctorTable f{x, y, f1}, g{x, y, g1}, fp{y, z, f2}, gp{y, z, g2};
              CHECK(leq(tensor(hom_distance(f, g), hom_distance(fp, gp)), hom_distance(compose(fp, f), compose(gp, g))));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("natural order, separation, symmetry") {
  auto c = two_point(M, "0");
  CHECK(natural_leq(c, 0, 0));
  CHECK(natural_leq(c, 0, 1));
  CHECK_FALSE(natural_leq(two_point(M, "1"), 0, 1));
  CHECK_FALSE(is_separated(c));
  CHECK(is_separated(FinVCat::unit(M)));
  CHECK(is_symmetric(FinVCat::unit(M)));
  auto d = FinVCat::discrete(M, {"a", "b", "c"});
  CHECK(is_separated(d));
  CHECK(is_symmetric(d));
  CHECK_FALSE(d.violation());
}

TEST_CASE("separated quotient") {
  auto c = std::make_shared<const FinVCat>(two_point(M, "0"));
  auto q = separated_quotient(c);
  CHECK(q.category->size() == 1);
  CHECK(q.projection.is_nonexpansive());

  // x <= y <= x, z incomparable.
  auto pre = std::make_shared<const FinVCat>(FinVCat(
      B, {"x", "y", "z"},
      {B.top(), B.top(), B.bottom(), B.top(), B.top(), B.bottom(), B.bottom(), B.bottom(), B.top()}));
  auto q2 = separated_quotient(pre);
  CHECK(q2.category->size() == 2);
  CHECK(q2.classes == std::vector<std::vector<std::size_t>>{{0, 1}, {2}});
  CHECK(q2.category->carrier() == std::vector<std::string>{"x", "z"});

  auto sep = std::make_shared<const FinVCat>(two_point(M, "2"));
  auto q3 = separated_quotient(sep);
  CHECK(q3.projection.mapping == std::vector<std::size_t>{0, 1});
}

TEST_CASE("hom enumeration") {
  auto unit = FinVCat::unit(M);
  auto b = two_point(M, "1");
  auto h = enumerate_hom(unit, b);
  CHECK(h.tables.size() == 2);

  // All 4 maps between 2-point spaces at distance 1 are non-expansive.
  auto h2 = enumerate_hom(b, b);
  CHECK(h2.tables.size() == 4);
  CHECK_FALSE(h2.category->violation());

  // Collapsible source: both points must land on points at distance 0.
  auto zero = two_point(M, "0");
  auto h3 = enumerate_hom(zero, b);
  CHECK(h3.tables == std::vector<std::vector<std::size_t>>{{0, 0}, {1, 1}});

  auto big = FinVCat::discrete(M, std::vector<std::string>(8, "p"));
  CHECK_THROWS_AS(enumerate_hom(big, big, 4096), LimitExceeded);
}
