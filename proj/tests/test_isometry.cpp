#include <doctest.h>

#include <random>

#include "amrenorm/generate.hpp"
#include "amrenorm/isometry.hpp"

using namespace amrenorm;

namespace {

BenyaminiStructure make_s0() {
  std::vector<Level> levels{
      Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}, Cell{"c2", CellKind::Isolated, {"q"}}}},
      Level{2, {Cell{"c3", CellKind::Isolated, {"r"}}}},
  };
  return BenyaminiStructure(Rat(3, 2), levels, {Link{1, 2, {{"q", "r"}}}});
}

struct S0Norms {
  BenyaminiStructure s = make_s0();
  RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  WeightScheme scheme = assign_weights(s, consts, 0);
  NormSpec renorm = build_renorm(s, scheme, consts);
  NormSpec weighted = build_weighted_sup(s, scheme);
};

}  // namespace

TEST_CASE("forced weights") {
  S0Norms fx;
  std::map<std::string, std::string> id{{"p", "p"}, {"q", "q"}};
  for (const auto& [t, w] : forced_weights(fx.renorm, id)) CHECK(w == 1);

  std::map<std::string, std::string> swap{{"p", "q"}, {"q", "p"}};
  const auto w = forced_weights(fx.renorm, swap);
  CHECK(w.at("p") == Rat(41, 42));
  CHECK(w.at("q") == Rat(42, 41));

  const auto w31 = forced_weights(fx.weighted, swap);
  CHECK(w31.at("p") == fx.scheme.mu("q") / fx.scheme.mu("p"));
}

TEST_CASE("norms_equal") {
  S0Norms fx;
  CHECK(norms_equal(fx.renorm, fx.renorm));
  CHECK(norms_equal(fx.weighted, fx.weighted));
  CHECK_FALSE(norms_equal(fx.renorm, fx.weighted));

  // The distinguishing witness takes value 1 under the weighted sup and
  // 363/362 under the renorm.
  const LatticeVector witness = canonical_vector(fx.s, {{"p", Rat(20, 21)}, {"q", Rat(40, 41)}});
  CHECK(fx.weighted.value(witness) == 1);
  CHECK(fx.renorm.value(witness) == Rat(363, 362));

  // Octagons of different ranks induce different two-point norms.
  auto two_point_spec = [](const OctagonParams& oct) {
    return spec_from_functionals({{{"x", Rat(1)}},
                                  {{"y", Rat(1)}},
                                  {{"x", oct.a}, {"y", oct.b}}});
  };
  const NormSpec r1 = two_point_spec(make_octagon(Rat(11, 10), 1));
  const NormSpec r2 = two_point_spec(make_octagon(Rat(11, 10), 2));
  CHECK_FALSE(norms_equal(r1, r2));
  CHECK(norms_equal(r1, r1));
}

TEST_CASE("candidate algebra") {
  S0Norms fx;
  IsometryCandidate swap;
  swap.sigma = {{"p", "q"}, {"q", "p"}};
  swap.weights = forced_weights(fx.weighted, swap.sigma);
  CHECK(compose(swap, inverse(swap)).is_identity());
  CHECK(compose(inverse(swap), swap).is_identity());

  const LatticeVector x = canonical_vector(fx.s, {{"p", Rat(2)}, {"q", Rat(-3)}});
  const LatticeVector y = canonical_vector(fx.s, {{"p", Rat(-1)}, {"q", Rat(5)}});
  CHECK(apply_candidate(swap, lattice_join(x, y)) ==
        lattice_join(apply_candidate(swap, x), apply_candidate(swap, y)));
}

TEST_CASE("enumeration: the renorm is rigid, the weighted sup is not") {
  S0Norms fx;
  const auto rigid = enumerate_isometries(fx.renorm);
  REQUIRE(rigid.size() == 1);
  CHECK(rigid.front().is_identity());

  const auto flexible = enumerate_isometries(fx.weighted);
  REQUIRE(flexible.size() == 2);
  CHECK(flexible.front().is_identity() != flexible.back().is_identity());
  for (const auto& cand : flexible) {
    if (cand.is_identity()) continue;
    CHECK(cand.sigma.at("p") == "q");
    CHECK(cand.weights.at("p") == Rat(41, 42));
    CHECK(cand.weights.at("q") == Rat(42, 41));
  }
}

TEST_CASE("one-point structures admit only the identity") {
  std::vector<Level> levels{Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}}}};
  const BenyaminiStructure s(Rat(3, 2), levels, {});
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  const NormSpec spec = build_renorm(s, assign_weights(s, consts, 0), consts);
  const auto group = enumerate_isometries(spec);
  CHECK(group.size() == 1);
}

TEST_CASE("enumeration bound") {
  S0Norms fx;
  CHECK_THROWS_AS(enumerate_isometries(fx.renorm, {1, 1, false}), IsometryError);
}

TEST_CASE("weighted-sup group has k! elements on purely atomic structures") {
  for (std::uint64_t seed : {2ULL, 7ULL}) {
    const BenyaminiStructure s = gen_atomic_structure(seed, 2, 4);
    const RenormConstants consts{s.C(), Rat(11, 10)};
    consts.validate();
    const WeightScheme scheme = assign_weights(s, consts, 0);
    const auto group = enumerate_isometries(build_weighted_sup(s, scheme));
    std::size_t expected = 1;
    for (std::size_t i = 2; i <= s.free_points().size(); ++i) expected *= i;
    CHECK(group.size() == expected);

    const auto rigid = enumerate_isometries(build_renorm(s, scheme, consts));
    if (s.free_points().size() >= 2) {
      CHECK(rigid.size() == 1);
      CHECK(rigid.front().is_identity());
    }
  }
}

TEST_CASE("prefilter and workers do not change the group") {
  const BenyaminiStructure s = gen_atomic_structure(13, 4, 5);
  const RenormConstants consts{s.C(), Rat(11, 10)};
  consts.validate();
  const WeightScheme scheme = assign_weights(s, consts, 0);
  const NormSpec weighted = build_weighted_sup(s, scheme);
  const NormSpec rigid = build_renorm(s, scheme, consts);

  const auto base = enumerate_isometries(weighted, {8, 1, false});
  CHECK(enumerate_isometries(weighted, {8, 3, false}) == base);
  const auto rigid_base = enumerate_isometries(rigid, {8, 1, false});
  CHECK(enumerate_isometries(rigid, {8, 1, true}) == rigid_base);
  CHECK(enumerate_isometries(rigid, {8, 4, true}) == rigid_base);
}
