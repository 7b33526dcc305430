#include <doctest.h>

#include <random>

#include "amrenorm/generate.hpp"
#include "amrenorm/renorm.hpp"
#include "amrenorm/verify.hpp"

using namespace amrenorm;

namespace {

BenyaminiStructure make_s0() {
  std::vector<Level> levels{
      Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}, Cell{"c2", CellKind::Isolated, {"q"}}}},
      Level{2, {Cell{"c3", CellKind::Isolated, {"r"}}}},
  };
  return BenyaminiStructure(Rat(3, 2), levels, {Link{1, 2, {{"q", "r"}}}});
}

BenyaminiStructure make_s1() {
  std::vector<Level> levels{Level{1, {Cell{"c1", CellKind::Perfect, {"u1", "u2", "u3"}}}}};
  return BenyaminiStructure(Rat(3, 2), levels, {});
}

}  // namespace

TEST_CASE("constants validation") {
  RenormConstants ok{Rat(3, 2), Rat(11, 10)};
  ok.validate();
  CHECK_THROWS_AS((RenormConstants{Rat(3, 2), Rat(12, 10)}.validate()), RenormError);  // c^3 = 1.728 > 3/2
  CHECK_THROWS_AS((RenormConstants{Rat(2), Rat(11, 10)}.validate()), RenormError);
  CHECK_THROWS_AS((RenormConstants{Rat(3, 2), Rat(1)}.validate()), RenormError);
}

TEST_CASE("weight assignment") {
  const auto s0 = make_s0();
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  const WeightScheme scheme = assign_weights(s0, consts, 0);
  CHECK(scheme.mu("p") == Rat(21, 20));
  CHECK(scheme.mu("q") == Rat(41, 40));
  CHECK(scheme.mu("r") == 1);  // undesignated (not a free point)

  // Distinct weights across two structures' levels and within levels.
  GenParams params;
  params.levels = 3;
  params.cells_per_level = 3;
  params.link_density_permille = 300;
  params.seed = 5;
  const BenyaminiStructure s = gen_structure(params);
  const WeightScheme big = assign_weights(s, consts, 2);
  std::set<Rat> seen;
  for (const auto& [lvl, pts] : big.designated) {
    Rat prev;
    bool first = true;
    for (const auto& [p, lambda] : pts) {
      CHECK(lambda > 1);
      CHECK(lambda < consts.c);
      CHECK(seen.insert(lambda).second);
      if (!first) CHECK(lambda < prev);
      prev = lambda;
      first = false;
    }
  }
  validate_scheme(s, consts, big);
}

TEST_CASE("scheme validation catches violations") {
  const auto s0 = make_s0();
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  WeightScheme bad;
  bad.designated = {{1, {{"p", Rat(21, 20)}}}};  // q undesignated on an all-isolated level
  bad.rebuild_lookup();
  CHECK_THROWS_AS(validate_scheme(s0, consts, bad), RenormError);

  WeightScheme increasing;
  increasing.designated = {{1, {{"p", Rat(41, 40)}, {"q", Rat(21, 20)}}}};
  increasing.rebuild_lookup();
  CHECK_THROWS_AS(validate_scheme(s0, consts, increasing), RenormError);

  WeightScheme out_of_range;
  out_of_range.designated = {{1, {{"p", Rat(6, 5)}, {"q", Rat(41, 40)}}}};
  out_of_range.rebuild_lookup();
  CHECK_THROWS_AS(validate_scheme(s0, consts, out_of_range), RenormError);
}

TEST_CASE("octagon parameters and gauge, canonical rank 1") {
  const OctagonParams p = make_octagon(Rat(11, 10), 1);
  CHECK(p.v1 == Rat(32, 33));
  CHECK(p.v2 == Rat(21, 22));
  CHECK(p.a == Rat(11, 18));
  CHECK(p.b == Rat(11, 27));
  CHECK(octagon_norm(Rat(1), Rat(1), p) == Rat(55, 54));
  CHECK(octagon_norm(Rat(1), Rat(0), p) == 1);
  CHECK(octagon_norm(Rat(0), Rat(0), p) == 0);
  CHECK(octagon_norm(Rat(-1), Rat(1), p) == Rat(55, 54));
}

TEST_CASE("gauge agrees with the vertex-polygon oracle") {
  std::mt19937_64 rng(31);
  for (long long rank : {1, 2, 3, 7, 20}) {
    for (const Rat& c : {Rat(11, 10), Rat(21, 20)}) {
      const OctagonParams p = make_octagon(c, rank);
      CHECK(checks::octagon_gauge_oracle(p.v1, Rat(1), p) == 1);
      CHECK(checks::octagon_gauge_oracle(Rat(1), p.v2, p) == 1);
      CHECK(octagon_norm(p.v1, Rat(1), p) == 1);
      CHECK(octagon_norm(Rat(1), p.v2, p) == 1);
      for (int k = 0; k < 40; ++k) {
        const Rat alpha(static_cast<long long>(rng() % 19) - 9, 1 + rng() % 4);
        const Rat beta(static_cast<long long>(rng() % 19) - 9, 1 + rng() % 4);
        CHECK(octagon_norm(alpha, beta, p) == checks::octagon_gauge_oracle(alpha, beta, p));
      }
    }
  }
}

TEST_CASE("octagon properties") {
  const OctagonPropertiesReport rep =
      check_octagon_properties(Rat(11, 10), 1, 20, {Rat(101, 100), Rat(21, 20)}, 10);
  CHECK(rep.sup_equivalence_ok);
  CHECK(rep.corner_flatness_ok);
  CHECK(rep.pairwise_distinct_ok);
  for (const auto& g : rep.gamma_bounds) {
    CHECK(g.min_rank >= 1);
    CHECK(g.tail_ok);
  }

  // Canonical rank-1 numbers.
  const OctagonParams p = make_octagon(Rat(11, 10), 1);
  CHECK(p.a + p.b == Rat(55, 54));
  CHECK(p.a + p.b <= Rat(11, 10));
  CHECK(p.a + p.b / Rat(11, 10) == Rat(53, 54));

  CHECK(octagons_distinguishable(make_octagon(Rat(11, 10), 1), make_octagon(Rat(11, 10), 2)));
}

TEST_CASE("pair rank is the Cantor pairing") {
  CHECK(pair_rank(1, 2) == 8);
  CHECK(pair_rank(1, 3) == 13);
  std::set<long long> seen;
  for (long long i = 1; i <= 20; ++i)
    for (long long j = i + 1; j <= 20; ++j) CHECK(seen.insert(pair_rank(i, j)).second);
  CHECK_THROWS_AS(pair_rank(2, 2), RenormError);
  CHECK_THROWS_AS(pair_rank(3, 1), RenormError);
}

TEST_CASE("build_renorm: no atoms is the weighted sup") {
  const auto s1 = make_s1();
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  const WeightScheme scheme = assign_weights(s1, consts, 0);
  const NormSpec spec = build_renorm(s1, scheme, consts);
  CHECK(spec.functionals.size() == 3);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 50; ++k) {
    const LatticeVector x = gen_vector(s1, rng);
    Rat expected(0);
    for (const auto& [p, v] : x.coords) expected = std::max(expected, Rat(scheme.mu(p) * rat_abs(v)));
    CHECK(spec.value(x) == expected);
  }
}

TEST_CASE("build_renorm: two atoms picks up the pair octagon") {
  const auto s0 = make_s0();
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  const WeightScheme scheme = assign_weights(s0, consts, 0);
  const NormSpec spec = build_renorm(s0, scheme, consts);
  REQUIRE(spec.functionals.size() == 3);
  CHECK(spec.atom_points == std::vector<std::string>{"p", "q"});

  CHECK(spec.value(canonical_vector(s0, {{"p", Rat(1)}})) == Rat(21, 20));
  // The atom pair (1, 2) carries rank pair_rank(1, 2) = 8; at weighted
  // coordinates (1, 1) the diagonal face gives a + b at that rank.
  const OctagonParams oct = make_octagon(consts.c, 8);
  const LatticeVector witness = canonical_vector(s0, {{"p", Rat(20, 21)}, {"q", Rat(40, 41)}});
  CHECK(spec.value(witness) == oct.a + oct.b);
  CHECK(spec.value(witness) == Rat(363, 362));
  CHECK(spec.value(witness) > 1);  // the multi-atom renorm is not an AM norm
}

TEST_CASE("build_renorm: single atom keeps the atom band unweighted") {
  const BenyaminiStructure s = gen_one_atom_structure(3);
  const RenormConstants consts{s.C(), Rat(21, 20)};
  consts.validate();
  const WeightScheme scheme = assign_weights(s, consts, 0);
  const NormSpec spec = build_renorm(s, scheme, consts);
  const auto atom_list = atoms(s);
  REQUIRE(atom_list.size() == 1);
  CHECK(spec.point_weight.at(atom_list[0].point) == 1);
  for (const auto& [p, lvl] : s.free_points())
    if (p != atom_list[0].point) CHECK(spec.point_weight.at(p) == scheme.mu(p));
  for (const auto& f : spec.functionals) CHECK(f.size() == 1);  // still an AM norm
}

TEST_CASE("renorm sandwich and AM identity") {
  std::mt19937_64 rng(41);
  const auto instances = checks::renorm_instances(19, 6);
  for (const auto& inst : instances) {
    const Rat c2 = inst.consts.c * inst.consts.c;
    for (int k = 0; k < 100; ++k) {
      const LatticeVector x = gen_vector(inst.structure, rng);
      const Rat base = base_norm(inst.structure, x);
      const Rat re = inst.spec.value(x);
      CHECK(re >= base);
      CHECK(re <= c2 * base);
      if (inst.atom_count <= 1) CHECK(re <= inst.consts.c * base);
      CHECK(inst.spec.value(lattice_abs(x)) == re);
    }
    if (inst.atom_count <= 1) {
      for (int k = 0; k < 100; ++k) {
        const LatticeVector x = gen_positive_vector(inst.structure, rng);
        const LatticeVector y = gen_positive_vector(inst.structure, rng);
        CHECK(inst.spec.value(lattice_join(x, y)) == std::max(inst.spec.value(x), inst.spec.value(y)));
      }
    }
  }
}

TEST_CASE("two-atom span reproduces the pair gauge") {
  const auto s0 = make_s0();
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  const WeightScheme scheme = assign_weights(s0, consts, 0);
  const NormSpec spec = build_renorm(s0, scheme, consts);
  const OctagonParams oct = make_octagon(consts.c, 8);
  std::mt19937_64 rng(43);
  for (int k = 0; k < 60; ++k) {
    const Rat alpha(static_cast<long long>(rng() % 15) - 7, 1 + rng() % 3);
    const Rat beta(static_cast<long long>(rng() % 15) - 7, 1 + rng() % 3);
    const LatticeVector x = canonical_vector(
        s0, {{"p", Rat(alpha / scheme.mu("p"))}, {"q", Rat(beta / scheme.mu("q"))}});
    CHECK(spec.value(x) == octagon_norm(alpha, beta, oct));
  }
}

TEST_CASE("recover_base_weight") {
  CHECK(recover_base_weight(Rat(1), Rat(3, 2)) == 1);
  CHECK(recover_base_weight(Rat(2, 3), Rat(3, 2)) == 1);
  CHECK(recover_base_weight(Rat(40, 63), Rat(3, 2)) == Rat(20, 21));
  CHECK_THROWS_AS(recover_base_weight(Rat(0), Rat(3, 2)), RenormError);
  CHECK_THROWS_AS(recover_base_weight(Rat(3, 2), Rat(3, 2)), RenormError);

  // Recovery inverts the designated weights through the point-mass data:
  // alpha = C^-k / mu(t) recovers 1 / mu(t).
  const auto s0 = make_s0();
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  const WeightScheme scheme = assign_weights(s0, consts, 0);
  for (const auto& [p, lvl] : s0.free_points()) {
    const Rat alpha = pow_rat(s0.C(), -2) / scheme.mu(p);
    CHECK(recover_base_weight(alpha, s0.C()) == 1 / scheme.mu(p));
  }
}

TEST_CASE("degenerate structures are rejected") {
  std::vector<Level> empty_level{Level{1, {}}};
  const BenyaminiStructure s(Rat(3, 2), empty_level, {});
  const RenormConstants consts{Rat(3, 2), Rat(11, 10)};
  CHECK_THROWS_AS(build_renorm(s, WeightScheme{}, consts), RenormError);
  CHECK_THROWS_AS(build_weighted_sup(s, WeightScheme{}), RenormError);
}
