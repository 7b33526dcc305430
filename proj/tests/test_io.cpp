#include <doctest.h>

#include <random>

#include "amrenorm/generate.hpp"
#include "amrenorm/json_io.hpp"
#include "amrenorm/verify.hpp"

using namespace amrenorm;

TEST_CASE("structure JSON matches the documented shape") {
  std::vector<Level> levels{
      Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}, Cell{"c2", CellKind::Isolated, {"q"}}}},
      Level{2, {Cell{"c3", CellKind::Isolated, {"r"}}}},
  };
  const BenyaminiStructure s(Rat(3, 2), levels, {Link{1, 2, {{"q", "r"}}}});
  const Json j = structure_to_json(s);
  CHECK(j["C"] == "3/2");
  CHECK(j["levels"][0]["index"] == 1);
  CHECK(j["levels"][0]["cells"][0]["kind"] == "isolated");
  CHECK(j["links"][0]["pairs"][0][0] == "q");
  CHECK(j["links"][0]["pairs"][0][1] == "r");

  const BenyaminiStructure back = structure_from_json(j);
  CHECK(structure_to_json(back).dump() == j.dump());
}

TEST_CASE("round trips on random artifacts") {
  std::mt19937_64 rng(2);
  const auto instances = standard_instances(12, 6);
  for (const auto& s : instances) {
    CHECK(structure_to_json(structure_from_json(structure_to_json(s))).dump() ==
          structure_to_json(s).dump());
    const LatticeVector x = gen_vector(s, rng);
    CHECK(vector_from_json(s, vector_to_json(x)) == x);
    PartialFunction pf{1, s.top_level(), expand(s, x).values};
    CHECK(partial_function_from_json(partial_function_to_json(pf)) == pf);
    const Functional f{{{s.points().front(), Rat(-7, 3)}}};
    CHECK(functional_from_json(functional_to_json(f)) == f);
  }
}

TEST_CASE("norm specs round trip through the functional list") {
  const auto instances = standard_instances(31, 4);
  for (const auto& s : instances) {
    RenormConstants consts{s.C(), Rat(21, 20)};
    consts.validate();
    const NormSpec spec = build_renorm(s, assign_weights(s, consts, 1), consts);
    const NormSpec back = norm_spec_from_json(norm_spec_to_json(spec));
    CHECK(norm_spec_to_json(back).dump() == norm_spec_to_json(spec).dump());
    CHECK(back.point_weight == spec.point_weight);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
      const LatticeVector x = gen_vector(s, rng);
      CHECK(back.value(x) == spec.value(x));
    }
  }
}

TEST_CASE("sublattice models round trip") {
  const SublatticeModel m = gen_sublattice(5, Rat(3, 2));
  const SublatticeModel back = sublattice_from_json(sublattice_to_json(m));
  CHECK(sublattice_to_json(back).dump() == sublattice_to_json(m).dump());
}

TEST_CASE("generation is deterministic") {
  GenParams p;
  p.levels = 3;
  p.cells_per_level = 2;
  p.link_density_permille = 450;
  p.perfect_permille = 350;
  p.seed = 99;
  CHECK(structure_to_json(gen_structure(p)).dump() == structure_to_json(gen_structure(p)).dump());
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(structure_from_json(Json::object()), IoError);
  CHECK_THROWS_AS(norm_spec_from_json(Json::object()), IoError);
  Json bad_link = structure_to_json(standard_instances(1, 1).front());
  bad_link["links"] = Json::array({Json{{"lower_level", 1}, {"upper_level", 2}, {"pairs", Json::array({Json::array({"x"})})}}});
  CHECK_THROWS_AS(structure_from_json(bad_link), IoError);
}
