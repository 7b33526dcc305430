#include <doctest.h>

#include <random>

#include "amrenorm/generate.hpp"
#include "amrenorm/structure.hpp"

using namespace amrenorm;

namespace {

// Two isolated roots on level 1, one linked copy on level 2.
BenyaminiStructure make_s0() {
  std::vector<Level> levels{
      Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}, Cell{"c2", CellKind::Isolated, {"q"}}}},
      Level{2, {Cell{"c3", CellKind::Isolated, {"r"}}}},
  };
  return BenyaminiStructure(Rat(3, 2), levels, {Link{1, 2, {{"q", "r"}}}});
}

// One perfect cell with three sample points, no links.
BenyaminiStructure make_s1() {
  std::vector<Level> levels{Level{1, {Cell{"c1", CellKind::Perfect, {"u1", "u2", "u3"}}}}};
  return BenyaminiStructure(Rat(3, 2), levels, {});
}

// a (level 1) <-> b (level 2) <-> c (level 3), closed as a clique.
BenyaminiStructure make_chain3() {
  std::vector<Level> levels{
      Level{1, {Cell{"c1", CellKind::Isolated, {"a"}}}},
      Level{2, {Cell{"c2", CellKind::Isolated, {"b"}}}},
      Level{3, {Cell{"c3", CellKind::Isolated, {"c"}}}},
  };
  std::vector<Link> links{Link{1, 2, {{"a", "b"}}}, Link{1, 3, {{"a", "c"}}}, Link{2, 3, {{"b", "c"}}}};
  return BenyaminiStructure(Rat(3, 2), levels, links);
}

}  // namespace

TEST_CASE("free points") {
  const auto s0 = make_s0();
  const auto fp = s0.free_points();
  REQUIRE(fp.size() == 2);
  CHECK(fp[0] == std::pair<std::string, int>{"p", 1});
  CHECK(fp[1] == std::pair<std::string, int>{"q", 1});

  const auto s1 = make_s1();
  CHECK(s1.free_points().size() == 3);

  const auto chain = make_chain3();
  REQUIRE(chain.free_points().size() == 1);
  CHECK(chain.free_points()[0].first == "a");
}

TEST_CASE("expand forces the C-power rule") {
  const auto s0 = make_s0();
  const LatticeVector x = canonical_vector(s0, {{"p", Rat(1)}, {"q", Rat(3, 4)}});
  const FullFunction f = expand(s0, x);
  CHECK(f.values.at("p") == 1);
  CHECK(f.values.at("q") == Rat(3, 4));
  CHECK(f.values.at("r") == Rat(1, 2));

  const FullFunction zero = expand(s0, zero_vector(s0));
  for (const auto& [p, v] : zero.values) CHECK(v == 0);

  const auto chain = make_chain3();
  const FullFunction g = expand(chain, canonical_vector(chain, {{"a", Rat(1)}}));
  CHECK(g.values.at("b") == Rat(2, 3));
  CHECK(g.values.at("c") == Rat(4, 9));
}

TEST_CASE("consistency checking") {
  const auto s0 = make_s0();
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) CHECK(check_consistent(s0, expand(s0, gen_vector(s0, rng))));

  FullFunction bad;
  bad.values = {{"p", Rat(1)}, {"q", Rat(1)}, {"r", Rat(1)}};
  CHECK_FALSE(check_consistent(s0, bad));

  const auto s1 = make_s1();
  FullFunction any;
  any.values = {{"u1", Rat(5)}, {"u2", Rat(-1)}, {"u3", Rat(0)}};
  CHECK(check_consistent(s1, any));
}

TEST_CASE("base norm") {
  const auto s0 = make_s0();
  CHECK(base_norm(s0, canonical_vector(s0, {{"p", Rat(1)}, {"q", Rat(3, 4)}})) == 1);
  CHECK(base_norm(s0, zero_vector(s0)) == 0);
  CHECK(base_norm(s0, canonical_vector(s0, {{"q", Rat(1)}})) == 1);
}

TEST_CASE("base norm lattice and AM identities") {
  const auto s0 = make_s0();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const LatticeVector x = gen_vector(s0, rng);
    const LatticeVector y = gen_vector(s0, rng);
    CHECK(base_norm(s0, lattice_abs(x)) == base_norm(s0, x));
    const LatticeVector ax = lattice_abs(x);
    const LatticeVector ay = lattice_abs(y);
    CHECK(base_norm(s0, lattice_join(ax, ay)) == std::max(base_norm(s0, ax), base_norm(s0, ay)));
  }
}

TEST_CASE("lattice operations") {
  const auto s0 = make_s0();
  const LatticeVector e1 = canonical_vector(s0, {{"p", Rat(1)}});
  const LatticeVector e2 = canonical_vector(s0, {{"q", Rat(1)}});
  CHECK(lattice_join(e1, e2) == canonical_vector(s0, {{"p", Rat(1)}, {"q", Rat(1)}}));
  CHECK(lattice_join(e1, e1) == e1);
  const LatticeVector a = canonical_vector(s0, {{"p", Rat(-1)}, {"q", Rat(2)}});
  const LatticeVector b = canonical_vector(s0, {{"p", Rat(1)}, {"q", Rat(1)}});
  CHECK(lattice_meet(a, b) == canonical_vector(s0, {{"p", Rat(-1)}, {"q", Rat(1)}}));
}

TEST_CASE("atoms") {
  const auto s0 = make_s0();
  const auto atom_list = atoms(s0);
  REQUIRE(atom_list.size() == 2);
  CHECK(atom_list[0].point == "p");
  CHECK(atom_list[0].index == 1);
  CHECK(atom_list[1].point == "q");
  CHECK(atom_list[1].index == 2);
  CHECK(atom_list[1].theta == unit_vector(s0, "q"));

  CHECK(atoms(make_s1()).empty());

  // Isolated root copied into a perfect cell is not hereditarily isolated.
  std::vector<Level> levels{
      Level{1, {Cell{"c1", CellKind::Isolated, {"u"}}}},
      Level{2, {Cell{"c2", CellKind::Perfect, {"v", "w"}}}},
  };
  BenyaminiStructure mixed(Rat(3, 2), levels, {Link{1, 2, {{"u", "v"}}}});
  CHECK(atoms(mixed).empty());
  CHECK(mixed.free_points().size() == 2);  // u and w
}

TEST_CASE("structure validation rejects bad input") {
  std::vector<Level> one{Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}}}};
  CHECK_THROWS_AS(BenyaminiStructure(Rat(5, 2), one, {}), StructureError);
  CHECK_THROWS_AS(BenyaminiStructure(Rat(1), one, {}), StructureError);

  std::vector<Level> dup{Level{1, {Cell{"c1", CellKind::Isolated, {"p"}}, Cell{"c2", CellKind::Isolated, {"p"}}}}};
  CHECK_THROWS_AS(BenyaminiStructure(Rat(3, 2), dup, {}), StructureError);

  std::vector<Level> perf{Level{1, {Cell{"c1", CellKind::Perfect, {"p"}}}}};
  CHECK_THROWS_AS(BenyaminiStructure(Rat(3, 2), perf, {}), StructureError);

  // Chain that is not transitively closed.
  std::vector<Level> lv{
      Level{1, {Cell{"c1", CellKind::Isolated, {"a"}}}},
      Level{2, {Cell{"c2", CellKind::Isolated, {"b"}}}},
      Level{3, {Cell{"c3", CellKind::Isolated, {"c"}}}},
  };
  std::vector<Link> open_chain{Link{1, 2, {{"a", "b"}}}, Link{2, 3, {{"b", "c"}}}};
  CHECK_THROWS_AS(BenyaminiStructure(Rat(3, 2), lv, open_chain), StructureError);

  // Perfect root copied into an isolated cell is rejected.
  std::vector<Level> pl{
      Level{1, {Cell{"c1", CellKind::Perfect, {"x", "y"}}}},
      Level{2, {Cell{"c2", CellKind::Isolated, {"z"}}}},
  };
  CHECK_THROWS_AS(BenyaminiStructure(Rat(3, 2), pl, {Link{1, 2, {{"x", "z"}}}}), StructureError);
}

TEST_CASE("detect_linking") {
  const std::vector<std::pair<std::string, int>> pts{{"q", 1}, {"r", 2}};
  const Rat C(3, 2);

  SUBCASE("recovers a single link") {
    const auto links = detect_linking(pts, C, {Relation{"r", "q", Rat(2, 3)}});
    REQUIRE(links.size() == 1);
    CHECK(links[0].lower_level == 1);
    CHECK(links[0].upper_level == 2);
    REQUIRE(links[0].pairs.size() == 1);
    CHECK(links[0].pairs[0] == std::pair<std::string, std::string>{"q", "r"});
  }

  SUBCASE("no relations, no links") { CHECK(detect_linking(pts, C, {}).empty()); }

  SUBCASE("non-C-power ratio is a violation") {
    CHECK_THROWS_AS(detect_linking(pts, C, {Relation{"r", "q", Rat(1, 2)}}), LinkingError);
  }

  SUBCASE("transitive chains are closed") {
    const std::vector<std::pair<std::string, int>> pts3{{"a", 1}, {"b", 2}, {"c", 4}};
    const auto links = detect_linking(
        pts3, C, {Relation{"b", "a", Rat(2, 3)}, Relation{"c", "b", pow_rat(C, -2)}});
    // The pair (a, c) is forced by transitivity even though never stated.
    CHECK(links.size() == 3);
  }

  SUBCASE("same-level forced ratios violate separation") {
    const std::vector<std::pair<std::string, int>> flat{{"a", 1}, {"b", 1}};
    CHECK_THROWS_AS(detect_linking(flat, C, {Relation{"a", "b", Rat(1)}}), LinkingError);
  }

  SUBCASE("zero ratios force degenerate lattices") {
    CHECK_THROWS_AS(detect_linking(pts, C, {Relation{"r", "q", Rat(0)}}), LinkingError);
  }
}

TEST_CASE("tautological relations recover the link set") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 9ULL}) {
    GenParams p;
    p.levels = 3;
    p.cells_per_level = 2;
    p.link_density_permille = 500;
    p.perfect_permille = 300;
    p.seed = seed;
    const BenyaminiStructure s = gen_structure(p);
    const auto detected = detect_linking(leveled_points(s), s.C(), tautological_relations(s));
    std::size_t total_pairs = 0, detected_pairs = 0;
    for (const auto& l : s.links()) total_pairs += l.pairs.size();
    for (const auto& l : detected) detected_pairs += l.pairs.size();
    CHECK(total_pairs == detected_pairs);
  }
}

TEST_CASE("expand then restrict is the identity") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed : {4ULL, 8ULL}) {
    GenParams p;
    p.levels = 2;
    p.cells_per_level = 3;
    p.link_density_permille = 400;
    p.seed = seed;
    const BenyaminiStructure s = gen_structure(p);
    for (int k = 0; k < 50; ++k) {
      const LatticeVector x = gen_vector(s, rng);
      CHECK(restrict_to_free(s, expand(s, x)) == x);
    }
  }
}
