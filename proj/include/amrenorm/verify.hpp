#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "amrenorm/dual.hpp"
#include "amrenorm/extension.hpp"
#include "amrenorm/generate.hpp"
#include "amrenorm/isometry.hpp"
#include "amrenorm/json_io.hpp"
#include "amrenorm/renorm.hpp"
#include "amrenorm/structure.hpp"
#include "amrenorm/transform.hpp"

namespace amrenorm {

struct CheckResult {
  std::string id;
  std::string property;
  bool pass = true;
  Json witness = Json::object();
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckResult> checks;
  int passed = 0;
  int failed = 0;

  void add(CheckResult r) {
    (r.pass ? passed : failed)++;
    checks.push_back(std::move(r));
  }
  bool ok() const { return failed == 0; }
};

inline Json report_to_json(const VerificationReport& rep) {
  Json j;
  j["suite"] = rep.suite;
  j["checks"] = Json::array();
  for (const auto& c : rep.checks) {
    Json jc;
    jc["id"] = c.id;
    jc["property"] = c.property;
    jc["status"] = c.pass ? "pass" : "fail";
    if (!c.witness.empty()) jc["witness"] = c.witness;
    j["checks"].push_back(jc);
  }
  j["passed"] = rep.passed;
  j["failed"] = rep.failed;
  return j;
}

struct VerifyOptions {
  std::uint64_t seed = 1;
  int scale = 100;  // percent of the full check counts
  unsigned workers = 1;
  std::optional<BenyaminiStructure> structure;  // run per-structure checks on this instance only
  std::optional<NormSpec> norm;                 // with `structure`: a norm to inspect
};

namespace checks {

inline int scaled(int full, int scale) { return std::max(1, full * scale / 100); }

// ---- model -----------------------------------------------------------------

inline CheckResult expand_restrict_identity(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                            int vectors_per_instance) {
  CheckResult r{"model/expand-restrict", "restricting the expansion to the free points returns the vector"};
  std::mt19937_64 rng(seed);
  for (const auto& s : instances) {
    for (int k = 0; k < vectors_per_instance; ++k) {
      const LatticeVector x = gen_vector(s, rng);
      if (restrict_to_free(s, expand(s, x)) != x) {
        r.pass = false;
        r.witness["vector"] = vector_to_json(x)["coords"];
        return r;
      }
    }
  }
  return r;
}

inline CheckResult expand_consistency(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                      int total_vectors) {
  CheckResult r{"model/expand-consistent", "every expansion satisfies all link relations"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_vectors; ++k) {
    const auto& s = instances[k % instances.size()];
    const LatticeVector x = gen_vector(s, rng);
    if (!check_consistent(s, expand(s, x))) {
      r.pass = false;
      r.witness["vector"] = vector_to_json(x)["coords"];
      return r;
    }
  }
  return r;
}

inline CheckResult base_norm_lattice_axioms(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                            int total_vectors) {
  CheckResult r{"model/base-norm-lattice", "base norm is absolute and monotone on the positive cone"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_vectors; ++k) {
    const auto& s = instances[k % instances.size()];
    const LatticeVector x = gen_vector(s, rng);
    if (base_norm(s, lattice_abs(x)) != base_norm(s, x)) {
      r.pass = false;
      r.witness["reason"] = "norm of |x| differs from norm of x";
      return r;
    }
    const LatticeVector y = lattice_join(lattice_abs(x), gen_positive_vector(s, rng));
    if (base_norm(s, x) > base_norm(s, y)) {
      r.pass = false;
      r.witness["reason"] = "monotonicity failed";
      return r;
    }
  }
  return r;
}

inline CheckResult base_norm_am_identity(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                         int total_pairs) {
  CheckResult r{"model/base-norm-am", "base norm of a join of positive vectors is the max of the norms"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_pairs; ++k) {
    const auto& s = instances[k % instances.size()];
    const LatticeVector x = gen_positive_vector(s, rng);
    const LatticeVector y = gen_positive_vector(s, rng);
    if (base_norm(s, lattice_join(x, y)) != std::max(base_norm(s, x), base_norm(s, y))) {
      r.pass = false;
      r.witness["x"] = vector_to_json(x)["coords"];
      r.witness["y"] = vector_to_json(y)["coords"];
      return r;
    }
  }
  return r;
}

inline CheckResult linking_recovery(const std::vector<BenyaminiStructure>& instances) {
  CheckResult r{"model/detect-linking-recovery",
                "the tautological relation family of a structure recovers exactly its link set"};
  for (const auto& s : instances) {
    std::vector<Link> detected;
    try {
      detected = detect_linking(leveled_points(s), s.C(), tautological_relations(s));
    } catch (const LinkingError& e) {
      r.pass = false;
      r.witness["error"] = e.what();
      return r;
    }
    auto canon = [](const std::vector<Link>& links) {
      std::vector<std::tuple<int, int, std::vector<std::pair<std::string, std::string>>>> c;
      for (const auto& l : links) {
        auto pairs = l.pairs;
        std::sort(pairs.begin(), pairs.end());
        c.push_back({l.lower_level, l.upper_level, pairs});
      }
      std::sort(c.begin(), c.end());
      return c;
    };
    if (canon(detected) != canon(s.links())) {
      r.pass = false;
      r.witness["reason"] = "recovered link set differs";
      return r;
    }
  }
  return r;
}

// ---- extension ---------------------------------------------------------------

/// Random partial function on a random level range, consistent by
/// construction (expand a random vector and restrict).
inline PartialFunction random_partial(const BenyaminiStructure& s, std::mt19937_64& rng, bool positive,
                                      const std::optional<LatticeVector>& cap = {}) {
  LatticeVector x = positive ? gen_positive_vector(s, rng) : gen_vector(s, rng);
  if (cap) x = lattice_meet(x, *cap);
  const FullFunction full = expand(s, x);
  PartialFunction pf;
  const int top = s.top_level();
  pf.from_level = 1 + static_cast<int>(detail::rnd_below(rng, static_cast<std::uint64_t>(top)));
  pf.to_level =
      pf.from_level + static_cast<int>(detail::rnd_below(rng, static_cast<std::uint64_t>(top - pf.from_level + 1)));
  for (const auto& p : s.points()) {
    const int lvl = s.info(p).level;
    if (lvl >= pf.from_level && lvl <= pf.to_level) pf.values[p] = full.values.at(p);
  }
  return pf;
}

inline CheckResult extension_bounds_and_consistency(const std::vector<BenyaminiStructure>& instances,
                                                    std::uint64_t seed, int total_problems) {
  CheckResult r{"extension/sup-bounds",
                "extensions are consistent and obey sup_j <= max_i C^(i-j) sup_i outside the range"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_problems; ++k) {
    const auto& s = instances[k % instances.size()];
    const PartialFunction pf = random_partial(s, rng, false);
    try {
      const FullFunction out = extend_range(s, pf);  // asserts the bounds internally
      if (!check_consistent(s, out)) {
        r.pass = false;
        r.witness["reason"] = "extension output inconsistent";
        return r;
      }
      if (pf.from_level == 1) {
        const FullFunction down = extend_down(s, pf);
        if (!check_consistent(s, down)) {
          r.pass = false;
          r.witness["reason"] = "extend_down output inconsistent";
          return r;
        }
      }
      const PartialFunction up = extend_up(s, pf);
      for (const auto& [p, v] : pf.values)
        if (up.values.at(p) != v) {
          r.pass = false;
          r.witness["reason"] = "extend_up does not agree with its input";
          return r;
        }
    } catch (const std::logic_error& e) {
      r.pass = false;
      r.witness["error"] = e.what();
      return r;
    }
  }
  return r;
}

inline CheckResult extension_domination(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                        int total_problems) {
  CheckResult r{"extension/domination", "dominated extensions satisfy 0 <= out <= y (and z <= out <= y two-sided)"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_problems; ++k) {
    const auto& s = instances[k % instances.size()];
    const LatticeVector y = gen_positive_vector(s, rng);
    const PartialFunction pf = random_partial(s, rng, true, y);
    try {
      const FullFunction out = extend_range(s, pf, y);
      const FullFunction yfull = expand(s, y);
      for (const auto& [p, v] : out.values)
        if (v < 0 || v > yfull.values.at(p)) {
          r.pass = false;
          r.witness["point"] = p;
          return r;
        }
      // Two-sided: z = 0 lower bound is always compatible here.
      const FullFunction out2 = extend_range(s, pf, y, zero_vector(s));
      for (const auto& [p, v] : out2.values)
        if (v < 0 || v > yfull.values.at(p)) {
          r.pass = false;
          r.witness["point"] = p;
          return r;
        }
    } catch (const std::logic_error& e) {
      r.pass = false;
      r.witness["error"] = e.what();
      return r;
    }
  }
  return r;
}

inline CheckResult extension_projection(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                        int total_problems) {
  CheckResult r{"extension/projection", "extending an already-full consistent function returns it unchanged"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_problems; ++k) {
    const auto& s = instances[k % instances.size()];
    const FullFunction full = expand(s, gen_vector(s, rng));
    PartialFunction pf{1, s.top_level(), full.values};
    if (extend_range(s, pf).values != full.values) {
      r.pass = false;
      return r;
    }
  }
  return r;
}

inline CheckResult bump_conclusions(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                    int total_configs) {
  CheckResult r{"extension/bump-conclusions",
                "two-point bumps hit their prescribed values and stay under the level-wise caps"};
  std::mt19937_64 rng(seed);
  int done = 0;
  for (int k = 0; done < total_configs; ++k) {
    const auto& s = instances[k % instances.size()];
    const auto& fp = s.free_points();
    if (fp.size() < 2) {
      if (instances.size() == 1) break;
      continue;
    }
    // Pick fresh free points t (lower level) and s2.
    const auto& [t, mt] = fp[detail::rnd_below(rng, fp.size())];
    std::vector<std::pair<std::string, int>> uppers;
    for (const auto& q : fp)
      if (q.second >= mt && q.first != t) uppers.push_back(q);
    if (uppers.empty()) continue;
    const auto& [s2, ns] = uppers[detail::rnd_below(rng, uppers.size())];
    std::set<std::string> U{t}, V{s2};
    for (const auto& [q, lq] : fp) {
      if (q == t || q == s2) continue;
      if (lq == mt && detail::rnd_chance(rng, 1, 2) && mt != ns) U.insert(q);
      else if (lq == ns && detail::rnd_chance(rng, 1, 2)) V.insert(q);
    }
    const Rat alpha(detail::rnd_below(rng, 5), 1 + detail::rnd_below(rng, 3));
    const Rat beta(detail::rnd_below(rng, 5), 1 + detail::rnd_below(rng, 3));
    try {
      const FullFunction bump = two_point_bump(s, t, s2, U, V, alpha, beta);
      if (!check_consistent(s, bump) || bump.values.at(t) != alpha || bump.values.at(s2) != beta) {
        r.pass = false;
        r.witness["t"] = t;
        r.witness["s2"] = s2;
        return r;
      }
      ++done;
    } catch (const std::logic_error& e) {
      r.pass = false;
      r.witness["error"] = e.what();
      return r;
    }
  }
  return r;
}

// ---- transform ---------------------------------------------------------------

inline CheckResult transform_distortion(std::uint64_t seed, int total_models) {
  CheckResult r{"transform/distortion",
                "every nonzero generator's image norm sits in [sup x, C sup x]; outputs validate"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_models; ++k) {
    const Rat C = pick_constants(rng).C;
    const SublatticeModel m = gen_sublattice(seed * 7919 + static_cast<std::uint64_t>(k), C);
    TransformResult res = transform(m, C);
    for (std::size_t g = 0; g < m.generators.size(); ++g) {
      const auto& ratio = res.report.distortion_ratios[g];
      if (!ratio) continue;
      if (*ratio < 1 || *ratio > C) {
        r.pass = false;
        r.witness["generator"] = static_cast<int>(g);
        r.witness["ratio"] = rat_str(*ratio);
        return r;
      }
    }
    // Output linking is exactly what the images force (condition-4 style).
    try {
      detect_linking(leveled_points(res.structure), C, tautological_relations(res.structure));
    } catch (const LinkingError& e) {
      r.pass = false;
      r.witness["error"] = e.what();
      return r;
    }
  }
  return r;
}

inline CheckResult transform_determinism(std::uint64_t seed, int total_models) {
  CheckResult r{"transform/determinism", "the pipeline is a pure function of its input"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_models; ++k) {
    const Rat C = pick_constants(rng).C;
    const SublatticeModel m = gen_sublattice(seed * 104729 + static_cast<std::uint64_t>(k), C);
    const TransformResult a = transform(m, C);
    const TransformResult b = transform(m, C);
    if (structure_to_json(a.structure).dump() != structure_to_json(b.structure).dump() ||
        transform_report_to_json(a.report).dump() != transform_report_to_json(b.report).dump()) {
      r.pass = false;
      return r;
    }
  }
  return r;
}

inline CheckResult transform_join_compatibility(std::uint64_t seed, int total_models) {
  CheckResult r{"transform/join-compatibility", "the transform maps joins of generators to joins of their images"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_models; ++k) {
    const Rat C = pick_constants(rng).C;
    const SublatticeModel m = gen_sublattice(seed * 15485863 + static_cast<std::uint64_t>(k), C);
    const TransformResult res = transform(m, C);
    auto value = [](const std::map<std::string, Rat>& g, const std::string& p) {
      auto it = g.find(p);
      return it == g.end() ? Rat(0) : it->second;
    };
    for (std::size_t g1 = 0; g1 < m.generators.size(); ++g1) {
      for (std::size_t g2 = g1 + 1; g2 < m.generators.size(); ++g2) {
        std::map<std::string, Rat> join;
        for (const auto& p : m.H) join[p] = std::max(value(m.generators[g1], p), value(m.generators[g2], p));
        const LatticeVector img = transform_apply(res, join);
        const LatticeVector expected = lattice_join(res.generator_images[g1], res.generator_images[g2]);
        if (img != expected) {
          r.pass = false;
          r.witness["g1"] = static_cast<int>(g1);
          r.witness["g2"] = static_cast<int>(g2);
          return r;
        }
      }
    }
  }
  return r;
}

// ---- renorm -------------------------------------------------------------------

struct RenormInstance {
  BenyaminiStructure structure;
  RenormConstants consts;
  WeightScheme scheme;
  NormSpec spec;
  std::size_t atom_count;
};

inline Rat compatible_c(const Rat& C, std::mt19937_64& rng) {
  static const char* candidates[] = {"6/5", "11/10", "21/20", "101/100"};
  std::vector<Rat> valid;
  for (const char* text : candidates) {
    const Rat c = parse_rat(text);
    if (c * c * c < C) valid.push_back(c);
  }
  if (valid.empty()) throw RenormError("no admissible c below the cube root of " + rat_str(C));
  return valid[detail::rnd_below(rng, valid.size())];
}

inline RenormInstance make_renorm_instance(BenyaminiStructure s, std::mt19937_64& rng, std::uint64_t seed) {
  RenormConstants consts{s.C(), compatible_c(s.C(), rng)};
  consts.validate();
  WeightScheme scheme = assign_weights(s, consts, seed % 5);
  NormSpec spec = build_renorm(s, scheme, consts);
  const std::size_t n_atoms = atoms(s).size();
  return RenormInstance{std::move(s), std::move(consts), std::move(scheme), std::move(spec), n_atoms};
}

/// Instances covering no-atom, one-atom, and multi-atom cases.
inline std::vector<RenormInstance> renorm_instances(std::uint64_t seed, int count) {
  std::vector<RenormInstance> out;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    BenyaminiStructure s = k % 3 == 0   ? gen_no_atom_structure(seed + static_cast<std::uint64_t>(k))
                           : k % 3 == 1 ? gen_one_atom_structure(seed + static_cast<std::uint64_t>(k))
                                        : gen_atomic_structure(seed + static_cast<std::uint64_t>(k), 2, 6);
    out.push_back(make_renorm_instance(std::move(s), rng, seed + static_cast<std::uint64_t>(k)));
  }
  return out;
}

inline CheckResult renorm_sandwich(const std::vector<RenormInstance>& instances, std::uint64_t seed,
                                   int vectors_per_instance) {
  CheckResult r{"renorm/sandwich", "base <= renorm <= c^2 base, and renorm <= c base with at most one atom"};
  std::mt19937_64 rng(seed);
  for (const auto& inst : instances) {
    const Rat c2 = inst.consts.c * inst.consts.c;
    for (int k = 0; k < vectors_per_instance; ++k) {
      const LatticeVector x = gen_vector(inst.structure, rng);
      const Rat base = base_norm(inst.structure, x);
      const Rat re = inst.spec.value(x);
      const Rat cap = inst.atom_count <= 1 ? Rat(inst.consts.c * base) : Rat(c2 * base);
      if (re < base || re > cap) {
        r.pass = false;
        r.witness["x"] = vector_to_json(x)["coords"];
        r.witness["base"] = rat_str(base);
        r.witness["renorm"] = rat_str(re);
        return r;
      }
    }
  }
  return r;
}

inline CheckResult renorm_am_identity(const std::vector<RenormInstance>& instances, std::uint64_t seed,
                                      int pairs_per_instance) {
  CheckResult r{"renorm/am-identity",
                "with at most one atom the renorm is an AM norm; with two or more a join witness breaks it"};
  std::mt19937_64 rng(seed);
  for (const auto& inst : instances) {
    if (inst.atom_count <= 1) {
      for (int k = 0; k < pairs_per_instance; ++k) {
        const LatticeVector x = gen_positive_vector(inst.structure, rng);
        const LatticeVector y = gen_positive_vector(inst.structure, rng);
        if (inst.spec.value(lattice_join(x, y)) != std::max(inst.spec.value(x), inst.spec.value(y))) {
          r.pass = false;
          r.witness["x"] = vector_to_json(x)["coords"];
          r.witness["y"] = vector_to_json(y)["coords"];
          return r;
        }
      }
    } else {
      // x = e_i / mu_i, y = e_j / mu_j: the join picks up the diagonal face.
      const auto atom_list = atoms(inst.structure);
      const auto& ai = atom_list[0];
      const auto& aj = atom_list[1];
      const LatticeVector x =
          vector_scale(1 / inst.scheme.mu(ai.point), unit_vector(inst.structure, ai.point));
      const LatticeVector y =
          vector_scale(1 / inst.scheme.mu(aj.point), unit_vector(inst.structure, aj.point));
      const Rat joined = inst.spec.value(lattice_join(x, y));
      const Rat max_norm = std::max(inst.spec.value(x), inst.spec.value(y));
      const OctagonParams oct = make_octagon(
          inst.consts.c, pair_rank(static_cast<long long>(ai.index), static_cast<long long>(aj.index)));
      if (!(joined > max_norm) || max_norm != 1 || joined != oct.a + oct.b) {
        r.pass = false;
        r.witness["joined"] = rat_str(joined);
        r.witness["max"] = rat_str(max_norm);
        return r;
      }
    }
  }
  return r;
}

inline CheckResult renorm_lattice_axioms(const std::vector<RenormInstance>& instances, std::uint64_t seed,
                                         int vectors_per_instance) {
  CheckResult r{"renorm/lattice-axioms", "the renorm is absolute and monotone on the positive cone"};
  std::mt19937_64 rng(seed);
  for (const auto& inst : instances) {
    for (int k = 0; k < vectors_per_instance; ++k) {
      const LatticeVector x = gen_vector(inst.structure, rng);
      if (inst.spec.value(lattice_abs(x)) != inst.spec.value(x)) {
        r.pass = false;
        return r;
      }
      const LatticeVector y = lattice_join(lattice_abs(x), gen_positive_vector(inst.structure, rng));
      if (inst.spec.value(x) > inst.spec.value(y)) {
        r.pass = false;
        return r;
      }
    }
  }
  return r;
}

inline CheckResult renorm_two_atom_restriction(const std::vector<RenormInstance>& instances, std::uint64_t seed,
                                               int samples_per_pair) {
  CheckResult r{"renorm/two-atom-restriction",
                "on a two-atom span the renorm is exactly the pair's octagon gauge of the weighted coordinates"};
  std::mt19937_64 rng(seed);
  for (const auto& inst : instances) {
    if (inst.atom_count < 2) continue;
    const auto atom_list = atoms(inst.structure);
    for (std::size_t i = 0; i < atom_list.size(); ++i) {
      for (std::size_t j = i + 1; j < atom_list.size(); ++j) {
        const OctagonParams oct =
            make_octagon(inst.consts.c, pair_rank(static_cast<long long>(atom_list[i].index),
                                                  static_cast<long long>(atom_list[j].index)));
        for (int k = 0; k < samples_per_pair; ++k) {
          const Rat alpha(static_cast<long long>(detail::rnd_below(rng, 9)) - 4, 1 + detail::rnd_below(rng, 3));
          const Rat beta(static_cast<long long>(detail::rnd_below(rng, 9)) - 4, 1 + detail::rnd_below(rng, 3));
          LatticeVector x = zero_vector(inst.structure);
          x.coords.at(atom_list[i].point) = alpha / inst.scheme.mu(atom_list[i].point);
          x.coords.at(atom_list[j].point) = beta / inst.scheme.mu(atom_list[j].point);
          if (inst.spec.value(x) != octagon_norm(alpha, beta, oct)) {
            r.pass = false;
            r.witness["alpha"] = rat_str(alpha);
            r.witness["beta"] = rat_str(beta);
            return r;
          }
        }
      }
    }
  }
  return r;
}

/// Independent gauge oracle: supporting lines of the eight edges of the
/// vertex polygon.
inline Rat octagon_gauge_oracle(const Rat& alpha, const Rat& beta, const OctagonParams& p) {
  const std::pair<Rat, Rat> v[8] = {{p.v1, Rat(1)},  {Rat(1), p.v2},  {Rat(1), -p.v2},  {p.v1, Rat(-1)},
                                    {-p.v1, Rat(-1)}, {Rat(-1), -p.v2}, {Rat(-1), p.v2}, {-p.v1, Rat(1)}};
  Rat best(0);
  for (int e = 0; e < 8; ++e) {
    const auto& [x1, y1] = v[e];
    const auto& [x2, y2] = v[(e + 1) % 8];
    const Rat det = x1 * y2 - x2 * y1;
    // Line a x + b y = 1 through both vertices; det != 0 because 0 is interior.
    const Rat a = (y2 - y1) / det;
    const Rat b = (x1 - x2) / det;
    best = std::max(best, Rat(a * alpha + b * beta));
  }
  return best;
}

inline CheckResult gauge_vertex_agreement(const Rat& c, long long rank_lo, long long rank_hi, std::uint64_t seed,
                                          int rays_per_rank) {
  CheckResult r{"renorm/gauge-vertex-agreement",
                "the closed-form gauge agrees with the vertex-polygon gauge; vertices have gauge exactly 1"};
  std::mt19937_64 rng(seed);
  for (long long rank = rank_lo; rank <= rank_hi; ++rank) {
    const OctagonParams p = make_octagon(c, rank);
    const std::pair<Rat, Rat> vertices[4] = {{p.v1, Rat(1)}, {Rat(1), p.v2}, {-p.v1, Rat(1)}, {Rat(1), -p.v2}};
    for (const auto& [a, b] : vertices) {
      if (octagon_norm(a, b, p) != 1 || octagon_gauge_oracle(a, b, p) != 1) {
        r.pass = false;
        r.witness["rank"] = static_cast<int>(rank);
        return r;
      }
    }
    for (int k = 0; k < rays_per_rank; ++k) {
      const Rat alpha(static_cast<long long>(detail::rnd_below(rng, 19)) - 9, 1 + detail::rnd_below(rng, 4));
      const Rat beta(static_cast<long long>(detail::rnd_below(rng, 19)) - 9, 1 + detail::rnd_below(rng, 4));
      const Rat direct = octagon_norm(alpha, beta, p);
      if (direct != octagon_gauge_oracle(alpha, beta, p)) {
        r.pass = false;
        r.witness["rank"] = static_cast<int>(rank);
        r.witness["alpha"] = rat_str(alpha);
        r.witness["beta"] = rat_str(beta);
        return r;
      }
      // Gauge-1 points lie on the boundary and scale exactly.
      if (direct != 0) {
        const Rat g2 = octagon_norm(alpha / direct, beta / direct, p);
        if (g2 != 1) {
          r.pass = false;
          r.witness["rank"] = static_cast<int>(rank);
          return r;
        }
      }
    }
  }
  return r;
}

inline CheckResult octagon_properties_check(const std::vector<Rat>& cs, long long rank_hi, long long pair_cap) {
  CheckResult r{"renorm/octagon-properties",
                "sup equivalence, pairwise distinguishability, gamma tail bounds, corner flatness"};
  for (const auto& c : cs) {
    const OctagonPropertiesReport rep =
        check_octagon_properties(c, 1, rank_hi, {Rat(101, 100), Rat(21, 20), Rat(11, 10)}, pair_cap);
    if (!rep.all_ok()) {
      r.pass = false;
      r.witness["c"] = rat_str(c);
      r.witness["sup_equivalence"] = rep.sup_equivalence_ok;
      r.witness["pairwise_distinct"] = rep.pairwise_distinct_ok;
      r.witness["corner_flatness"] = rep.corner_flatness_ok;
      return r;
    }
  }
  return r;
}

// ---- dual ---------------------------------------------------------------------

inline Functional random_functional(const BenyaminiStructure& s, std::mt19937_64& rng, bool on_all_points) {
  Functional f;
  if (on_all_points) {
    for (const auto& p : s.points())
      if (detail::rnd_chance(rng, 2, 3))
        f.coords[p] = Rat(static_cast<long long>(detail::rnd_below(rng, 13)) - 6, 1 + detail::rnd_below(rng, 4));
  } else {
    for (const auto& [p, lvl] : s.free_points())
      if (detail::rnd_chance(rng, 2, 3))
        f.coords[p] = Rat(static_cast<long long>(detail::rnd_below(rng, 13)) - 6, 1 + detail::rnd_below(rng, 4));
  }
  return f;
}

inline CheckResult dual_point_mass(const std::vector<RenormInstance>& instances) {
  CheckResult r{"dual/point-mass", "the renormed dual norm of weight(t) * delta_t is exactly 1 at every free point"};
  for (const auto& inst : instances) {
    for (const auto& [p, lvl] : inst.structure.free_points()) {
      Functional f;
      f.coords[p] = inst.spec.point_weight.at(p);
      if (dual_norm_renorm(inst.spec, f) != 1) {
        r.pass = false;
        r.witness["point"] = p;
        return r;
      }
    }
  }
  return r;
}

inline CheckResult dual_reduction_properties(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                             int total_functionals) {
  CheckResult r{"dual/reduction",
                "reduction preserves the action, never increases total variation, and is order independent"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_functionals; ++k) {
    const auto& s = instances[k % instances.size()];
    const Functional f = random_functional(s, rng, true);
    const Functional red = reduce_measure(s, f);  // self-checks action on 20 vectors
    if (!is_reduced(s, red)) {
      r.pass = false;
      r.witness["reason"] = "reduction left mass off K'";
      return r;
    }
    if (total_variation(red) > total_variation(f)) {
      r.pass = false;
      r.witness["reason"] = "total variation increased";
      return r;
    }
    bool moved_mass = false;
    for (const auto& [p, coeff] : f.coords)
      if (coeff != 0 && !s.is_free(p)) moved_mass = true;
    if (moved_mass && total_variation(red) >= total_variation(f)) {
      // Equality is possible only if cancellation is absent AND factors were
      // 1, which cannot happen across levels; strict decrease is required.
      r.pass = false;
      r.witness["reason"] = "moved mass did not strictly decrease total variation";
      return r;
    }
    if (reduce_measure_stepwise(s, f) != red) {
      r.pass = false;
      r.witness["reason"] = "reduction orders disagree";
      return r;
    }
  }
  return r;
}

inline CheckResult dual_l1_lp_agreement(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                        int total_functionals) {
  CheckResult r{"dual/l1-lp-agreement", "the ell^1 norm of a reduced functional equals its LP operator norm"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_functionals; ++k) {
    const auto& s = instances[k % instances.size()];
    const Functional f = reduce_measure(s, random_functional(s, rng, true));
    if (dual_norm_base(s, f) != dual_norm_base_lp(s, f)) {
      r.pass = false;
      r.witness["functional"] = functional_to_json(f)["coords"];
      return r;
    }
  }
  return r;
}

inline CheckResult dual_positivity(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed,
                                   int total_functionals) {
  CheckResult r{"dual/positivity",
                "a reduced functional is positive on the cone iff its coefficients are nonnegative"};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < total_functionals; ++k) {
    const auto& s = instances[k % instances.size()];
    const Functional f = reduce_measure(s, random_functional(s, rng, false));
    std::string negative_point;
    for (const auto& [p, coeff] : f.coords)
      if (coeff < 0) negative_point = p;
    if (negative_point.empty()) {
      const LatticeVector x = gen_positive_vector(s, rng);
      if (functional_action(s, f, x) < 0) {
        r.pass = false;
        r.witness["reason"] = "nonnegative functional went negative on a positive vector";
        return r;
      }
    } else {
      // The indicator-style witness: the bump concentrated at the negative
      // coefficient's point.
      const FullFunction bump = [&] {
        const int m = s.info(negative_point).level;
        for (const auto& [q, lq] : s.free_points())
          if (q != negative_point && lq >= m)
            return two_point_bump(s, negative_point, q, {negative_point}, {q}, Rat(1), Rat(0));
        std::map<std::string, Rat> roots{{negative_point, Rat(1)}};
        return expand(s, canonical_vector(s, roots));
      }();
      Rat action(0);
      for (const auto& [p, coeff] : f.coords) action += coeff * bump.values.at(p);
      if (action >= 0) {
        r.pass = false;
        r.witness["point"] = negative_point;
        return r;
      }
    }
  }
  return r;
}

// ---- isometry -------------------------------------------------------------------

inline CheckResult isometry_rigidity(const std::vector<RenormInstance>& instances, unsigned workers) {
  CheckResult r{"isometry/rigidity",
                "the renorm of a structure with >= 2 atoms admits only the identity lattice isometry"};
  for (const auto& inst : instances) {
    if (inst.atom_count < 2 || inst.atom_count != inst.structure.free_points().size()) continue;
    const auto group = enumerate_isometries(inst.spec, {8, workers, false});
    if (group.size() != 1 || !group.front().is_identity()) {
      r.pass = false;
      r.witness["group_size"] = static_cast<int>(group.size());
      return r;
    }
  }
  return r;
}

inline CheckResult isometry_full_symmetry(const std::vector<RenormInstance>& instances, unsigned workers) {
  CheckResult r{"isometry/weighted-sup-symmetry",
                "the weighted-sup norm admits every compensated permutation: group size k!"};
  for (const auto& inst : instances) {
    const std::size_t k = inst.structure.free_points().size();
    if (k > 5) continue;
    const NormSpec spec = build_weighted_sup(inst.structure, inst.scheme);
    std::size_t expected = 1;
    for (std::size_t i = 2; i <= k; ++i) expected *= i;
    const auto group = enumerate_isometries(spec, {8, workers, false});
    if (group.size() != expected) {
      r.pass = false;
      r.witness["group_size"] = static_cast<int>(group.size());
      r.witness["expected"] = static_cast<int>(expected);
      return r;
    }
  }
  return r;
}

inline CheckResult isometry_join_preservation(const std::vector<RenormInstance>& instances, std::uint64_t seed,
                                              int total_pairs, unsigned workers) {
  CheckResult r{"isometry/join-preservation", "every enumerated isometry preserves joins exactly"};
  std::mt19937_64 rng(seed);
  for (const auto& inst : instances) {
    if (inst.structure.free_points().size() > 5) continue;
    const auto group = enumerate_isometries(inst.spec, {8, workers, false});
    for (int k = 0; k < total_pairs; ++k) {
      const LatticeVector x = gen_vector(inst.structure, rng);
      const LatticeVector y = gen_vector(inst.structure, rng);
      for (const auto& cand : group) {
        if (apply_candidate(cand, lattice_join(x, y)) !=
            lattice_join(apply_candidate(cand, x), apply_candidate(cand, y))) {
          r.pass = false;
          return r;
        }
      }
    }
  }
  return r;
}

inline CheckResult isometry_prefilter_consistency(const std::vector<RenormInstance>& instances, unsigned workers) {
  CheckResult r{"isometry/prefilter-consistency",
                "enumeration with and without the atom-fixing prefilter returns the same group"};
  for (const auto& inst : instances) {
    if (inst.structure.free_points().size() > 5) continue;
    const auto plain = enumerate_isometries(inst.spec, {8, workers, false});
    const auto filtered = enumerate_isometries(inst.spec, {8, workers, true});
    if (plain != filtered) {
      r.pass = false;
      return r;
    }
  }
  return r;
}

// ---- serialization ---------------------------------------------------------------

inline CheckResult io_round_trip(const std::vector<BenyaminiStructure>& instances, std::uint64_t seed) {
  CheckResult r{"cli/round-trip", "parse(serialize(x)) is the identity for structures, vectors, specs, functionals"};
  std::mt19937_64 rng(seed);
  for (const auto& s : instances) {
    const BenyaminiStructure s2 = structure_from_json(structure_to_json(s));
    if (structure_to_json(s2).dump() != structure_to_json(s).dump()) {
      r.pass = false;
      r.witness["what"] = "structure";
      return r;
    }
    const LatticeVector x = gen_vector(s, rng);
    if (vector_from_json(s, vector_to_json(x)) != x) {
      r.pass = false;
      r.witness["what"] = "vector";
      return r;
    }
    const Functional f = random_functional(s, rng, true);
    if (!(functional_from_json(functional_to_json(f)) == f)) {
      r.pass = false;
      r.witness["what"] = "functional";
      return r;
    }
    RenormConstants consts{s.C(), Rat(21, 20)};
    consts.validate();
    const NormSpec spec = build_renorm(s, assign_weights(s, consts), consts);
    const NormSpec spec2 = norm_spec_from_json(norm_spec_to_json(spec));
    if (norm_spec_to_json(spec2).dump() != norm_spec_to_json(spec).dump()) {
      r.pass = false;
      r.witness["what"] = "norm spec";
      return r;
    }
  }
  return r;
}

inline CheckResult gen_determinism(std::uint64_t seed) {
  CheckResult r{"cli/determinism", "identical parameters and seed produce byte-identical artifacts"};
  GenParams p;
  p.seed = seed;
  p.levels = 3;
  p.cells_per_level = 2;
  p.link_density_permille = 400;
  p.perfect_permille = 300;
  if (structure_to_json(gen_structure(p)).dump() != structure_to_json(gen_structure(p)).dump()) r.pass = false;
  return r;
}

}  // namespace checks

/// Structures exercising links, multiple levels, and both cell kinds.
inline std::vector<BenyaminiStructure> standard_instances(std::uint64_t seed, int count) {
  std::vector<BenyaminiStructure> out;
  for (int k = 0; k < count; ++k) {
    GenParams p;
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k) * 2654435761ULL);
    p.levels = 1 + static_cast<int>(detail::rnd_below(rng, 3));
    p.cells_per_level = 1 + static_cast<int>(detail::rnd_below(rng, 3));
    p.link_density_permille = static_cast<int>(detail::rnd_below(rng, 600));
    p.perfect_permille = static_cast<int>(detail::rnd_below(rng, 500));
    p.seed = seed + static_cast<std::uint64_t>(k);
    p.C = pick_constants(rng).C;
    out.push_back(gen_structure(p));
  }
  return out;
}

inline VerificationReport run_suite(const std::string& suite, const VerifyOptions& opts);

inline VerificationReport run_model_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "model";
  const auto instances =
      opts.structure ? std::vector<BenyaminiStructure>{*opts.structure} : standard_instances(opts.seed, 10);
  rep.add(checks::expand_restrict_identity(instances, opts.seed + 1, checks::scaled(100, opts.scale)));
  rep.add(checks::expand_consistency(instances, opts.seed + 2, checks::scaled(1000, opts.scale)));
  rep.add(checks::base_norm_lattice_axioms(instances, opts.seed + 3, checks::scaled(300, opts.scale)));
  rep.add(checks::base_norm_am_identity(instances, opts.seed + 4, checks::scaled(300, opts.scale)));
  rep.add(checks::linking_recovery(instances));
  return rep;
}

inline VerificationReport run_extension_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "extension";
  const auto instances =
      opts.structure ? std::vector<BenyaminiStructure>{*opts.structure} : standard_instances(opts.seed, 10);
  rep.add(checks::extension_bounds_and_consistency(instances, opts.seed + 1, checks::scaled(500, opts.scale)));
  rep.add(checks::extension_domination(instances, opts.seed + 2, checks::scaled(200, opts.scale)));
  rep.add(checks::extension_projection(instances, opts.seed + 3, checks::scaled(100, opts.scale)));
  rep.add(checks::bump_conclusions(instances, opts.seed + 4, checks::scaled(200, opts.scale)));
  return rep;
}

inline VerificationReport run_transform_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "transform";
  rep.add(checks::transform_distortion(opts.seed + 1, checks::scaled(50, opts.scale)));
  rep.add(checks::transform_determinism(opts.seed + 2, checks::scaled(10, opts.scale)));
  rep.add(checks::transform_join_compatibility(opts.seed + 3, checks::scaled(20, opts.scale)));
  return rep;
}

inline VerificationReport run_renorm_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "renorm";
  std::vector<checks::RenormInstance> instances;
  if (opts.structure) {
    std::mt19937_64 rng(opts.seed);
    instances.push_back(checks::make_renorm_instance(*opts.structure, rng, opts.seed));
  } else {
    instances = checks::renorm_instances(opts.seed, 9);
  }
  rep.add(checks::renorm_sandwich(instances, opts.seed + 1, checks::scaled(1000, opts.scale)));
  rep.add(checks::renorm_am_identity(instances, opts.seed + 2, checks::scaled(300, opts.scale)));
  rep.add(checks::renorm_lattice_axioms(instances, opts.seed + 3, checks::scaled(200, opts.scale)));
  rep.add(checks::renorm_two_atom_restriction(instances, opts.seed + 4, checks::scaled(20, opts.scale)));
  rep.add(checks::gauge_vertex_agreement(Rat(11, 10), 1, checks::scaled(50, opts.scale), opts.seed + 5, 8));
  rep.add(checks::octagon_properties_check({Rat(11, 10), Rat(21, 20), Rat(101, 100)},
                                           checks::scaled(50, opts.scale),
                                           std::min<long long>(20, checks::scaled(50, opts.scale))));
  return rep;
}

inline VerificationReport run_dual_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "dual";
  const auto instances =
      opts.structure ? std::vector<BenyaminiStructure>{*opts.structure} : standard_instances(opts.seed, 10);
  std::vector<checks::RenormInstance> renorms;
  if (opts.structure) {
    std::mt19937_64 rng(opts.seed);
    renorms.push_back(checks::make_renorm_instance(*opts.structure, rng, opts.seed));
  } else {
    renorms = checks::renorm_instances(opts.seed, checks::scaled(50, opts.scale));
  }
  rep.add(checks::dual_point_mass(renorms));
  rep.add(checks::dual_reduction_properties(instances, opts.seed + 1, checks::scaled(100, opts.scale)));
  rep.add(checks::dual_l1_lp_agreement(instances, opts.seed + 2, checks::scaled(100, opts.scale)));
  rep.add(checks::dual_positivity(instances, opts.seed + 3, checks::scaled(60, opts.scale)));
  return rep;
}

inline VerificationReport run_isometry_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "isometry";
  if (opts.structure && opts.norm) {
    // Inspect the provided pair: expectation depends on the norm's shape.
    CheckResult r{"isometry/group", "group size matches the norm family's expectation"};
    const auto group = enumerate_isometries(*opts.norm, {8, opts.workers, false});
    bool has_pair_functional = false;
    for (const auto& f : opts.norm->functionals)
      if (f.size() >= 2) has_pair_functional = true;
    std::size_t expected = 1;
    if (!has_pair_functional) {
      for (std::size_t i = 2; i <= opts.norm->point_weight.size(); ++i) expected *= i;
    }
    r.pass = group.size() == expected;
    r.witness["group_size"] = static_cast<int>(group.size());
    r.witness["expected"] = static_cast<int>(expected);
    r.witness["expected_nontrivial"] = expected > 1;
    rep.add(std::move(r));
    return rep;
  }
  std::vector<checks::RenormInstance> instances;
  const int n = std::max(2, checks::scaled(12, opts.scale));
  for (int k = 0; k < n; ++k) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(k));
    instances.push_back(checks::make_renorm_instance(
        gen_atomic_structure(opts.seed * 31 + static_cast<std::uint64_t>(k), 2, 5), rng, opts.seed));
  }
  rep.add(checks::isometry_rigidity(instances, opts.workers));
  rep.add(checks::isometry_full_symmetry(instances, opts.workers));
  rep.add(checks::isometry_join_preservation(instances, opts.seed + 1, checks::scaled(100, opts.scale),
                                             opts.workers));
  rep.add(checks::isometry_prefilter_consistency(instances, opts.workers));
  return rep;
}

inline VerificationReport run_cli_suite(const VerifyOptions& opts) {
  VerificationReport rep;
  rep.suite = "cli";
  const auto instances =
      opts.structure ? std::vector<BenyaminiStructure>{*opts.structure} : standard_instances(opts.seed, 8);
  rep.add(checks::io_round_trip(instances, opts.seed + 1));
  rep.add(checks::gen_determinism(opts.seed + 2));
  return rep;
}

inline VerificationReport run_suite(const std::string& suite, const VerifyOptions& opts) {
  if (suite == "model") return run_model_suite(opts);
  if (suite == "extension") return run_extension_suite(opts);
  if (suite == "transform") return run_transform_suite(opts);
  if (suite == "renorm") return run_renorm_suite(opts);
  if (suite == "dual") return run_dual_suite(opts);
  if (suite == "isometry") return run_isometry_suite(opts);
  if (suite == "cli") return run_cli_suite(opts);
  if (suite == "all") {
    VerificationReport rep;
    rep.suite = "all";
    for (const char* name : {"model", "extension", "transform", "renorm", "dual", "isometry", "cli"}) {
      VerificationReport sub = run_suite(name, opts);
      for (auto& c : sub.checks) rep.add(std::move(c));
    }
    return rep;
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace amrenorm
