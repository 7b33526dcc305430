// amrenorm: batch tool for building, renorming, and certifying finite
// AM-lattice structures. All file I/O is JSON with rationals as "num/den"
// strings, so every run is bit-exact and reproducible.
//
// Exit codes: 0 success (trivial group where applicable), 2 nontrivial
// isometry group, 3 invariant failure, 4 input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "amrenorm/generate.hpp"
#include "amrenorm/json_io.hpp"
#include "amrenorm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNontrivial = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitInput = 4;

using namespace amrenorm;

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(out_path, j);
}

struct CommonArgs {
  std::string input;
  std::string output;
};

int run_gen(int levels, int cells, int link_permille, int perfect_permille, std::uint64_t seed,
            const std::string& c_str, const std::string& out) {
  GenParams p;
  p.levels = levels;
  p.cells_per_level = cells;
  p.link_density_permille = link_permille;
  p.perfect_permille = perfect_permille;
  p.seed = seed;
  p.C = parse_rat(c_str);
  const BenyaminiStructure s = gen_structure(p);
  emit(structure_to_json(s), out);
  return kExitOk;
}

int run_transform(const std::string& input, const std::string& c_str, const std::string& out,
                  const std::string& report_path) {
  const SublatticeModel m = sublattice_from_json(load_json(input));
  const TransformResult res = transform(m, parse_rat(c_str));
  emit(structure_to_json(res.structure), out);
  if (!report_path.empty()) {
    Json rep = transform_report_to_json(res.report);
    Json images = Json::array();
    for (const auto& img : res.generator_images) images.push_back(vector_to_json(img));
    rep["generator_images"] = images;
    save_json(report_path, rep);
  }
  return kExitOk;
}

int run_renorm(const std::string& input, const std::string& small_c, std::uint64_t seed, bool weighted_sup_only,
               const std::string& out) {
  const BenyaminiStructure s = structure_from_json(load_json(input));
  RenormConstants consts{s.C(), parse_rat(small_c)};
  consts.validate();
  const WeightScheme scheme = assign_weights(s, consts, seed);
  const NormSpec spec = weighted_sup_only ? build_weighted_sup(s, scheme) : build_renorm(s, scheme, consts);
  emit(norm_spec_to_json(spec), out);
  return kExitOk;
}

int run_isometries(const std::string& input, const std::string& norm_path, const std::string& small_c,
                   std::uint64_t seed, bool weighted_sup_only, std::size_t max_points, unsigned workers,
                   bool prefilter, const std::string& out) {
  NormSpec spec = [&] {
    if (!norm_path.empty()) return norm_spec_from_json(load_json(norm_path));
    const BenyaminiStructure s = structure_from_json(load_json(input));
    RenormConstants consts{s.C(), parse_rat(small_c)};
    consts.validate();
    const WeightScheme scheme = assign_weights(s, consts, seed);
    return weighted_sup_only ? build_weighted_sup(s, scheme) : build_renorm(s, scheme, consts);
  }();
  const auto group = enumerate_isometries(spec, {max_points, workers, prefilter});
  Json j;
  j["count"] = group.size();
  j["trivial"] = group.size() == 1;
  j["isometries"] = isometries_to_json(group);
  emit(j, out);
  return group.size() == 1 ? kExitOk : kExitNontrivial;
}

int run_dual(const std::string& input, const std::string& functional_path, const std::string& norm_path,
             const std::string& out) {
  const BenyaminiStructure s = structure_from_json(load_json(input));
  const Functional f = functional_from_json(load_json(functional_path));
  const Functional reduced = reduce_measure(s, f);
  Json j;
  j["reduced"] = functional_to_json(reduced);
  j["total_variation_before"] = rat_str(total_variation(f));
  j["total_variation_after"] = rat_str(total_variation(reduced));
  j["base_dual_norm"] = rat_str(dual_norm_base(s, reduced));
  if (!norm_path.empty()) {
    const NormSpec spec = norm_spec_from_json(load_json(norm_path));
    j["renorm_dual_norm"] = rat_str(dual_norm_renorm(spec, reduced));
  }
  emit(j, out);
  return kExitOk;
}

int run_verify(const std::string& suite, const std::string& input, const std::string& norm_path, std::uint64_t seed,
               int scale, unsigned workers, const std::string& out) {
  VerifyOptions opts;
  opts.seed = seed;
  opts.scale = scale;
  opts.workers = workers;
  if (!input.empty()) opts.structure = structure_from_json(load_json(input));
  if (!norm_path.empty()) opts.norm = norm_spec_from_json(load_json(norm_path));
  const VerificationReport rep = run_suite(suite, opts);
  emit(report_to_json(rep), out);
  return rep.ok() ? kExitOk : kExitInvariant;
}

int run_report(const std::string& input) {
  const Json j = load_json(input);
  if (!j.contains("checks")) throw IoError("not a verification report: missing \"checks\"");
  std::cout << "suite: " << j.value("suite", std::string("?")) << "\n";
  for (const auto& c : j.at("checks")) {
    std::cout << "  [" << c.value("status", std::string("?")) << "] " << c.value("id", std::string("?")) << " — "
              << c.value("property", std::string()) << "\n";
    if (c.contains("witness")) std::cout << "      witness: " << c.at("witness").dump() << "\n";
  }
  std::cout << j.value("passed", 0) << " passed, " << j.value("failed", 0) << " failed\n";
  return j.value("failed", 0) == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite AM-lattice renorming toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random valid structure");
  int levels = 2, cells = 2, link_permille = 300, perfect_permille = 0, scale = 100;
  std::uint64_t seed = 1;
  std::string c_str = "3/2", small_c = "11/10";
  std::string input, output, norm_path, functional_path, report_path, suite = "all";
  std::size_t max_points = 8;
  unsigned workers = 1;
  bool weighted_sup_only = false, prefilter = false;
  gen->add_option("--levels", levels, "number of levels")->check(CLI::Range(1, 12));
  gen->add_option("--cells", cells, "cells per level")->check(CLI::Range(1, 12));
  gen->add_option("--link-density", link_permille, "chain attachment rate, permille")->check(CLI::Range(0, 1000));
  gen->add_option("--perfect-fraction", perfect_permille, "perfect cell rate, permille")->check(CLI::Range(0, 1000));
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--C", c_str, "linking constant, rational in (1, 2)");
  gen->add_option("-o,--output", output, "output file (stdout if omitted)");

  // transform
  auto* tr = app.add_subcommand("transform", "turn a sublattice model into a linked structure");
  tr->add_option("--input", input, "sublattice model JSON")->required();
  tr->add_option("--C", c_str, "linking constant, rational in (1, 2)");
  tr->add_option("-o,--output", output, "output structure file");
  tr->add_option("--report", report_path, "distortion report file");

  // renorm
  auto* rn = app.add_subcommand("renorm", "build a symmetry-breaking norm for a structure");
  rn->add_option("--input", input, "structure JSON")->required();
  rn->add_option("--c", small_c, "weight constant, rational with c^3 < C");
  rn->add_option("--seed", seed, "weight assignment seed");
  rn->add_flag("--weighted-sup", weighted_sup_only, "emit the plain weighted-sup norm instead");
  rn->add_option("-o,--output", output, "output norm file");

  // isometries
  auto* iso = app.add_subcommand("isometries", "enumerate all lattice isometries of a normed structure");
  iso->add_option("--input", input, "structure JSON (used when --norm is absent)");
  iso->add_option("--norm", norm_path, "norm spec JSON");
  iso->add_option("--c", small_c, "weight constant when building the norm here");
  iso->add_option("--seed", seed, "weight assignment seed");
  iso->add_flag("--weighted-sup", weighted_sup_only, "build the weighted-sup norm instead");
  iso->add_option("--max-points", max_points, "enumeration size bound");
  iso->add_option("--workers", workers, "parallel batches");
  iso->add_flag("--prefilter", prefilter, "skip bijections moving an atom (re-verified)");
  iso->add_option("-o,--output", output, "output group file");

  // dual
  auto* du = app.add_subcommand("dual", "reduce a functional and compute its dual norms");
  du->add_option("--input", input, "structure JSON")->required();
  du->add_option("--functional", functional_path, "functional JSON")->required();
  du->add_option("--norm", norm_path, "norm spec JSON for the renormed dual norm");
  du->add_option("-o,--output", output, "output file");

  // verify
  auto* ve = app.add_subcommand("verify", "run a module's invariant checks");
  ve->add_option("--suite", suite, "model|extension|transform|renorm|dual|isometry|cli|all");
  ve->add_option("--input", input, "structure JSON to verify against");
  ve->add_option("--norm", norm_path, "norm spec JSON (isometry suite)");
  ve->add_option("--seed", seed, "instance seed");
  ve->add_option("--scale", scale, "percent of the full check counts")->check(CLI::Range(1, 100));
  ve->add_option("--workers", workers, "parallel batches for enumeration");
  ve->add_option("-o,--output", output, "report file (stdout if omitted)");

  // report
  auto* rp = app.add_subcommand("report", "pretty-print a verification report");
  rp->add_option("--input", input, "report JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(levels, cells, link_permille, perfect_permille, seed, c_str, output);
    if (tr->parsed()) return run_transform(input, c_str, output, report_path);
    if (rn->parsed()) return run_renorm(input, small_c, seed, weighted_sup_only, output);
    if (iso->parsed())
      return run_isometries(input, norm_path, small_c, seed, weighted_sup_only, max_points, workers, prefilter,
                            output);
    if (du->parsed()) return run_dual(input, functional_path, norm_path, output);
    if (ve->parsed()) return run_verify(suite, input, norm_path, seed, scale, workers, output);
    if (rp->parsed()) return run_report(input);
  } catch (const std::logic_error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
