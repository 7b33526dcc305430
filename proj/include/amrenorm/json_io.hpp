#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "amrenorm/dual.hpp"
#include "amrenorm/extension.hpp"
#include "amrenorm/isometry.hpp"
#include "amrenorm/renorm.hpp"
#include "amrenorm/structure.hpp"
#include "amrenorm/transform.hpp"

namespace amrenorm {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json rat_map_to_json(const std::map<std::string, Rat>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = rat_str(v);
  return out;
}

inline std::map<std::string, Rat> rat_map_from_json(const Json& j) {
  if (!j.is_object()) throw IoError("expected an object of rationals");
  std::map<std::string, Rat> out;
  for (const auto& [k, v] : j.items()) out[k] = parse_rat(v.get<std::string>());
  return out;
}

// ---- structures ----------------------------------------------------------

inline Json structure_to_json(const BenyaminiStructure& s) {
  Json j;
  j["C"] = rat_str(s.C());
  j["levels"] = Json::array();
  for (const auto& lvl : s.levels()) {
    Json jl;
    jl["index"] = lvl.index;
    jl["cells"] = Json::array();
    for (const auto& cell : lvl.cells) {
      Json jc;
      jc["id"] = cell.id;
      jc["kind"] = cell.kind == CellKind::Isolated ? "isolated" : "perfect";
      jc["points"] = cell.points;
      jl["cells"].push_back(jc);
    }
    j["levels"].push_back(jl);
  }
  j["links"] = Json::array();
  for (const auto& link : s.links()) {
    Json jl;
    jl["lower_level"] = link.lower_level;
    jl["upper_level"] = link.upper_level;
    jl["pairs"] = Json::array();
    for (const auto& [lo, up] : link.pairs) jl["pairs"].push_back(Json::array({lo, up}));
    j["links"].push_back(jl);
  }
  return j;
}

inline BenyaminiStructure structure_from_json(const Json& j) {
  if (!j.contains("C") || !j.contains("levels")) throw IoError("structure JSON needs \"C\" and \"levels\"");
  const Rat C = parse_rat(j.at("C").get<std::string>());
  std::vector<Level> levels;
  for (const auto& jl : j.at("levels")) {
    Level lvl;
    lvl.index = jl.at("index").get<int>();
    for (const auto& jc : jl.value("cells", Json::array())) {
      Cell cell;
      cell.id = jc.at("id").get<std::string>();
      const std::string kind = jc.at("kind").get<std::string>();
      if (kind == "isolated")
        cell.kind = CellKind::Isolated;
      else if (kind == "perfect")
        cell.kind = CellKind::Perfect;
      else
        throw IoError("unknown cell kind '" + kind + "'");
      cell.points = jc.at("points").get<std::vector<std::string>>();
      lvl.cells.push_back(std::move(cell));
    }
    levels.push_back(std::move(lvl));
  }
  std::vector<Link> links;
  for (const auto& jl : j.value("links", Json::array())) {
    Link link;
    link.lower_level = jl.at("lower_level").get<int>();
    link.upper_level = jl.at("upper_level").get<int>();
    for (const auto& jp : jl.at("pairs")) {
      if (!jp.is_array() || jp.size() != 2) throw IoError("link pair must be a [lower, upper] array");
      link.pairs.push_back({jp[0].get<std::string>(), jp[1].get<std::string>()});
    }
    links.push_back(std::move(link));
  }
  return BenyaminiStructure(C, std::move(levels), std::move(links));
}

// ---- vectors and functions -----------------------------------------------

inline Json vector_to_json(const LatticeVector& x) {
  Json j;
  j["coords"] = rat_map_to_json(x.coords);
  return j;
}

inline LatticeVector vector_from_json(const BenyaminiStructure& s, const Json& j) {
  return canonical_vector(s, rat_map_from_json(j.at("coords")));
}

inline Json full_function_to_json(const FullFunction& f) {
  Json j;
  j["values"] = rat_map_to_json(f.values);
  return j;
}

inline FullFunction full_function_from_json(const Json& j) {
  return FullFunction{rat_map_from_json(j.at("values"))};
}

inline Json partial_function_to_json(const PartialFunction& f) {
  Json j;
  j["from_level"] = f.from_level;
  j["to_level"] = f.to_level;
  j["values"] = rat_map_to_json(f.values);
  return j;
}

inline PartialFunction partial_function_from_json(const Json& j) {
  PartialFunction f;
  f.from_level = j.at("from_level").get<int>();
  f.to_level = j.at("to_level").get<int>();
  f.values = rat_map_from_json(j.at("values"));
  return f;
}

inline Json functional_to_json(const Functional& f) {
  Json j;
  j["coords"] = rat_map_to_json(f.coords);
  return j;
}

inline Functional functional_from_json(const Json& j) { return Functional{rat_map_from_json(j.at("coords"))}; }

// ---- norm specs ------------------------------------------------------------

inline Json norm_spec_to_json(const NormSpec& spec) {
  Json j = Json::array();
  for (const auto& f : spec.functionals) j.push_back(rat_map_to_json(f));
  return j;
}

inline NormSpec norm_spec_from_json(const Json& j) {
  if (!j.is_array()) throw IoError("a norm spec is a JSON list of functionals");
  std::vector<std::map<std::string, Rat>> fs;
  for (const auto& jf : j) fs.push_back(rat_map_from_json(jf));
  return spec_from_functionals(std::move(fs));
}

// ---- sublattice models -----------------------------------------------------

inline Json sublattice_to_json(const SublatticeModel& m) {
  Json j;
  j["H"] = m.H;
  j["generators"] = Json::array();
  for (const auto& g : m.generators) j["generators"].push_back(rat_map_to_json(g));
  j["relations"] = Json::array();
  for (const auto& r : m.relations) j["relations"].push_back(Json::array({r.t, r.s, rat_str(r.lambda)}));
  return j;
}

inline SublatticeModel sublattice_from_json(const Json& j) {
  SublatticeModel m;
  m.H = j.at("H").get<std::vector<std::string>>();
  for (const auto& jg : j.at("generators")) m.generators.push_back(rat_map_from_json(jg));
  for (const auto& jr : j.value("relations", Json::array())) {
    if (!jr.is_array() || jr.size() != 3) throw IoError("relation must be [t, s, lambda]");
    m.relations.push_back(Relation{jr[0].get<std::string>(), jr[1].get<std::string>(),
                                   parse_rat(jr[2].get<std::string>())});
  }
  validate_model(m);
  return m;
}

// ---- reports ---------------------------------------------------------------

inline Json transform_report_to_json(const TransformReport& rep) {
  Json j;
  j["point_map"] = Json::object();
  for (const auto& [src, targets] : rep.point_map) j["point_map"][src] = targets;
  j["distortion_ratios"] = Json::array();
  for (const auto& r : rep.distortion_ratios)
    j["distortion_ratios"].push_back(r ? Json(rat_str(*r)) : Json(nullptr));
  return j;
}

inline Json isometries_to_json(const std::vector<IsometryCandidate>& group) {
  Json j = Json::array();
  for (const auto& cand : group) {
    Json jc;
    jc["sigma"] = Json::object();
    for (const auto& [t, img] : cand.sigma) jc["sigma"][t] = img;
    jc["weights"] = rat_map_to_json(cand.weights);
    j.push_back(jc);
  }
  return j;
}

// ---- files ------------------------------------------------------------------

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("cannot parse '" + path + "': " + e.what());
  }
  return j;
}

inline void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace amrenorm
