#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrenorm/structure.hpp"

namespace amrenorm {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite sublattice of functions on a point set H: nonnegative generators
/// with sup norm <= 1 standing for a dense sequence, plus the proportionality
/// relations "x(t) = lambda * x(s) for all x" that cut the lattice out.
struct SublatticeModel {
  std::vector<std::string> H;
  std::vector<std::map<std::string, Rat>> generators;  // sparse; absent = 0
  std::vector<Relation> relations;
};

inline void validate_model(const SublatticeModel& m) {
  std::set<std::string> ids(m.H.begin(), m.H.end());
  if (ids.size() != m.H.size()) throw TransformError("duplicate points in H");
  if (m.generators.empty()) throw TransformError("generator list must be nonempty");
  for (const auto& g : m.generators)
    for (const auto& [p, v] : g) {
      if (!ids.count(p)) throw TransformError("generator references unknown point '" + p + "'");
      if (v < 0 || v > 1) throw TransformError("generator value at '" + p + "' outside [0, 1]: " + rat_str(v));
    }
  auto value = [](const std::map<std::string, Rat>& g, const std::string& p) {
    auto it = g.find(p);
    return it == g.end() ? Rat(0) : it->second;
  };
  for (const auto& rel : m.relations) {
    if (!ids.count(rel.t) || !ids.count(rel.s)) throw TransformError("relation references unknown point");
    if (rel.lambda < 0) throw TransformError("relation constant must be nonnegative");
    for (const auto& g : m.generators)
      if (value(g, rel.t) != rel.lambda * value(g, rel.s))
        throw TransformError("generator violates relation x(" + rel.t + ") = " + rat_str(rel.lambda) + " x(" +
                             rel.s + ")");
  }
}

/// psi = (C-1) * sum_n C^(-n) x_n, computed exactly. Vanishes exactly on the
/// common zero set of the generators and stays strictly below 1.
inline std::map<std::string, Rat> build_psi(const SublatticeModel& m, const Rat& C) {
  validate_model(m);
  if (C <= 1) throw TransformError("build_psi needs C > 1");
  std::map<std::string, Rat> psi;
  for (const auto& p : m.H) psi[p] = 0;
  Rat coeff = (C - 1) / C;
  for (const auto& g : m.generators) {
    for (const auto& [p, v] : g) psi[p] += coeff * v;
    coeff /= C;
  }
  for (const auto& [p, v] : psi)
    if (v < 0 || v >= 1) throw std::logic_error("psi outside [0, 1) at '" + p + "'");
  return psi;
}

/// One copy of an original point inside a slicing level.
struct PointCopy {
  std::string source;
  int level = 0;
  std::string copy_id;
};

/// Assigns every point with psi(t) > 0 to the levels n with
/// C^(-n) <= psi(t) <= C^(-n+1); exact boundary values psi(t) = C^(-n) get
/// copies in both n and n+1. Points with psi(t) = 0 are dropped.
inline std::vector<PointCopy> slice_levels(const std::vector<std::string>& H,
                                           const std::map<std::string, Rat>& psi, const Rat& C) {
  if (C <= 1) throw TransformError("slice_levels needs C > 1");
  std::vector<PointCopy> out;
  for (const auto& t : H) {
    const Rat v = psi.at(t);
    if (v == 0) continue;
    if (v >= 1) throw TransformError("psi must stay below 1");
    // Smallest n >= 1 with C^(-n) <= v; then C^(-n) <= v <= C^(-n+1).
    int n = 1;
    Rat power = 1 / C;
    while (power > v) {
      power /= C;
      ++n;
    }
    out.push_back({t, n, t + "@" + std::to_string(n)});
    if (power == v) out.push_back({t, n + 1, t + "@" + std::to_string(n + 1)});
  }
  return out;
}

/// Image of each generator on the sliced copies: a copy of t at level n takes
/// the value C^(1-n) x(t) / psi(t). Asserts the per-generator norm sandwich
/// sup x <= sup image <= C sup x.
inline std::vector<std::map<std::string, Rat>> rescale_embed(const SublatticeModel& m,
                                                             const std::map<std::string, Rat>& psi,
                                                             const std::vector<PointCopy>& slicing, const Rat& C) {
  std::vector<std::map<std::string, Rat>> images;
  for (const auto& g : m.generators) {
    auto value = [&](const std::string& p) {
      auto it = g.find(p);
      return it == g.end() ? Rat(0) : it->second;
    };
    std::map<std::string, Rat> img;
    Rat sup_x(0), sup_img(0);
    for (const auto& copy : slicing) {
      const Rat denom = psi.at(copy.source);
      if (denom == 0) throw std::logic_error("sliced copy with psi = 0 survived F removal");
      const Rat v = pow_rat(C, 1 - copy.level) * value(copy.source) / denom;
      img[copy.copy_id] = v;
      sup_img = std::max(sup_img, v);
    }
    for (const auto& copy : slicing) sup_x = std::max(sup_x, value(copy.source));
    if (sup_img < sup_x || sup_img > C * sup_x)
      throw std::logic_error("rescaled generator violates the norm sandwich");
    images.push_back(std::move(img));
  }
  return images;
}

struct TransformReport {
  std::map<std::string, std::vector<std::string>> point_map;  // source -> output points
  std::vector<std::optional<Rat>> distortion_ratios;          // per generator; empty for zero generators
};

struct TransformResult {
  BenyaminiStructure structure;
  TransformReport report;
  std::vector<LatticeVector> generator_images;  // restricted to output free points
  // Context for mapping further vectors through the same transform:
  std::map<std::string, Rat> psi;
  std::vector<PointCopy> copies;
  std::map<std::string, std::string> copy_to_output;
};

/// Final stage: merge copies with identical images within each level, detect
/// the cross-level links the images force, and assemble the output structure.
inline TransformResult quotient_to_benyamini(const SublatticeModel& m, const std::map<std::string, Rat>& psi,
                                             const std::vector<PointCopy>& slicing,
                                             const std::vector<std::map<std::string, Rat>>& images, const Rat& C) {
  if (slicing.empty()) throw TransformError("degenerate: X = {0} (every point lies in the common zero set)");

  std::map<std::string, std::size_t> source_index;
  for (std::size_t i = 0; i < m.H.size(); ++i) source_index[m.H[i]] = i;

  // Merge within each level by the full image tuple.
  int top = 0;
  for (const auto& copy : slicing) top = std::max(top, copy.level);
  std::map<std::string, std::string> copy_to_output;
  struct OutputPoint {
    std::string id;
    int level;
    std::size_t rep_source;          // H index of the representative
    std::vector<Rat> image_tuple;    // one value per generator
    std::vector<std::string> members;
  };
  std::vector<OutputPoint> outputs;
  for (int lvl = 1; lvl <= top; ++lvl) {
    std::map<std::vector<Rat>, std::size_t> classes;
    for (const auto& copy : slicing) {
      if (copy.level != lvl) continue;
      std::vector<Rat> tuple;
      for (const auto& img : images) tuple.push_back(img.at(copy.copy_id));
      auto it = classes.find(tuple);
      if (it == classes.end()) {
        classes.emplace(tuple, outputs.size());
        outputs.push_back({copy.copy_id, lvl, source_index.at(copy.source), tuple, {copy.copy_id}});
      } else {
        OutputPoint& op = outputs[it->second];
        op.members.push_back(copy.copy_id);
        if (source_index.at(copy.source) < op.rep_source) {
          op.rep_source = source_index.at(copy.source);
          op.id = copy.copy_id;
        }
      }
    }
  }
  std::sort(outputs.begin(), outputs.end(), [](const OutputPoint& a, const OutputPoint& b) {
    return std::pair(a.level, a.rep_source) < std::pair(b.level, b.rep_source);
  });
  for (const auto& op : outputs)
    for (const auto& member : op.members) copy_to_output[member] = op.id;

  // Cross-level proportionality relations forced by the images.
  std::vector<std::pair<std::string, int>> leveled;
  for (const auto& op : outputs) leveled.push_back({op.id, op.level});
  std::vector<Relation> relations;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    for (std::size_t j = i + 1; j < outputs.size(); ++j) {
      const auto& A = outputs[i];
      const auto& B = outputs[j];
      if (A.level == B.level) continue;
      std::optional<Rat> lambda;  // value(A) = lambda * value(B)
      bool proportional = true;
      for (std::size_t g = 0; g < A.image_tuple.size(); ++g) {
        const Rat& va = A.image_tuple[g];
        const Rat& vb = B.image_tuple[g];
        if (va == 0 && vb == 0) continue;
        if (vb == 0 || va == 0) {
          proportional = false;
          break;
        }
        const Rat ratio = va / vb;
        if (!lambda)
          lambda = ratio;
        else if (*lambda != ratio) {
          proportional = false;
          break;
        }
      }
      if (proportional && lambda) relations.push_back({A.id, B.id, *lambda});
    }
  }

  std::vector<Link> links;
  try {
    links = detect_linking(leveled, C, relations);
  } catch (const LinkingError& e) {
    throw TransformError(std::string("input inconsistency: ") + e.what());
  }

  std::vector<Level> levels;
  for (int lvl = 1; lvl <= top; ++lvl) {
    Level L;
    L.index = lvl;
    for (const auto& op : outputs) {
      if (op.level != lvl) continue;
      L.cells.push_back(Cell{"cell_" + op.id, CellKind::Isolated, {op.id}});
    }
    levels.push_back(std::move(L));
  }

  TransformResult res{BenyaminiStructure(C, std::move(levels), std::move(links)), {}, {}, psi, slicing,
                      copy_to_output};

  // Generator images as vectors on the output free points; each full image
  // must be consistent with the detected links.
  for (std::size_t g = 0; g < images.size(); ++g) {
    FullFunction full;
    for (const auto& op : outputs) full.values[op.id] = op.image_tuple[g];
    if (!check_consistent(res.structure, full))
      throw std::logic_error("generator image inconsistent with detected links");
    res.generator_images.push_back(restrict_to_free(res.structure, full));
  }

  for (const auto& copy : slicing) {
    auto& targets = res.report.point_map[copy.source];
    const std::string& out_id = copy_to_output.at(copy.copy_id);
    if (std::find(targets.begin(), targets.end(), out_id) == targets.end()) targets.push_back(out_id);
  }
  for (std::size_t g = 0; g < m.generators.size(); ++g) {
    Rat sup(0);
    for (const auto& [p, v] : m.generators[g]) sup = std::max(sup, v);
    if (sup == 0) {
      res.report.distortion_ratios.push_back(std::nullopt);
      continue;
    }
    const Rat ratio = base_norm(res.structure, res.generator_images[g]) / sup;
    res.report.distortion_ratios.push_back(ratio);
  }
  return res;
}

/// The whole pipeline: psi, slicing, rescaling, quotient.
inline TransformResult transform(const SublatticeModel& m, const Rat& C) {
  const auto psi = build_psi(m, C);
  const auto slicing = slice_levels(m.H, psi, C);
  const auto images = rescale_embed(m, psi, slicing, C);
  return quotient_to_benyamini(m, psi, slicing, images, C);
}

/// Maps a further vector on H through a computed transform. Meaningful for
/// members of the sublattice (values on merged points must agree, which holds
/// for lattice combinations of the generators).
inline LatticeVector transform_apply(const TransformResult& res, const std::map<std::string, Rat>& z) {
  auto value = [&](const std::string& p) {
    auto it = z.find(p);
    return it == z.end() ? Rat(0) : it->second;
  };
  LatticeVector out;
  for (const auto& [p, lvl] : res.structure.free_points()) out.coords[p] = 0;
  for (const auto& copy : res.copies) {
    const std::string& target = res.copy_to_output.at(copy.copy_id);
    if (!out.coords.count(target)) continue;  // non-free output point
    out.coords[target] = pow_rat(res.structure.C(), 1 - copy.level) * value(copy.source) / res.psi.at(copy.source);
  }
  return out;
}

}  // namespace amrenorm
