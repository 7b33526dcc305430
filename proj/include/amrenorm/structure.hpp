#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amrenorm/rational.hpp"

namespace amrenorm {

enum class CellKind { Isolated, Perfect };

struct Cell {
  std::string id;
  CellKind kind = CellKind::Isolated;
  std::vector<std::string> points;
};

struct Level {
  int index = 0;
  std::vector<Cell> cells;
};

// One record per level pair (m, n), m < n. Each pair is (lower point, upper
// point): every function of the lattice satisfies
//   value(lower) = C^(n-m) * value(upper).
struct Link {
  int lower_level = 0;
  int upper_level = 0;
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct PointInfo {
  int level = 0;
  std::size_t cell = 0;  // cell index within its level
  std::size_t pos = 0;   // point index within its cell
  CellKind kind = CellKind::Isolated;
  std::size_t ord = 0;   // canonical (level, cell, pos) ordinal
};

class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite leveled point structure with C-power linking. Validation enforces:
/// globally distinct point ids, per-record bijections, chains that are closed
/// under transitivity with at most one point per level (this makes the phi
/// maps mutually inverse and chain-compatible), and the cell-tag discipline
/// for links out of perfect cells. Immutable after construction.
class BenyaminiStructure {
 public:
  BenyaminiStructure(Rat C, std::vector<Level> levels, std::vector<Link> links)
      : c_(std::move(C)), levels_(std::move(levels)), links_(std::move(links)) {
    validate_and_index();
  }

  const Rat& C() const { return c_; }
  const std::vector<Level>& levels() const { return levels_; }
  const std::vector<Link>& links() const { return links_; }
  int top_level() const { return static_cast<int>(levels_.size()); }

  bool has_point(const std::string& p) const { return info_.count(p) != 0; }

  const PointInfo& info(const std::string& p) const {
    auto it = info_.find(p);
    if (it == info_.end()) throw StructureError("unknown point: " + p);
    return it->second;
  }

  /// All points in canonical (level, cell, position) order.
  const std::vector<std::string>& points() const { return points_; }

  /// Free points (chain roots) in canonical order, with their levels.
  const std::vector<std::pair<std::string, int>>& free_points() const { return free_; }

  bool is_free(const std::string& p) const { return chain_root(p) == p; }

  const std::string& chain_root(const std::string& p) const {
    auto it = root_.find(p);
    if (it == root_.end()) throw StructureError("unknown point: " + p);
    return it->second;
  }

  /// Chain members of the chain containing p, sorted by level (root first).
  const std::vector<std::string>& chain(const std::string& p) const {
    return chains_.at(chain_root(p));
  }

 private:
  void validate_and_index() {
    if (c_ <= 1 || c_ >= 2) throw StructureError("constant C must satisfy 1 < C < 2, got " + rat_str(c_));
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (levels_[i].index != static_cast<int>(i) + 1)
        throw StructureError("levels must be indexed consecutively from 1");
    }

    std::set<std::string> cell_ids;
    for (const auto& lvl : levels_) {
      for (std::size_t ci = 0; ci < lvl.cells.size(); ++ci) {
        const Cell& cell = lvl.cells[ci];
        if (cell.id.empty()) throw StructureError("empty cell id");
        if (!cell_ids.insert(cell.id).second) throw StructureError("duplicate cell id: " + cell.id);
        if (cell.kind == CellKind::Isolated && cell.points.size() != 1)
          throw StructureError("isolated cell '" + cell.id + "' must contain exactly one point");
        if (cell.kind == CellKind::Perfect && cell.points.size() < 2)
          throw StructureError("perfect cell '" + cell.id + "' must carry at least 2 sample points");
        for (std::size_t pi = 0; pi < cell.points.size(); ++pi) {
          const std::string& p = cell.points[pi];
          if (p.empty()) throw StructureError("empty point id in cell '" + cell.id + "'");
          PointInfo inf{lvl.index, ci, pi, cell.kind, points_.size()};
          if (!info_.emplace(p, inf).second) throw StructureError("duplicate point id: " + p);
          points_.push_back(p);
        }
      }
    }

    // Link validation: level bounds, membership, per-record bijection.
    std::set<std::pair<int, int>> level_pairs;
    std::set<std::pair<std::string, std::string>> pair_set;
    for (auto& link : links_) {
      if (link.lower_level < 1 || link.upper_level > top_level() || link.lower_level >= link.upper_level)
        throw StructureError("link levels must satisfy 1 <= lower < upper <= top");
      if (!level_pairs.insert({link.lower_level, link.upper_level}).second)
        throw StructureError("duplicate link record for level pair");
      std::set<std::string> lowers, uppers;
      for (const auto& [lo, up] : link.pairs) {
        const PointInfo& li = info(lo);
        const PointInfo& ui = info(up);
        if (li.level != link.lower_level || ui.level != link.upper_level)
          throw StructureError("link pair (" + lo + ", " + up + ") does not match its record's levels");
        if (!lowers.insert(lo).second) throw StructureError("link pairs not a bijection: '" + lo + "' repeated");
        if (!uppers.insert(up).second) throw StructureError("link pairs not a bijection: '" + up + "' repeated");
        if (li.kind == CellKind::Perfect && ui.kind != CellKind::Perfect)
          throw StructureError("perfect-cell point '" + lo + "' may only link upward into a perfect cell");
        pair_set.insert({lo, up});
      }
      std::sort(link.pairs.begin(), link.pairs.end(), [&](const auto& a, const auto& b) {
        return info(a.first).ord < info(b.first).ord;
      });
    }
    std::sort(links_.begin(), links_.end(), [](const Link& a, const Link& b) {
      return std::pair(a.lower_level, a.upper_level) < std::pair(b.lower_level, b.upper_level);
    });

    // Chains via union-find over link pairs.
    std::map<std::string, std::string> parent;
    for (const auto& p : points_) parent[p] = p;
    auto find = [&](std::string p) {
      while (parent[p] != p) {
        parent[p] = parent[parent[p]];
        p = parent[p];
      }
      return p;
    };
    for (const auto& link : links_)
      for (const auto& [lo, up] : link.pairs) parent[find(lo)] = find(up);

    std::map<std::string, std::vector<std::string>> comp;
    for (const auto& p : points_) comp[find(p)].push_back(p);

    for (auto& [rep, members] : comp) {
      std::sort(members.begin(), members.end(),
                [&](const std::string& a, const std::string& b) { return info(a).level < info(b).level; });
      for (std::size_t i = 0; i + 1 < members.size(); ++i) {
        if (info(members[i]).level == info(members[i + 1]).level)
          throw StructureError("chain contains two points at level " + std::to_string(info(members[i]).level) +
                               ": '" + members[i] + "', '" + members[i + 1] + "'");
        // Transitive closure: every cross-level pair of the chain must be an
        // explicit link pair, which also forces the phi triangles to commute.
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          if (!pair_set.count({members[i], members[j]}))
            throw StructureError("chain compatibility violated: '" + members[i] + "' and '" + members[j] +
                                 "' share a chain but are not linked directly");
        }
      }
      const std::string& root = members.front();
      for (const auto& m : members) root_[m] = root;
      chains_[root] = members;
    }

    for (const auto& p : points_)
      if (root_.at(p) == p) free_.push_back({p, info(p).level});
    std::sort(free_.begin(), free_.end(), [&](const auto& a, const auto& b) {
      return info(a.first).ord < info(b.first).ord;
    });
  }

  Rat c_;
  std::vector<Level> levels_;
  std::vector<Link> links_;
  std::map<std::string, PointInfo> info_;
  std::vector<std::string> points_;
  std::vector<std::pair<std::string, int>> free_;
  std::map<std::string, std::string> root_;
  std::map<std::string, std::vector<std::string>> chains_;
};

/// Exact-rational coordinates on the free points K' of a structure.
struct LatticeVector {
  std::map<std::string, Rat> coords;

  bool operator==(const LatticeVector&) const = default;
};

/// Values on every point of the structure.
struct FullFunction {
  std::map<std::string, Rat> values;

  bool operator==(const FullFunction&) const = default;
};

inline void check_vector_domain(const BenyaminiStructure& s, const LatticeVector& x) {
  const auto& fp = s.free_points();
  if (x.coords.size() != fp.size())
    throw StructureError("vector domain does not match the structure's free points");
  for (const auto& [p, lvl] : fp)
    if (!x.coords.count(p)) throw StructureError("vector is missing free point '" + p + "'");
}

inline LatticeVector zero_vector(const BenyaminiStructure& s) {
  LatticeVector x;
  for (const auto& [p, lvl] : s.free_points()) x.coords[p] = 0;
  return x;
}

inline LatticeVector unit_vector(const BenyaminiStructure& s, const std::string& point) {
  LatticeVector x = zero_vector(s);
  auto it = x.coords.find(point);
  if (it == x.coords.end()) throw StructureError("'" + point + "' is not a free point");
  it->second = 1;
  return x;
}

/// Fills a possibly sparse coordinate map out to the full free-point domain.
inline LatticeVector canonical_vector(const BenyaminiStructure& s, const std::map<std::string, Rat>& coords) {
  LatticeVector x = zero_vector(s);
  for (const auto& [p, v] : coords) {
    auto it = x.coords.find(p);
    if (it == x.coords.end()) throw StructureError("'" + p + "' is not a free point");
    it->second = v;
  }
  return x;
}

/// Extends coordinates on K' to all points: a chain member at level m with
/// root r at level n carries C^(n-m) times the root coordinate.
inline FullFunction expand(const BenyaminiStructure& s, const LatticeVector& x) {
  check_vector_domain(s, x);
  FullFunction f;
  for (const auto& p : s.points()) {
    const std::string& root = s.chain_root(p);
    const long long shift = s.info(root).level - s.info(p).level;  // <= 0
    const Rat& rv = x.coords.at(root);
    f.values[p] = shift == 0 ? rv : Rat(rv * pow_rat(s.C(), shift));
  }
  return f;
}

/// True iff every link relation value(lower) = C^(n-m)*value(upper) holds.
inline bool check_consistent(const BenyaminiStructure& s, const FullFunction& f) {
  for (const auto& p : s.points())
    if (!f.values.count(p)) throw StructureError("function does not cover point '" + p + "'");
  for (const auto& link : s.links()) {
    const Rat factor = pow_rat(s.C(), link.upper_level - link.lower_level);
    for (const auto& [lo, up] : link.pairs)
      if (f.values.at(lo) != factor * f.values.at(up)) return false;
  }
  return true;
}

/// Restriction of a full function to the free points.
inline LatticeVector restrict_to_free(const BenyaminiStructure& s, const FullFunction& f) {
  LatticeVector x;
  for (const auto& [p, lvl] : s.free_points()) x.coords[p] = f.values.at(p);
  return x;
}

/// Sup of |x| over the whole structure. Computed both over all points of the
/// expansion and over the free points alone; the two must agree because
/// copies carry factors C^(n-m) < 1.
inline Rat base_norm(const BenyaminiStructure& s, const LatticeVector& x) {
  FullFunction f = expand(s, x);
  Rat over_all(0), over_free(0);
  for (const auto& [p, v] : f.values) over_all = std::max(over_all, rat_abs(v));
  for (const auto& [p, lvl] : s.free_points()) over_free = std::max(over_free, rat_abs(x.coords.at(p)));
  if (over_all != over_free)
    throw StructureError("sup over K and sup over K' disagree; structure linking is corrupt");
  return over_all;
}

struct AtomInfo {
  std::string point;
  int level = 0;
  std::size_t index = 0;  // 1-based position in the atom enumeration
  LatticeVector theta;
};

/// Hereditarily isolated free points with their coordinate vectors, in
/// canonical free-point order. The enumeration order defines the index set I.
inline std::vector<AtomInfo> atoms(const BenyaminiStructure& s) {
  std::vector<AtomInfo> out;
  for (const auto& [p, lvl] : s.free_points()) {
    bool hereditarily_isolated = true;
    for (const auto& member : s.chain(p)) {
      if (s.info(member).kind != CellKind::Isolated) {
        hereditarily_isolated = false;
        break;
      }
    }
    if (hereditarily_isolated)
      out.push_back(AtomInfo{p, lvl, out.size() + 1, unit_vector(s, p)});
  }
  return out;
}

inline LatticeVector lattice_join(const LatticeVector& x, const LatticeVector& y) {
  if (x.coords.size() != y.coords.size()) throw StructureError("lattice op on mismatched domains");
  LatticeVector out;
  for (const auto& [p, v] : x.coords) {
    auto it = y.coords.find(p);
    if (it == y.coords.end()) throw StructureError("lattice op on mismatched domains");
    out.coords[p] = std::max(v, it->second);
  }
  return out;
}

inline LatticeVector lattice_meet(const LatticeVector& x, const LatticeVector& y) {
  if (x.coords.size() != y.coords.size()) throw StructureError("lattice op on mismatched domains");
  LatticeVector out;
  for (const auto& [p, v] : x.coords) {
    auto it = y.coords.find(p);
    if (it == y.coords.end()) throw StructureError("lattice op on mismatched domains");
    out.coords[p] = std::min(v, it->second);
  }
  return out;
}

inline LatticeVector lattice_abs(const LatticeVector& x) {
  LatticeVector out;
  for (const auto& [p, v] : x.coords) out.coords[p] = rat_abs(v);
  return out;
}

inline LatticeVector vector_add(const LatticeVector& x, const LatticeVector& y) {
  if (x.coords.size() != y.coords.size()) throw StructureError("add on mismatched domains");
  LatticeVector out;
  for (const auto& [p, v] : x.coords) out.coords[p] = v + y.coords.at(p);
  return out;
}

inline LatticeVector vector_scale(const Rat& a, const LatticeVector& x) {
  LatticeVector out;
  for (const auto& [p, v] : x.coords) out.coords[p] = a * v;
  return out;
}

/// A proportionality constraint "x(t) = lambda * x(s) for all x", lambda >= 0.
struct Relation {
  std::string t, s;
  Rat lambda;
};

class LinkingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Computes the linking structure a relation family forces on a leveled point
/// set: all pairs across levels m < n whose forced ratio is exactly C^(n-m),
/// grouped into link records. Throws LinkingError if any forced ratio
/// violates the C-power rule (or forces a function to vanish identically, or
/// identifies two points of one level).
inline std::vector<Link> detect_linking(const std::vector<std::pair<std::string, int>>& points, const Rat& C,
                                        const std::vector<Relation>& relations) {
  std::map<std::string, int> level;
  std::vector<std::string> order;
  for (const auto& [p, lvl] : points) {
    if (!level.emplace(p, lvl).second) throw LinkingError("duplicate point '" + p + "'");
    order.push_back(p);
  }

  // Weighted union-find: value(p) = ratio[p] * value(root(p)).
  std::map<std::string, std::string> parent;
  std::map<std::string, Rat> ratio;
  for (const auto& p : order) {
    parent[p] = p;
    ratio[p] = 1;
  }
  auto find = [&](const std::string& start) {
    std::vector<std::string> path;
    std::string p = start;
    while (parent[p] != p) {
      path.push_back(p);
      p = parent[p];
    }
    Rat acc(1);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      acc *= ratio[*it];
      parent[*it] = p;
      ratio[*it] = acc;
    }
    return p;
  };

  for (const auto& rel : relations) {
    if (!level.count(rel.t) || !level.count(rel.s))
      throw LinkingError("relation references unknown point");
    if (rel.lambda < 0) throw LinkingError("negative proportionality constant");
    if (rel.lambda == 0)
      throw LinkingError("relation forces all functions to vanish at '" + rel.t + "'");
    const std::string rt = find(rel.t);
    const std::string rs = find(rel.s);
    if (rt == rs) {
      if (ratio[rel.t] != rel.lambda * ratio[rel.s])
        throw LinkingError("contradictory relations force all functions to vanish at '" + rel.t + "'");
      continue;
    }
    // value(t) = lambda * value(s):  value(rt) = (lambda * ratio[s] / ratio[t]) * value(rs)
    parent[rt] = rs;
    ratio[rt] = rel.lambda * ratio[rel.s] / ratio[rel.t];
  }

  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& p : order) groups[find(p)].push_back(p);

  std::map<std::pair<int, int>, std::vector<std::pair<std::string, std::string>>> records;
  for (auto& [rep, members] : groups) {
    std::sort(members.begin(), members.end(),
              [&](const std::string& a, const std::string& b) { return level[a] < level[b]; });
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const std::string& lo = members[i];
        const std::string& up = members[j];
        const int m = level[lo], n = level[up];
        const Rat forced = ratio[lo] / ratio[up];  // value(lo) / value(up)
        if (m == n)
          throw LinkingError("points '" + lo + "' and '" + up + "' at level " + std::to_string(m) +
                             " carry a forced ratio " + rat_str(forced) +
                             "; same-level ratios must not occur");
        const Rat required = pow_rat(C, n - m);
        if (forced != required)
          throw LinkingError("forced ratio " + rat_str(forced) + " between '" + lo + "' (level " +
                             std::to_string(m) + ") and '" + up + "' (level " + std::to_string(n) +
                             ") is not C^" + std::to_string(n - m) + " = " + rat_str(required));
        records[{m, n}].push_back({lo, up});
      }
    }
  }

  std::map<std::string, std::size_t> ord;
  for (std::size_t i = 0; i < order.size(); ++i) ord[order[i]] = i;
  std::vector<Link> out;
  for (auto& [lvls, pairs] : records) {
    std::sort(pairs.begin(), pairs.end(),
              [&](const auto& a, const auto& b) { return ord[a.first] < ord[b.first]; });
    out.push_back(Link{lvls.first, lvls.second, std::move(pairs)});
  }
  return out;
}

/// The relation family a structure's own links impose (one relation per pair).
inline std::vector<Relation> tautological_relations(const BenyaminiStructure& s) {
  std::vector<Relation> rels;
  for (const auto& link : s.links()) {
    const Rat factor = pow_rat(s.C(), link.upper_level - link.lower_level);
    for (const auto& [lo, up] : link.pairs) rels.push_back(Relation{lo, up, factor});
  }
  return rels;
}

/// Points of a structure paired with their levels (detect_linking input form).
inline std::vector<std::pair<std::string, int>> leveled_points(const BenyaminiStructure& s) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& p : s.points()) out.push_back({p, s.info(p).level});
  return out;
}

}  // namespace amrenorm
