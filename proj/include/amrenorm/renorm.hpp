#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amrenorm/structure.hpp"

namespace amrenorm {

class RenormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The two renorming constants: 1 < c, c^3 < C, C < 2.
struct RenormConstants {
  Rat C;
  Rat c;

  void validate() const {
    if (C <= 1 || C >= 2) throw RenormError("C must satisfy 1 < C < 2, got " + rat_str(C));
    if (c <= 1) throw RenormError("c must exceed 1, got " + rat_str(c));
    if (c * c * c >= C) throw RenormError("constants must satisfy c^3 < C; got c=" + rat_str(c) + ", C=" + rat_str(C));
  }
};

/// Distinct near-1 weights on designated free points, level by level.
/// mu(t) is the designated weight, or 1 on undesignated points.
struct WeightScheme {
  // level -> ordered designated (point, lambda) list
  std::vector<std::pair<int, std::vector<std::pair<std::string, Rat>>>> designated;
  std::map<std::string, Rat> mu_map;  // derived lookup

  Rat mu(const std::string& point) const {
    auto it = mu_map.find(point);
    return it == mu_map.end() ? Rat(1) : it->second;
  }

  void rebuild_lookup() {
    mu_map.clear();
    for (const auto& [lvl, pts] : designated)
      for (const auto& [p, lambda] : pts) mu_map[p] = lambda;
  }
};

/// Scheme invariants: designated points are free points of their level,
/// weights lie in (1, c), strictly decrease within a level and are globally
/// distinct. Levels whose free points are all isolated must designate every
/// free point; levels with perfect-cell free points may designate a prefix in
/// cell order (their sample lists stand for infinite sets).
inline void validate_scheme(const BenyaminiStructure& s, const RenormConstants& consts, const WeightScheme& scheme) {
  consts.validate();
  std::set<Rat> seen;
  std::map<int, std::set<std::string>> designated_by_level;
  for (const auto& [lvl, pts] : scheme.designated) {
    Rat prev;
    bool first = true;
    for (const auto& [p, lambda] : pts) {
      if (!s.has_point(p) || !s.is_free(p) || s.info(p).level != lvl)
        throw RenormError("designated point '" + p + "' is not a free point of level " + std::to_string(lvl));
      if (lambda <= 1 || lambda >= consts.c)
        throw RenormError("weight at '" + p + "' is outside (1, c): " + rat_str(lambda));
      if (!seen.insert(lambda).second) throw RenormError("weights must be pairwise distinct");
      if (!first && lambda >= prev) throw RenormError("weights must strictly decrease within a level");
      prev = lambda;
      first = false;
      designated_by_level[lvl].insert(p);
    }
  }
  for (const auto& [p, lvl] : s.free_points()) {
    bool level_has_perfect_free = false;
    for (const auto& [q, l2] : s.free_points())
      if (l2 == lvl && s.info(q).kind == CellKind::Perfect) level_has_perfect_free = true;
    if (!level_has_perfect_free && !designated_by_level[lvl].count(p))
      throw RenormError("free point '" + p + "' of an all-isolated level must be designated");
  }
}

/// Canonical weight assignment: every free point is designated, in canonical
/// order, with lambda = 1 + (c-1) * 2^(-rank). Ranks are consecutive positive
/// integers in (level, point) order, offset deterministically by the seed.
inline WeightScheme assign_weights(const BenyaminiStructure& s, const RenormConstants& consts,
                                   std::uint64_t seed = 0) {
  consts.validate();
  WeightScheme scheme;
  long long rank = 1 + static_cast<long long>(seed % 5);
  for (const auto& lvl : s.levels()) {
    std::vector<std::pair<std::string, Rat>> pts;
    for (const auto& [p, plvl] : s.free_points()) {
      if (plvl != lvl.index) continue;
      pts.push_back({p, Rat(1) + (consts.c - 1) * pow_rat(Rat(2), -rank)});
      ++rank;
    }
    if (!pts.empty()) scheme.designated.push_back({lvl.index, std::move(pts)});
  }
  scheme.rebuild_lookup();
  validate_scheme(s, consts, scheme);
  return scheme;
}

/// Cantor pairing of an atom-index pair i < j; the rank of that pair's octagon.
inline long long pair_rank(long long i, long long j) {
  if (i >= j) throw RenormError("pair_rank requires i < j");
  return (i + j) * (i + j + 1) / 2 + j;
}

/// The rank-parameterized octagon: vertices (+-v1, +-1) and (+-1, +-v2), with
/// the diagonal face a|x| + b|y| = 1 through (v1, 1) and (1, v2).
struct OctagonParams {
  Rat c;
  long long rank = 1;
  Rat v1, v2, a, b;
};

inline OctagonParams make_octagon(const Rat& c, long long rank) {
  if (c <= 1) throw RenormError("octagon needs c > 1");
  if (rank < 1) throw RenormError("octagon rank must be positive");
  OctagonParams p;
  p.c = c;
  p.rank = rank;
  p.v1 = 1 - (c - 1) / (c * (2 * rank + 1));
  p.v2 = 1 - (c - 1) / (2 * c * rank);
  const Rat d = 1 - p.v1 * p.v2;
  p.a = (1 - p.v2) / d;
  p.b = (1 - p.v1) / d;
  if (p.v1 <= 0 || p.v1 >= 1 || p.v2 <= 0 || p.v2 >= 1 || p.a <= 0 || p.b <= 0)
    throw RenormError("octagon parameters degenerate");
  if (std::max(Rat(1), Rat(p.a + p.b)) > c) throw RenormError("octagon gauge exceeds c on the diagonal");
  return p;
}

/// Exact gauge of the octagon: max(|alpha|, |beta|, a|alpha| + b|beta|).
inline Rat octagon_norm(const Rat& alpha, const Rat& beta, const OctagonParams& p) {
  const Rat x = rat_abs(alpha), y = rat_abs(beta);
  return std::max({x, y, Rat(p.a * x + p.b * y)});
}

/// Aggregate exact checks of the octagon family over a rank range:
///   sup equivalence   max norm <= gauge <= c * max norm   (a+b <= c)
///   corner flatness   gauge((1,beta)) = 1 for |beta| <= 1/c, and symmetrically
///   pairwise distinct for distinct ranks some vertex of one octagon has
///                     gauge != 1 under the other
///   gamma tails       minimal rank r0 with a+b <= gamma; all later ranks pass
struct OctagonPropertiesReport {
  Rat c;
  long long rank_min = 1, rank_max = 1;
  bool sup_equivalence_ok = true;
  bool corner_flatness_ok = true;
  bool pairwise_distinct_ok = true;
  long long pairwise_cap = 0;
  struct GammaBound {
    Rat gamma;
    long long min_rank = -1;  // -1: no rank in range satisfies the bound
    bool tail_ok = true;
  };
  std::vector<GammaBound> gamma_bounds;

  bool all_ok() const {
    if (!sup_equivalence_ok || !corner_flatness_ok || !pairwise_distinct_ok) return false;
    for (const auto& g : gamma_bounds)
      if (g.min_rank < 0 || !g.tail_ok) return false;
    return true;
  }
};

/// A vertex of one octagon whose gauge under the other differs from 1.
inline bool octagons_distinguishable(const OctagonParams& p1, const OctagonParams& p2) {
  const std::pair<Rat, Rat> vertices[4] = {{p1.v1, Rat(1)}, {Rat(1), p1.v2}, {p2.v1, Rat(1)}, {Rat(1), p2.v2}};
  for (int k = 0; k < 4; ++k) {
    const OctagonParams& own = k < 2 ? p1 : p2;
    const OctagonParams& other = k < 2 ? p2 : p1;
    if (octagon_norm(vertices[k].first, vertices[k].second, own) != 1)
      throw std::logic_error("octagon vertex does not lie on its own boundary");
    if (octagon_norm(vertices[k].first, vertices[k].second, other) != 1) return true;
  }
  return false;
}

inline OctagonPropertiesReport check_octagon_properties(const Rat& c, long long rank_min, long long rank_max,
                                                        const std::vector<Rat>& gammas = {},
                                                        long long pairwise_cap = 20) {
  if (rank_min < 1 || rank_min > rank_max) throw RenormError("bad rank range");
  OctagonPropertiesReport rep;
  rep.c = c;
  rep.rank_min = rank_min;
  rep.rank_max = rank_max;
  rep.pairwise_cap = std::min(pairwise_cap, rank_max);

  std::vector<OctagonParams> oct;
  for (long long r = rank_min; r <= rank_max; ++r) oct.push_back(make_octagon(c, r));

  for (const auto& p : oct) {
    if (p.a + p.b > c) rep.sup_equivalence_ok = false;
    if (p.a + p.b / c > 1 || p.a / c + p.b > 1) rep.corner_flatness_ok = false;
  }

  for (long long r1 = rank_min; r1 <= rep.pairwise_cap && rep.pairwise_distinct_ok; ++r1)
    for (long long r2 = r1 + 1; r2 <= rep.pairwise_cap; ++r2)
      if (!octagons_distinguishable(oct[static_cast<std::size_t>(r1 - rank_min)],
                                    oct[static_cast<std::size_t>(r2 - rank_min)])) {
        rep.pairwise_distinct_ok = false;
        break;
      }

  for (const auto& gamma : gammas) {
    OctagonPropertiesReport::GammaBound gb;
    gb.gamma = gamma;
    for (long long r = rank_min; r <= rank_max; ++r) {
      const auto& p = oct[static_cast<std::size_t>(r - rank_min)];
      const bool passes = std::max(Rat(1), Rat(p.a + p.b)) <= gamma;
      if (passes && gb.min_rank < 0) gb.min_rank = r;
      if (!passes && gb.min_rank >= 0) gb.tail_ok = false;
    }
    rep.gamma_bounds.push_back(gb);
  }
  return rep;
}

/// An absolute polyhedral norm: max over finitely many nonnegative
/// functionals f of sum_t f(t) |x(t)|. point_weight(t) is the coefficient of
/// the plain coordinate functional at t (so norm(e_t) = point_weight(t)).
struct NormSpec {
  std::vector<std::map<std::string, Rat>> functionals;
  std::map<std::string, Rat> point_weight;
  std::vector<std::string> atom_points;  // metadata from construction; may be empty

  Rat value(const LatticeVector& x) const {
    Rat best(0);
    for (const auto& f : functionals) {
      Rat v(0);
      for (const auto& [p, coeff] : f) {
        auto it = x.coords.find(p);
        if (it == x.coords.end()) throw RenormError("vector is missing point '" + p + "'");
        v += coeff * rat_abs(it->second);
      }
      best = std::max(best, v);
    }
    return best;
  }

  std::vector<std::string> points() const {
    std::vector<std::string> out;
    for (const auto& [p, w] : point_weight) out.push_back(p);
    return out;
  }
};

namespace detail {

inline void push_functional(NormSpec& spec, std::map<std::string, Rat> f) {
  for (auto it = f.begin(); it != f.end();) {
    if (it->second == 0)
      it = f.erase(it);
    else
      ++it;
  }
  if (f.empty()) return;
  for (const auto& existing : spec.functionals)
    if (existing == f) return;
  spec.functionals.push_back(std::move(f));
}

}  // namespace detail

/// Reconstructs the coordinate weights of a functional list (for specs loaded
/// from files): point_weight(t) = max coefficient at t across functionals.
inline NormSpec spec_from_functionals(std::vector<std::map<std::string, Rat>> functionals) {
  NormSpec spec;
  for (auto& f : functionals) detail::push_functional(spec, std::move(f));
  for (const auto& f : spec.functionals)
    for (const auto& [p, coeff] : f) {
      auto it = spec.point_weight.find(p);
      if (it == spec.point_weight.end() || it->second < coeff) spec.point_weight[p] = coeff;
    }
  if (spec.functionals.empty()) throw RenormError("degenerate: a norm needs at least one functional");
  return spec;
}

/// The weighted-sup norm sup_t mu(t)|x(t)| as an explicit functional list.
inline NormSpec build_weighted_sup(const BenyaminiStructure& s, const WeightScheme& scheme) {
  if (s.free_points().empty()) throw RenormError("degenerate: structure has no free points");
  NormSpec spec;
  for (const auto& [p, lvl] : s.free_points()) {
    const Rat w = scheme.mu(p);
    spec.point_weight[p] = w;
    detail::push_functional(spec, {{p, w}});
  }
  return spec;
}

/// The atom-count-driven renorm:
///   no atoms   weighted sup;
///   one atom   weighted sup away from the atom, plain sup on the atom band;
///   else       weighted sup plus, per atom pair (i, j), the octagon gauge of
///              (mu(a_i) x(a_i), mu(a_j) x(a_j)) at rank pair_rank(i, j).
inline NormSpec build_renorm(const BenyaminiStructure& s, const WeightScheme& scheme,
                             const RenormConstants& consts) {
  validate_scheme(s, consts, scheme);
  if (s.free_points().empty()) throw RenormError("degenerate: structure has no free points");
  const std::vector<AtomInfo> atom_list = atoms(s);

  NormSpec spec;
  for (const auto& a : atom_list) spec.atom_points.push_back(a.point);

  if (atom_list.size() == 1) {
    const std::string& a1 = atom_list.front().point;
    for (const auto& [p, lvl] : s.free_points()) {
      const Rat w = p == a1 ? Rat(1) : scheme.mu(p);
      spec.point_weight[p] = w;
      detail::push_functional(spec, {{p, w}});
    }
    return spec;
  }

  for (const auto& [p, lvl] : s.free_points()) {
    const Rat w = scheme.mu(p);
    spec.point_weight[p] = w;
    detail::push_functional(spec, {{p, w}});
  }
  for (std::size_t i = 0; i < atom_list.size(); ++i) {
    for (std::size_t j = i + 1; j < atom_list.size(); ++j) {
      const auto& ai = atom_list[i];
      const auto& aj = atom_list[j];
      const OctagonParams oct =
          make_octagon(consts.c, pair_rank(static_cast<long long>(ai.index), static_cast<long long>(aj.index)));
      const Rat wi = scheme.mu(ai.point);
      const Rat wj = scheme.mu(aj.point);
      detail::push_functional(spec, {{ai.point, wi}});
      detail::push_functional(spec, {{aj.point, wj}});
      detail::push_functional(spec, {{ai.point, Rat(oct.a * wi)}, {aj.point, Rat(oct.b * wj)}});
    }
  }
  return spec;
}

/// Largest C^k * alpha (k >= 0) not exceeding 1; its inverse recovers the
/// designated weight from a renormed point-mass datum.
inline Rat recover_base_weight(const Rat& alpha, const Rat& C) {
  if (alpha <= 0 || alpha > 1) throw RenormError("recover_base_weight needs 0 < alpha <= 1");
  if (C <= 1) throw RenormError("recover_base_weight needs C > 1");
  Rat best = alpha;
  Rat next = alpha * C;
  while (next <= 1) {
    best = next;
    next *= C;
  }
  return best;
}

}  // namespace amrenorm
