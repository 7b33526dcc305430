#pragma once

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrenorm/lp.hpp"
#include "amrenorm/renorm.hpp"
#include "amrenorm/structure.hpp"

namespace amrenorm {

/// A finitely supported measure on the structure's points (all of K, or K'
/// after reduction). Acts on x by sum coeff(t) * expand(x)(t).
struct Functional {
  std::map<std::string, Rat> coords;

  bool operator==(const Functional&) const = default;
};

class DualError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rat functional_action(const BenyaminiStructure& s, const Functional& f, const LatticeVector& x) {
  const FullFunction full = expand(s, x);
  Rat acc(0);
  for (const auto& [p, coeff] : f.coords) {
    auto it = full.values.find(p);
    if (it == full.values.end()) throw DualError("functional references unknown point '" + p + "'");
    acc += coeff * it->second;
  }
  return acc;
}

inline Rat total_variation(const Functional& f) {
  Rat acc(0);
  for (const auto& [p, coeff] : f.coords) acc += rat_abs(coeff);
  return acc;
}

inline bool is_reduced(const BenyaminiStructure& s, const Functional& f) {
  for (const auto& [p, coeff] : f.coords) {
    if (!s.has_point(p)) throw DualError("functional references unknown point '" + p + "'");
    if (coeff != 0 && !s.is_free(p)) return false;
  }
  return true;
}

namespace detail {

inline void drop_zeros(Functional& f) {
  for (auto it = f.coords.begin(); it != f.coords.end();) {
    if (it->second == 0)
      it = f.coords.erase(it);
    else
      ++it;
  }
}

inline LatticeVector random_vector_for_selfcheck(const BenyaminiStructure& s, std::mt19937_64& rng) {
  LatticeVector x;
  for (const auto& [p, lvl] : s.free_points()) {
    const long long num = static_cast<long long>(rng() % 17) - 8;
    const long long den = 1 + static_cast<long long>(rng() % 5);
    x.coords[p] = Rat(num, den);
  }
  return x;
}

}  // namespace detail

/// Moves all mass off linked points onto their chain roots: mass at a point
/// of level n whose root sits at level j picks up the factor C^(j-n) < 1.
/// Processes levels top-down, points in canonical order. The represented
/// functional is unchanged (self-checked against 20 random vectors) and the
/// total variation never increases.
inline Functional reduce_measure(const BenyaminiStructure& s, const Functional& f) {
  for (const auto& [p, coeff] : f.coords)
    if (!s.has_point(p)) throw DualError("functional references unknown point '" + p + "'");

  Functional out;
  for (int lvl = s.top_level(); lvl >= 1; --lvl) {
    for (const auto& p : s.points()) {
      if (s.info(p).level != lvl) continue;
      auto it = f.coords.find(p);
      if (it == f.coords.end() || it->second == 0) continue;
      const std::string& root = s.chain_root(p);
      if (root == p)
        out.coords[p] += it->second;
      else
        out.coords[root] += it->second * pow_rat(s.C(), s.info(root).level - lvl);
    }
  }
  detail::drop_zeros(out);

  std::mt19937_64 rng(0xA11CEULL);
  for (int k = 0; k < 20; ++k) {
    const LatticeVector x = detail::random_vector_for_selfcheck(s, rng);
    if (functional_action(s, f, x) != functional_action(s, out, x))
      throw std::logic_error("measure reduction changed the represented functional");
  }
  if (total_variation(out) > total_variation(f))
    throw std::logic_error("measure reduction increased the total variation");
  return out;
}

/// Stepwise variant: picks the lowest-level point carrying mass off K' and
/// moves that mass one hop, to the nearest chain member below. Same fixed
/// point as reduce_measure; kept for order-independence checks.
inline Functional reduce_measure_stepwise(const BenyaminiStructure& s, const Functional& f) {
  Functional cur = f;
  detail::drop_zeros(cur);
  for (;;) {
    std::string worst;
    for (const auto& p : s.points()) {
      auto it = cur.coords.find(p);
      if (it == cur.coords.end() || it->second == 0 || s.is_free(p)) continue;
      if (worst.empty() || s.info(p).level < s.info(worst).level) worst = p;
    }
    if (worst.empty()) break;
    // Lowest linked partner strictly below; chains are closed, so the direct
    // hop exists. Take the next member below `worst`.
    const auto& members = s.chain(worst);
    std::string target;
    for (const auto& mpt : members) {
      if (s.info(mpt).level < s.info(worst).level) target = mpt;  // members sorted by level
    }
    const Rat mass = cur.coords.at(worst);
    cur.coords.erase(worst);
    cur.coords[target] += mass * pow_rat(s.C(), s.info(target).level - s.info(worst).level);
    detail::drop_zeros(cur);
  }
  return cur;
}

/// The ell^1 norm of a reduced functional; this is the operator norm against
/// the base norm.
inline Rat dual_norm_base(const BenyaminiStructure& s, const Functional& f) {
  for (const auto& [p, coeff] : f.coords) {
    if (!s.has_point(p)) throw DualError("functional references unknown point '" + p + "'");
    if (coeff != 0 && !s.is_free(p)) throw DualError("dual_norm_base requires a reduced functional");
  }
  return total_variation(f);
}

/// LP cross-check: maximize f over the base-norm unit ball directly.
inline Rat dual_norm_base_lp(const BenyaminiStructure& s, const Functional& f) {
  const auto& fp = s.free_points();
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b, c;
  std::size_t idx = 0;
  std::map<std::string, std::size_t> col;
  for (const auto& [p, lvl] : fp) col[p] = idx++;
  c.assign(fp.size(), Rat(0));
  for (const auto& [p, coeff] : f.coords) {
    if (!s.is_free(p)) throw DualError("dual_norm_base_lp requires a reduced functional");
    c[col.at(p)] = rat_abs(coeff);
  }
  for (std::size_t i = 0; i < fp.size(); ++i) {
    std::vector<Rat> row(fp.size(), Rat(0));
    row[i] = 1;
    A.push_back(std::move(row));
    b.push_back(Rat(1));
  }
  const LpResult res = lp_maximize(A, b, c);
  if (res.status != LpResult::Status::Optimal) throw std::logic_error("base ball LP cannot be unbounded");
  return res.value;
}

/// Exact operator norm of a reduced functional against a NormSpec: a single
/// LP over the positive orthant after flipping signs (the norm is absolute
/// and monotone, so the optimum has the sign pattern of f).
inline Rat dual_norm_renorm(const NormSpec& spec, const Functional& f) {
  const std::vector<std::string> pts = spec.points();
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < pts.size(); ++i) col[pts[i]] = i;

  std::vector<Rat> c(pts.size(), Rat(0));
  for (const auto& [p, coeff] : f.coords) {
    auto it = col.find(p);
    if (it == col.end()) throw DualError("functional references a point outside the norm's domain: '" + p + "'");
    c[it->second] = rat_abs(coeff);
  }
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  for (const auto& g : spec.functionals) {
    std::vector<Rat> row(pts.size(), Rat(0));
    for (const auto& [p, coeff] : g) row[col.at(p)] = coeff;
    A.push_back(std::move(row));
    b.push_back(Rat(1));
  }
  const LpResult res = lp_maximize(A, b, c);
  if (res.status != LpResult::Status::Optimal)
    throw DualError("norm unit ball is unbounded; the spec does not cover every point");
  return res.value;
}

}  // namespace amrenorm
