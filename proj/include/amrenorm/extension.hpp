#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrenorm/structure.hpp"

namespace amrenorm {

/// Values on every point of a contiguous level range [from_level .. to_level].
struct PartialFunction {
  int from_level = 1;
  int to_level = 1;
  std::map<std::string, Rat> values;

  bool operator==(const PartialFunction&) const = default;
};

class ExtensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_partial_domain(const BenyaminiStructure& s, const PartialFunction& x) {
  if (x.from_level < 1 || x.to_level > s.top_level() || x.from_level > x.to_level)
    throw ExtensionError("level range [" + std::to_string(x.from_level) + ".." + std::to_string(x.to_level) +
                         "] is not a valid range of the structure");
  std::size_t expected = 0;
  for (const auto& p : s.points()) {
    const int lvl = s.info(p).level;
    if (lvl >= x.from_level && lvl <= x.to_level) {
      ++expected;
      if (!x.values.count(p)) throw ExtensionError("partial function is missing point '" + p + "'");
    }
  }
  if (x.values.size() != expected)
    throw ExtensionError("partial function carries points outside its level range");
}

/// Derives root values from a partial function. A chain touching the range
/// determines its root value via value(root) = C^(i - r) * value(member at
/// level i); all touching members must agree, which is exactly consistency of
/// the input. Roots of untouched chains are absent from the result.
inline std::map<std::string, Rat> derive_root_values(const BenyaminiStructure& s, const PartialFunction& x) {
  std::map<std::string, Rat> roots;
  for (const auto& [p, value] : x.values) {
    const std::string& root = s.chain_root(p);
    const int r = s.info(root).level;
    const int i = s.info(p).level;
    const Rat rv = i == r ? value : Rat(value * pow_rat(s.C(), i - r));
    auto [it, inserted] = roots.emplace(root, rv);
    if (!inserted && it->second != rv)
      throw ExtensionError("inconsistent input: chain of '" + root + "' carries conflicting values");
  }
  return roots;
}

inline FullFunction expand_roots(const BenyaminiStructure& s, const std::map<std::string, Rat>& roots) {
  LatticeVector v = zero_vector(s);
  for (const auto& [p, val] : roots) v.coords.at(p) = val;
  return expand(s, v);
}

inline Rat sup_on_level(const BenyaminiStructure& s, const std::map<std::string, Rat>& values, int level) {
  Rat sup(0);
  for (const auto& [p, v] : values)
    if (s.info(p).level == level) sup = std::max(sup, rat_abs(v));
  return sup;
}

/// sup_{K_j}|result| <= max_{lo <= i <= hi} C^(i-j) sup_{K_i}|input| for every
/// level j outside [lo..hi] covered by `check_levels`.
inline void assert_sup_bounds(const BenyaminiStructure& s, const std::map<std::string, Rat>& input, int lo, int hi,
                              const std::map<std::string, Rat>& result, const std::vector<int>& check_levels) {
  std::vector<Rat> input_sup(static_cast<std::size_t>(hi - lo + 1));
  for (int i = lo; i <= hi; ++i) input_sup[static_cast<std::size_t>(i - lo)] = sup_on_level(s, input, i);
  for (int j : check_levels) {
    Rat bound(0);
    for (int i = lo; i <= hi; ++i)
      bound = std::max(bound, Rat(pow_rat(s.C(), i - j) * input_sup[static_cast<std::size_t>(i - lo)]));
    if (sup_on_level(s, result, j) > bound)
      throw std::logic_error("extension sup bound violated at level " + std::to_string(j));
  }
}

inline void check_domination_on_range(const BenyaminiStructure& s, const PartialFunction& x,
                                      const FullFunction* lower, const FullFunction* upper) {
  for (const auto& [p, v] : x.values) {
    if (lower && v < lower->values.at(p))
      throw ExtensionError("domination violated on input range: value at '" + p + "' below the lower bound");
    if (upper && v > upper->values.at(p))
      throw ExtensionError("domination violated on input range: value at '" + p + "' above the upper bound");
  }
}

}  // namespace detail

/// Extends a consistent function on levels [1..N] to the whole structure.
/// Linked points are forced by the C-power rule; free points above N get 0,
/// clamped into [0, dominator] when a dominator is supplied. The sup bound
/// sup_{K_j}|out| <= max_i C^(i-j) sup_{K_i}|x| holds exactly for j > N.
inline FullFunction extend_down(const BenyaminiStructure& s, const PartialFunction& x,
                                const std::optional<LatticeVector>& dominator = {}) {
  if (x.from_level != 1) throw ExtensionError("extend_down input must start at level 1");
  detail::check_partial_domain(s, x);

  std::optional<FullFunction> dom;
  if (dominator) {
    check_vector_domain(s, *dominator);
    for (const auto& [p, v] : dominator->coords)
      if (v < 0) throw ExtensionError("dominator must be nonnegative");
    dom = expand(s, *dominator);
    FullFunction zero_full;
    detail::check_domination_on_range(s, x, nullptr, &*dom);
    for (const auto& [p, v] : x.values)
      if (v < 0) throw ExtensionError("dominated extension requires nonnegative input");
  }

  std::map<std::string, Rat> roots = detail::derive_root_values(s, x);
  FullFunction out = detail::expand_roots(s, roots);
  for (const auto& [p, v] : x.values)
    if (out.values.at(p) != v) throw ExtensionError("inconsistent input: link relations fail on [1..N]");

  std::vector<int> above;
  for (int j = x.to_level + 1; j <= s.top_level(); ++j) above.push_back(j);
  detail::assert_sup_bounds(s, x.values, x.from_level, x.to_level, out.values, above);
  if (dom)
    for (const auto& [p, v] : out.values)
      if (v < 0 || v > dom->values.at(p)) throw std::logic_error("dominated extension left [0, y]");
  return out;
}

/// Extends a consistent function on [L..N] down to level 1 (values grow by
/// C^(i-j) >= 1 along links; unforced points below L get 0).
inline PartialFunction extend_up(const BenyaminiStructure& s, const PartialFunction& x) {
  detail::check_partial_domain(s, x);
  std::map<std::string, Rat> roots = detail::derive_root_values(s, x);
  FullFunction full = detail::expand_roots(s, roots);
  for (const auto& [p, v] : x.values)
    if (full.values.at(p) != v) throw ExtensionError("inconsistent input: link relations fail on [L..N]");

  PartialFunction out;
  out.from_level = 1;
  out.to_level = x.to_level;
  for (const auto& p : s.points())
    if (s.info(p).level <= x.to_level) out.values[p] = full.values.at(p);

  std::vector<int> below;
  for (int j = 1; j < x.from_level; ++j) below.push_back(j);
  detail::assert_sup_bounds(s, x.values, x.from_level, x.to_level, out.values, below);
  return out;
}

/// Extends a consistent function on [L..N] to the whole structure, upward then
/// downward. Optional bounds: with `upper` alone this is the nonnegative
/// dominated extension (0 <= out <= upper); with both, out is clamped into
/// [lower, upper] at unforced points. The sup bound is asserted whenever no
/// lower bound is present (a two-sided clamp may exceed it by design).
inline FullFunction extend_range(const BenyaminiStructure& s, const PartialFunction& x,
                                 const std::optional<LatticeVector>& upper = {},
                                 const std::optional<LatticeVector>& lower = {}) {
  detail::check_partial_domain(s, x);
  if (lower && !upper) throw ExtensionError("a lower bound requires an upper bound");

  std::optional<FullFunction> up_full, lo_full;
  if (upper) {
    check_vector_domain(s, *upper);
    up_full = expand(s, *upper);
  }
  if (lower) {
    check_vector_domain(s, *lower);
    lo_full = expand(s, *lower);
  }
  if (upper && !lower) {
    for (const auto& [p, v] : upper->coords)
      if (v < 0) throw ExtensionError("dominator must be nonnegative");
    for (const auto& [p, v] : x.values)
      if (v < 0) throw ExtensionError("dominated extension requires nonnegative input");
  }
  detail::check_domination_on_range(s, x, lo_full ? &*lo_full : nullptr, up_full ? &*up_full : nullptr);

  std::map<std::string, Rat> roots = detail::derive_root_values(s, x);
  for (const auto& [p, lvl] : s.free_points()) {
    if (roots.count(p)) continue;
    Rat v(0);
    if (lo_full) v = std::max(v, lo_full->values.at(p));
    if (up_full) {
      const Rat& cap = up_full->values.at(p);
      if (lo_full && lo_full->values.at(p) > cap)
        throw ExtensionError("infeasible domination: bounds cross at unforced point '" + p + "'");
      v = std::min(v, cap);
    }
    roots.emplace(p, v);
  }

  FullFunction out = detail::expand_roots(s, roots);
  for (const auto& [p, v] : x.values)
    if (out.values.at(p) != v) throw ExtensionError("inconsistent input: link relations fail on the range");
  for (const auto& [p, v] : out.values) {
    if (lo_full && v < lo_full->values.at(p)) throw std::logic_error("extension left the domination interval");
    if (up_full && v > up_full->values.at(p)) throw std::logic_error("extension left the domination interval");
  }
  if (!lower) {
    std::vector<int> outside;
    for (int j = 1; j <= s.top_level(); ++j)
      if (j < x.from_level || j > x.to_level) outside.push_back(j);
    detail::assert_sup_bounds(s, x.values, x.from_level, x.to_level, out.values, outside);
  }
  return out;
}

namespace detail {

inline void check_bump_conclusions(const BenyaminiStructure& s, const FullFunction& f, const std::string& t,
                                   const std::string& s2, const std::set<std::string>& U,
                                   const std::set<std::string>& V, const Rat& alpha, const Rat& beta) {
  const int m = s.info(t).level;
  const int n = s.info(s2).level;
  for (const auto& [p, v] : f.values) {
    const int j = s.info(p).level;
    if (v < 0) throw std::logic_error("bump produced a negative value");
    if (j < m && v != 0) throw std::logic_error("bump is nonzero below its lower level");
    if (m < n && j == m && !U.count(p) && v != 0) throw std::logic_error("bump is nonzero on K_m \\ U");
    if (m < n && j > m && j < n && v > pow_rat(s.C(), m - j) * alpha)
      throw std::logic_error("bump exceeds C^(m-j) alpha strictly between the levels");
    if (j == n && v > std::max(Rat(pow_rat(s.C(), m - n) * alpha), beta))
      throw std::logic_error("bump exceeds (C^(m-n) alpha) v beta on the upper level");
    if (j > n && v > std::max(Rat(pow_rat(s.C(), m - j) * alpha), Rat(pow_rat(s.C(), n - j) * beta)))
      throw std::logic_error("bump exceeds its tail bound above the upper level");
  }
  if (f.values.at(t) != alpha || f.values.at(s2) != beta)
    throw std::logic_error("bump misses its prescribed values");
  for (const auto& p : U)
    if (f.values.at(p) > alpha) throw std::logic_error("bump exceeds alpha on U");
  for (const auto& p : V)
    if (f.values.at(p) > beta) throw std::logic_error("bump exceeds beta on V");
}

}  // namespace detail

/// The separation witness: a nonnegative consistent function with value alpha
/// at t (level m), beta at s2 (level n >= m), zero at every other free point
/// of levels <= n, extended downward. U and V are free-point subsets of the
/// two levels with t in U, s2 in V, U and V disjoint.
inline FullFunction two_point_bump(const BenyaminiStructure& s, const std::string& t, const std::string& s2,
                                   const std::set<std::string>& U, const std::set<std::string>& V,
                                   const Rat& alpha, const Rat& beta) {
  if (alpha < 0 || beta < 0) throw ExtensionError("bump heights must be nonnegative");
  if (!s.is_free(t) || !s.is_free(s2)) throw ExtensionError("bump points must be free points");
  const int m = s.info(t).level;
  const int n = s.info(s2).level;
  if (m > n) throw ExtensionError("bump requires level(t) <= level(s2)");
  if (!U.count(t)) throw ExtensionError("U must contain t");
  if (!V.count(s2)) throw ExtensionError("V must contain s2");
  for (const auto& p : U) {
    if (!s.is_free(p) || s.info(p).level != m) throw ExtensionError("U must consist of free points of level(t)");
    if (V.count(p)) throw ExtensionError("U and V must be disjoint");
  }
  for (const auto& p : V)
    if (!s.is_free(p) || s.info(p).level != n) throw ExtensionError("V must consist of free points of level(s2)");

  std::map<std::string, Rat> roots;
  roots[t] = alpha;
  roots[s2] = beta;
  FullFunction seeded = detail::expand_roots(s, roots);

  PartialFunction pf;
  pf.from_level = 1;
  pf.to_level = n;
  for (const auto& p : s.points())
    if (s.info(p).level <= n) pf.values[p] = seeded.values.at(p);

  FullFunction out = extend_down(s, pf);
  detail::check_bump_conclusions(s, out, t, s2, U, V, alpha, beta);
  return out;
}

}  // namespace amrenorm
