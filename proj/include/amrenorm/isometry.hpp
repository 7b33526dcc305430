#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "amrenorm/lp.hpp"
#include "amrenorm/renorm.hpp"
#include "amrenorm/structure.hpp"

namespace amrenorm {

class IsometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A weighted permutation (Tx)(t) = weights(t) * x(sigma(t)): the normal form
/// of a lattice isomorphism of a finite-dimensional coordinate lattice.
struct IsometryCandidate {
  std::map<std::string, std::string> sigma;
  std::map<std::string, Rat> weights;

  bool operator==(const IsometryCandidate&) const = default;
  bool is_identity() const {
    for (const auto& [t, img] : sigma)
      if (img != t) return false;
    for (const auto& [t, w] : weights)
      if (w != 1) return false;
    return true;
  }
};

inline LatticeVector apply_candidate(const IsometryCandidate& cand, const LatticeVector& x) {
  LatticeVector out;
  for (const auto& [t, img] : cand.sigma) {
    auto it = x.coords.find(img);
    if (it == x.coords.end()) throw IsometryError("candidate acts on a vector with the wrong domain");
    out.coords[t] = cand.weights.at(t) * it->second;
  }
  return out;
}

/// (a . b)(x) = a(b(x)).
inline IsometryCandidate compose(const IsometryCandidate& a, const IsometryCandidate& b) {
  IsometryCandidate out;
  for (const auto& [t, img_a] : a.sigma) {
    out.sigma[t] = b.sigma.at(img_a);
    out.weights[t] = a.weights.at(t) * b.weights.at(img_a);
  }
  return out;
}

inline IsometryCandidate inverse(const IsometryCandidate& cand) {
  IsometryCandidate out;
  for (const auto& [t, img] : cand.sigma) {
    out.sigma[img] = t;
    out.weights[img] = 1 / cand.weights.at(t);
  }
  return out;
}

/// The unique weights making T map every coordinate vector to a vector of
/// equal norm: weights(t) = norm(e_sigma(t)) / norm(e_t).
inline std::map<std::string, Rat> forced_weights(const NormSpec& spec,
                                                 const std::map<std::string, std::string>& sigma) {
  std::map<std::string, Rat> w;
  for (const auto& [t, img] : sigma) {
    auto nt = spec.point_weight.find(t);
    auto ni = spec.point_weight.find(img);
    if (nt == spec.point_weight.end() || ni == spec.point_weight.end())
      throw IsometryError("sigma is not a bijection of the norm's point set");
    w[t] = ni->second / nt->second;
  }
  return w;
}

/// The norm x -> spec(Tx) as an explicit functional list: the functional g
/// pulls back to h with h(sigma(p)) = g(p) * weights(p).
inline NormSpec pullback(const NormSpec& spec, const IsometryCandidate& cand) {
  std::vector<std::map<std::string, Rat>> funcs;
  for (const auto& g : spec.functionals) {
    std::map<std::string, Rat> h;
    for (const auto& [p, coeff] : g) h[cand.sigma.at(p)] += coeff * cand.weights.at(p);
    funcs.push_back(std::move(h));
  }
  return spec_from_functionals(std::move(funcs));
}

namespace detail {

inline std::vector<std::map<std::string, Rat>> canonical_functionals(const NormSpec& spec) {
  std::vector<std::map<std::string, Rat>> fs = spec.functionals;
  std::sort(fs.begin(), fs.end());
  return fs;
}

/// max of g over the unit ball of `ball`, by LP over the positive orthant.
inline Rat max_over_ball(const std::map<std::string, Rat>& g, const NormSpec& ball,
                         const std::vector<std::string>& pts, const std::map<std::string, std::size_t>& col) {
  std::vector<Rat> c(pts.size(), Rat(0));
  for (const auto& [p, coeff] : g) c[col.at(p)] = coeff;
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  for (const auto& f : ball.functionals) {
    std::vector<Rat> row(pts.size(), Rat(0));
    for (const auto& [p, coeff] : f) row[col.at(p)] = coeff;
    A.push_back(std::move(row));
    b.push_back(Rat(1));
  }
  const LpResult res = lp_maximize(A, b, c);
  if (res.status != LpResult::Status::Optimal)
    throw IsometryError("norm unit ball is unbounded; the spec does not cover every point");
  return res.value;
}

}  // namespace detail

/// Whether two functional lists define the same norm. Fast paths: equality of
/// coordinate norms (necessary), then equality of the canonicalized
/// functional sets (sufficient). Otherwise two-sided LP dominance: each
/// functional of one attains max <= 1 over the other's unit ball.
inline bool norms_equal(const NormSpec& s1, const NormSpec& s2) {
  if (s1.point_weight.size() != s2.point_weight.size())
    throw IsometryError("norms_equal requires the same point set");
  for (const auto& [p, w] : s1.point_weight)
    if (!s2.point_weight.count(p)) throw IsometryError("norms_equal requires the same point set");

  for (const auto& [p, w] : s1.point_weight)
    if (s2.point_weight.at(p) != w) return false;
  if (detail::canonical_functionals(s1) == detail::canonical_functionals(s2)) return true;

  std::vector<std::string> pts = s1.points();
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < pts.size(); ++i) col[pts[i]] = i;
  for (const auto& g : s1.functionals)
    if (detail::max_over_ball(g, s2, pts, col) > 1) return false;
  for (const auto& g : s2.functionals)
    if (detail::max_over_ball(g, s1, pts, col) > 1) return false;
  return true;
}

struct EnumerateOptions {
  std::size_t max_points = 8;
  unsigned workers = 1;
  bool atom_prefilter = false;
};

namespace detail {

/// Norms of the two-point screen vectors: entry (i, j, k) is the norm of the
/// vector with weighted coordinates profile[k] on points (i, j) and zeros
/// elsewhere. A forced-weight candidate maps such a vector to the vector with
/// the SAME weighted profile on (sigma^-1(i), sigma^-1(j)), so screening a
/// candidate is pure table comparison.
struct PairScreen {
  std::size_t n = 0;
  static constexpr std::size_t kProfiles = 5;
  std::vector<Rat> table;  // n*n*kProfiles; diagonal unused

  const Rat& at(std::size_t i, std::size_t j, std::size_t k) const { return table[(i * n + j) * kProfiles + k]; }
};

inline PairScreen build_pair_screen(const NormSpec& spec, const std::vector<std::string>& pts) {
  PairScreen scr;
  scr.n = pts.size();
  scr.table.assign(scr.n * scr.n * PairScreen::kProfiles, Rat(0));
  const Rat eps1(1, 1000000), eps2(1, 1000000000);
  const Rat profiles[PairScreen::kProfiles][2] = {{Rat(1), Rat(1)},
                                                  {Rat(1), Rat(1) - eps1},
                                                  {Rat(1) - eps1, Rat(1)},
                                                  {Rat(1), Rat(1) - eps2},
                                                  {Rat(1) - eps2, Rat(1)}};
  LatticeVector x;
  for (const auto& p : pts) x.coords[p] = 0;
  for (std::size_t i = 0; i < scr.n; ++i) {
    for (std::size_t j = 0; j < scr.n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < PairScreen::kProfiles; ++k) {
        x.coords[pts[i]] = profiles[k][0] / spec.point_weight.at(pts[i]);
        x.coords[pts[j]] = profiles[k][1] / spec.point_weight.at(pts[j]);
        scr.table[(i * scr.n + j) * PairScreen::kProfiles + k] = spec.value(x);
        x.coords[pts[i]] = 0;
        x.coords[pts[j]] = 0;
      }
    }
  }
  return scr;
}

inline std::string candidate_key(const IsometryCandidate& c) {
  std::string key;
  for (const auto& [t, img] : c.sigma) {
    key += t;
    key += "->";
    key += img;
    key += '*';
    key += rat_str(c.weights.at(t));
    key += ';';
  }
  return key;
}

}  // namespace detail

/// Brute-force enumeration of all lattice isometries of (R^{K'}, spec): every
/// bijection sigma of the point set with its forced weights, kept iff the
/// pulled-back norm equals spec. The result contains the identity and is
/// closed under composition and inverses (asserted). With atom_prefilter set
/// and >= 2 atoms recorded on the spec, bijections moving an atom are skipped
/// up front; survivors are verified exactly as without the filter.
inline std::vector<IsometryCandidate> enumerate_isometries(const NormSpec& spec, const EnumerateOptions& opts = {}) {
  const std::vector<std::string> pts = spec.points();
  if (pts.empty()) throw IsometryError("degenerate: empty point set");
  if (pts.size() > opts.max_points)
    throw IsometryError("point set larger than the enumeration bound (" + std::to_string(opts.max_points) + ")");

  const detail::PairScreen screen = detail::build_pair_screen(spec, pts);
  const auto spec_canonical = detail::canonical_functionals(spec);

  std::set<std::string> atom_set(spec.atom_points.begin(), spec.atom_points.end());
  const bool prefilter = opts.atom_prefilter && atom_set.size() >= 2;

  const std::size_t n = pts.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> all_perms;
  do {
    all_perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  auto test_perm = [&](const std::vector<std::size_t>& pm, std::vector<IsometryCandidate>& found) {
    if (prefilter) {
      for (std::size_t i = 0; i < n; ++i)
        if (pm[i] != i && atom_set.count(pts[i])) return;
    }
    // T maps the (i, j) screen vector to the (inv[i], inv[j]) one.
    std::vector<std::size_t> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[pm[i]] = i;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = 0; k < detail::PairScreen::kProfiles; ++k)
          if (screen.at(i, j, k) != screen.at(inv[i], inv[j], k)) return;

    IsometryCandidate cand;
    for (std::size_t i = 0; i < n; ++i) cand.sigma[pts[i]] = pts[pm[i]];
    cand.weights = forced_weights(spec, cand.sigma);
    const NormSpec pulled = pullback(spec, cand);
    if (detail::canonical_functionals(pulled) == spec_canonical || norms_equal(spec, pulled))
      found.push_back(std::move(cand));
  };

  std::vector<IsometryCandidate> result;
  const unsigned workers = std::max(1u, opts.workers);
  if (workers == 1 || all_perms.size() < 64) {
    for (const auto& pm : all_perms) test_perm(pm, result);
  } else {
    std::vector<std::vector<IsometryCandidate>> buckets(workers);
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w]() {
        for (std::size_t k = w; k < all_perms.size(); k += workers) test_perm(all_perms[k], buckets[w]);
      });
    }
    for (auto& t : threads) t.join();
    for (unsigned w = 0; w < workers; ++w)
      for (auto& cand : buckets[w]) result.push_back(std::move(cand));
    // Workers striped the lexicographic permutation list; restore one order.
    std::sort(result.begin(), result.end(), [](const IsometryCandidate& a, const IsometryCandidate& b) {
      return detail::candidate_key(a) < detail::candidate_key(b);
    });
  }

  // Group axioms.
  std::set<std::string> keys;
  bool has_identity = false;
  for (const auto& c : result) {
    keys.insert(detail::candidate_key(c));
    if (c.is_identity()) has_identity = true;
  }
  if (!has_identity) throw std::logic_error("isometry enumeration lost the identity");
  for (const auto& a : result) {
    if (!keys.count(detail::candidate_key(inverse(a))))
      throw std::logic_error("isometry set is not closed under inverses");
    for (const auto& b : result)
      if (!keys.count(detail::candidate_key(compose(a, b))))
        throw std::logic_error("isometry set is not closed under composition");
  }
  return result;
}

}  // namespace amrenorm
