#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrenorm/renorm.hpp"
#include "amrenorm/structure.hpp"
#include "amrenorm/transform.hpp"

namespace amrenorm {

namespace detail {

inline std::uint64_t rnd_below(std::mt19937_64& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

inline bool rnd_chance(std::mt19937_64& rng, std::uint64_t num, std::uint64_t den) {
  return rnd_below(rng, den) < num;
}

}  // namespace detail

struct GenParams {
  int levels = 2;
  int cells_per_level = 2;
  // probability of attaching an upper-level point to an existing chain, in
  // thousandths (exact, so generation is reproducible bit for bit)
  int link_density_permille = 300;
  int perfect_permille = 0;
  std::uint64_t seed = 1;
  Rat C = Rat(3, 2);
};

/// Deterministic random structure: levels of isolated/perfect cells, chains
/// attached under the validation rules (one point per level per chain, clique
/// closure, perfect roots only copy into perfect cells).
inline BenyaminiStructure gen_structure(const GenParams& params) {
  if (params.levels < 1 || params.cells_per_level < 1) throw std::invalid_argument("gen: bad sizes");
  if (params.link_density_permille < 0 || params.link_density_permille > 1000 || params.perfect_permille < 0 ||
      params.perfect_permille > 1000)
    throw std::invalid_argument("gen: densities must lie in [0, 1000] permille");
  std::mt19937_64 rng(params.seed * 0x9E3779B97F4A7C15ULL + 1);

  std::vector<Level> levels;
  int point_counter = 0;
  int cell_counter = 0;
  struct Pt {
    std::string id;
    int level;
    CellKind kind;
  };
  std::vector<Pt> all;
  for (int n = 1; n <= params.levels; ++n) {
    Level lvl;
    lvl.index = n;
    for (int c = 0; c < params.cells_per_level; ++c) {
      Cell cell;
      cell.id = "c" + std::to_string(++cell_counter);
      const bool perfect =
          detail::rnd_chance(rng, static_cast<std::uint64_t>(params.perfect_permille), 1000);
      cell.kind = perfect ? CellKind::Perfect : CellKind::Isolated;
      const int npts = perfect ? 2 + static_cast<int>(detail::rnd_below(rng, 2)) : 1;
      for (int k = 0; k < npts; ++k) {
        std::string id = "t" + std::to_string(++point_counter);
        cell.points.push_back(id);
        all.push_back({id, n, cell.kind});
      }
      lvl.cells.push_back(std::move(cell));
    }
    levels.push_back(std::move(lvl));
  }

  // Chains: each chain is a clique with at most one point per level. A point
  // at level n joins an existing chain (topped below n) with the configured
  // probability; a perfect-rooted chain only accepts perfect points.
  struct Chain {
    std::vector<std::string> members;  // root first
    std::vector<int> levels;
    bool has_perfect_member = false;
    int top_level = 0;
  };
  std::vector<Chain> chains;
  std::map<std::string, std::size_t> chain_of;
  for (const auto& pt : all) {
    if (pt.level == 1) continue;
    if (!detail::rnd_chance(rng, static_cast<std::uint64_t>(params.link_density_permille), 1000)) continue;
    std::vector<std::size_t> candidates;
    for (std::size_t ci = 0; ci < chains.size(); ++ci) {
      if (chains[ci].top_level >= pt.level) continue;
      if (chains[ci].has_perfect_member && pt.kind != CellKind::Perfect) continue;
      candidates.push_back(ci);
    }
    std::vector<std::string> singles;  // unchained points below, as fresh roots
    for (const auto& other : all) {
      if (other.level >= pt.level || chain_of.count(other.id)) continue;
      if (other.kind == CellKind::Perfect && pt.kind != CellKind::Perfect) continue;
      singles.push_back(other.id);
    }
    const std::uint64_t total = candidates.size() + singles.size();
    if (total == 0) continue;
    const std::uint64_t pick = detail::rnd_below(rng, total);
    std::size_t ci;
    if (pick < candidates.size()) {
      ci = candidates[pick];
    } else {
      const auto& root_id = singles[pick - candidates.size()];
      int root_level = 0;
      bool root_perfect = false;
      for (const auto& other : all)
        if (other.id == root_id) {
          root_level = other.level;
          root_perfect = other.kind == CellKind::Perfect;
        }
      chains.push_back(Chain{{root_id}, {root_level}, root_perfect, root_level});
      chain_of[root_id] = chains.size() - 1;
      ci = chains.size() - 1;
    }
    Chain& chain = chains[ci];
    chain.members.push_back(pt.id);
    chain.levels.push_back(pt.level);
    chain.top_level = pt.level;
    chain.has_perfect_member = chain.has_perfect_member || pt.kind == CellKind::Perfect;
    chain_of[pt.id] = ci;
  }

  std::map<std::pair<int, int>, std::vector<std::pair<std::string, std::string>>> pair_map;
  for (const auto& chain : chains)
    for (std::size_t i = 0; i < chain.members.size(); ++i)
      for (std::size_t j = i + 1; j < chain.members.size(); ++j)
        pair_map[{chain.levels[i], chain.levels[j]}].push_back({chain.members[i], chain.members[j]});
  std::vector<Link> links;
  for (auto& [lvls, pairs] : pair_map) links.push_back(Link{lvls.first, lvls.second, std::move(pairs)});

  return BenyaminiStructure(params.C, std::move(levels), std::move(links));
}

/// Purely atomic structure (all cells isolated) with a free-point count in
/// [min_free, max_free], found by a deterministic parameter walk.
inline BenyaminiStructure gen_atomic_structure(std::uint64_t seed, std::size_t min_free, std::size_t max_free,
                                               const Rat& C = Rat(3, 2)) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed ^ (attempt * 0xD1B54A32D192ED03ULL + 7));
    GenParams p;
    p.levels = 1 + static_cast<int>(detail::rnd_below(rng, 3));
    p.cells_per_level = 1 + static_cast<int>(detail::rnd_below(rng, 3));
    p.link_density_permille = static_cast<int>(detail::rnd_below(rng, 700));
    p.perfect_permille = 0;
    p.seed = seed + attempt * 1315423911ULL;
    p.C = C;
    BenyaminiStructure s = gen_structure(p);
    const std::size_t k = s.free_points().size();
    if (k >= min_free && k <= max_free) return s;
  }
}

/// Structure with no atoms: every cell perfect.
inline BenyaminiStructure gen_no_atom_structure(std::uint64_t seed, const Rat& C = Rat(3, 2)) {
  GenParams p;
  std::mt19937_64 rng(seed);
  p.levels = 1 + static_cast<int>(detail::rnd_below(rng, 2));
  p.cells_per_level = 1 + static_cast<int>(detail::rnd_below(rng, 2));
  p.link_density_permille = 250;
  p.perfect_permille = 1000;
  p.seed = seed;
  p.C = C;
  return gen_structure(p);
}

/// Structure with exactly one atom: one isolated cell on level 1, perfect
/// cells elsewhere.
inline BenyaminiStructure gen_one_atom_structure(std::uint64_t seed, const Rat& C = Rat(3, 2)) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed ^ (attempt * 0xBF58476D1CE4E5B9ULL + 3));
    GenParams p;
    p.levels = 1 + static_cast<int>(detail::rnd_below(rng, 2));
    p.cells_per_level = 1 + static_cast<int>(detail::rnd_below(rng, 2));
    p.link_density_permille = 250;
    p.perfect_permille = 1000;
    p.seed = seed + 977 * attempt;
    p.C = C;
    BenyaminiStructure base = gen_structure(p);
    std::vector<Level> levels = base.levels();
    Cell atom_cell;
    atom_cell.id = "atomcell";
    atom_cell.kind = CellKind::Isolated;
    atom_cell.points = {"atom"};
    levels.front().cells.push_back(atom_cell);
    BenyaminiStructure s(base.C(), std::move(levels), base.links());
    if (atoms(s).size() == 1) return s;
  }
}

/// Random vector with small exact-rational coordinates.
inline LatticeVector gen_vector(const BenyaminiStructure& s, std::mt19937_64& rng, int max_num = 8,
                                int max_den = 6) {
  LatticeVector x;
  for (const auto& [p, lvl] : s.free_points()) {
    const long long num =
        static_cast<long long>(detail::rnd_below(rng, 2 * static_cast<std::uint64_t>(max_num) + 1)) - max_num;
    const long long den = 1 + static_cast<long long>(detail::rnd_below(rng, static_cast<std::uint64_t>(max_den)));
    x.coords[p] = Rat(num, den);
  }
  return x;
}

inline LatticeVector gen_positive_vector(const BenyaminiStructure& s, std::mt19937_64& rng, int max_num = 8,
                                         int max_den = 6) {
  return lattice_abs(gen_vector(s, rng, max_num, max_den));
}

/// Valid constants pairs, cycled deterministically.
inline RenormConstants pick_constants(std::mt19937_64& rng) {
  static const std::pair<const char*, const char*> table[] = {
      {"3/2", "11/10"}, {"4/3", "11/10"}, {"7/4", "11/10"}, {"6/5", "21/20"}, {"9/5", "6/5"},
  };
  const auto& [C, c] = table[detail::rnd_below(rng, std::size(table))];
  RenormConstants consts{parse_rat(C), parse_rat(c)};
  consts.validate();
  return consts;
}

/// Random sublattice model: a point set with some planted C-power
/// proportionality pairs (emitted as relations) and generators that honor
/// them.
inline SublatticeModel gen_sublattice(std::uint64_t seed, const Rat& C) {
  std::mt19937_64 rng(seed * 0x94D049BB133111EBULL + 11);
  SublatticeModel m;
  const int n_points = 3 + static_cast<int>(detail::rnd_below(rng, 6));
  for (int i = 0; i < n_points; ++i) m.H.push_back("h" + std::to_string(i + 1));

  // Plant proportionality classes: each class a short chain t = C^k * s.
  std::vector<std::string> reps;
  std::map<std::string, std::pair<std::string, long long>> rep_of;  // point -> (rep, power of C vs rep)
  std::size_t i = 0;
  while (i < m.H.size()) {
    const std::string& rep = m.H[i];
    reps.push_back(rep);
    rep_of[rep] = {rep, 0};
    std::size_t cls = 1;
    while (i + cls < m.H.size() && cls < 3 && detail::rnd_chance(rng, 35, 100)) {
      const std::string& member = m.H[i + cls];
      const long long k = 1 + static_cast<long long>(detail::rnd_below(rng, 2));
      const long long prev_k = rep_of[m.H[i + cls - 1]].second;
      rep_of[member] = {rep, prev_k + k};
      // x(member) = C^-(prev_k + k) * x(rep): record against the previous
      // member so chains exercise transitive detection.
      m.relations.push_back(Relation{member, m.H[i + cls - 1], pow_rat(C, -k)});
      ++cls;
    }
    i += cls;
  }

  const int n_gens = 2 + static_cast<int>(detail::rnd_below(rng, 3));
  for (int g = 0; g < n_gens; ++g) {
    std::map<std::string, Rat> gen;
    for (const auto& rep : reps) {
      if (detail::rnd_chance(rng, 75, 100)) {
        // Keep every propagated value within [0, 1]: members carry
        // C^-k * value(rep) <= value(rep).
        const long long num = 1 + static_cast<long long>(detail::rnd_below(rng, 6));
        gen[rep] = Rat(num, 6);
      }
    }
    for (const auto& p : m.H) {
      const auto& [rep, k] = rep_of[p];
      if (p == rep) continue;
      auto it = gen.find(rep);
      if (it != gen.end()) gen[p] = it->second * pow_rat(C, -k);
    }
    m.generators.push_back(std::move(gen));
  }
  // Make sure supports cover every planted class somewhere (otherwise the
  // class sits in F and silently disappears, which is fine but dull).
  std::map<std::string, Rat> cover;
  for (const auto& rep : reps) cover[rep] = Rat(1, 2);
  for (const auto& p : m.H) {
    const auto& [rep, k] = rep_of[p];
    if (p != rep) cover[p] = cover[rep] * pow_rat(C, -k);
  }
  m.generators.push_back(std::move(cover));
  validate_model(m);
  return m;
}

}  // namespace amrenorm
