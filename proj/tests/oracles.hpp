#pragma once

// Brute-force checks used as independent oracles: they only use dense
// matrices and plain echelon bases, never the MeatAxe.

#include <algorithm>
#include <vector>

#include "chevrep/ff.hpp"
#include "chevrep/modrep.hpp"

namespace oracle {

using chevrep::ff::EchelonBasis;
using chevrep::ff::Matrix;
using chevrep::ff::u32;

inline std::vector<Matrix> dense_ops(const chevrep::modrep::ActionRep& rep) {
  std::vector<Matrix> ms;
  for (std::size_t k = 0; k < rep.ops.size(); ++k) ms.push_back(rep.dense(static_cast<int>(k)));
  return ms;
}

inline std::size_t spin_dim(const std::vector<Matrix>& ms, const std::vector<u32>& v) {
  const std::size_t n = v.size();
  EchelonBasis basis(ms.front().modulus(), n);
  std::vector<std::vector<u32>> queue;
  if (basis.insert(v)) queue.push_back(v);
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& m : ms) {
      auto w = m.apply(queue[i]);
      if (basis.insert(w)) queue.push_back(m.apply(queue[i]));
    }
  return basis.dim();
}

// Every line of the module spins to the whole module.
inline bool irreducible_by_line_spin(const chevrep::modrep::ActionRep& rep) {
  const auto ms = dense_ops(rep);
  const std::size_t n = rep.dim();
  const u32 p = rep.p;
  std::vector<u32> v(n, 0);
  for (std::size_t lead = 0; lead < n; ++lead) {
    const std::size_t tail = n - lead - 1;
    std::size_t total = 1;
    for (std::size_t i = 0; i < tail; ++i) total *= p;
    for (std::size_t k = 0; k < total; ++k) {
      std::fill(v.begin(), v.end(), 0);
      v[lead] = 1;
      std::size_t t = k;
      for (std::size_t i = 0; i < tail; ++i, t /= p) v[lead + 1 + i] = static_cast<u32>(t % p);
      if (spin_dim(ms, v) != n) return false;
    }
  }
  return true;
}

// Composition factor dimensions of a module whose weight spaces are lines
// with pairwise distinct weights: submodules are then exactly the
// operator-closed sets of weight lines, found by exhaustive enumeration.
inline std::vector<std::size_t> composition_by_weight_lines(const chevrep::modrep::ActionRep& rep) {
  const std::size_t nb = rep.blocks.size();
  for (const auto& b : rep.blocks) {
    if (b.dim != 1) return {};
  }
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = i + 1; j < nb; ++j)
      if (rep.blocks[i].weight == rep.blocks[j].weight) return {};
  const auto ms = dense_ops(rep);
  auto closed = [&](unsigned mask) {
    for (const auto& m : ms)
      for (std::size_t s = 0; s < nb; ++s) {
        if (!(mask >> s & 1)) continue;
        for (std::size_t d = 0; d < nb; ++d)
          if (m.at(rep.blocks[d].offset, rep.blocks[s].offset) && !(mask >> d & 1)) return false;
      }
    return true;
  };
  std::vector<unsigned> subs;
  for (unsigned mask = 0; mask < (1u << nb); ++mask)
    if (closed(mask)) subs.push_back(mask);
  // Maximal chain: repeatedly step to a smallest closed proper superset.
  std::vector<std::size_t> dims;
  unsigned cur = 0;
  const unsigned full = (1u << nb) - 1;
  while (cur != full) {
    unsigned best = full;
    for (unsigned s : subs)
      if ((s & cur) == cur && s != cur && __builtin_popcount(s) < __builtin_popcount(best)) best = s;
    dims.push_back(static_cast<std::size_t>(__builtin_popcount(best) - __builtin_popcount(cur)));
    cur = best;
  }
  std::sort(dims.begin(), dims.end());
  return dims;
}

}  // namespace oracle
