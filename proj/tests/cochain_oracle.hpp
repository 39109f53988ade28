#pragma once

// Exhaustive oracles for 1-cochains on tiny models, written against the
// displayed formula for d rather than the library's differential.

#include <set>
#include <span>
#include <vector>

#include "psd/cochain.hpp"

namespace psd::testing {

// Independent differential of a 1-cochain given as a plain table.
inline std::vector<Residue> naive_d1(const GroupModel& m, int w, const std::vector<Residue>& f) {
  const auto& F = m.field();
  const std::size_t n = m.size();
  std::vector<Residue> out(n * n);
  for (ElemId g = 0; g < n; ++g) {
    Residue tw = 1;
    for (int k = 0; k < m.normalize_weight(w); ++k) tw = F.mul(tw, m.omega(g));
    for (ElemId h = 0; h < n; ++h) {
      out[g * n + h] = F.add(F.sub(F.mul(tw, f[h]), f[m.mul(g, h)]), f[g]);
    }
  }
  return out;
}

// All 1-cochains f (as tables) with df = y, by enumerating p^|G| candidates.
inline std::set<std::vector<Residue>> enumerate_preimages(const GroupModel& m, int w, std::span<const Residue> y) {
  std::set<std::vector<Residue>> out;
  const std::size_t n = m.size();
  std::vector<Residue> f(n, 0);
  const std::vector<Residue> target(y.begin(), y.end());
  while (true) {
    if (naive_d1(m, w, f) == target) out.insert(f);
    std::size_t k = 0;
    while (k < n && ++f[k] == m.prime()) f[k++] = 0;
    if (k == n) break;
  }
  return out;
}

inline std::set<std::vector<Residue>> affine_span(const GroupModel& m, const Cochain& base, const std::vector<Cochain>& dirs) {
  std::set<std::vector<Residue>> out;
  std::vector<Residue> coeff(dirs.size(), 0);
  while (true) {
    Cochain c = base;
    for (std::size_t i = 0; i < dirs.size(); ++i) c += dirs[i].scaled(coeff[i]);
    out.emplace(c.values().begin(), c.values().end());
    std::size_t k = 0;
    while (k < coeff.size() && ++coeff[k] == m.prime()) coeff[k++] = 0;
    if (k == coeff.size()) break;
  }
  return out;
}

}  // namespace psd::testing
