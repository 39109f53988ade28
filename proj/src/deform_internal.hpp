#pragma once

// Helpers shared by the deformation pipeline sources.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "psd/deform.hpp"
#include "psd/solver.hpp"

namespace psd::detail {

// -(sum of terms), all of one weight.
LazyTwoCochain negated_sum(std::uint32_t p, std::vector<LazyTwoCochain> terms);

// sum_i coeffs[i] * basis[i] as a 1-cochain of the given weight.
Cochain combine(const ModelPtr& model, int weight, const std::vector<Cochain>& basis,
                std::span<const Residue> coeffs);

// Finds x in F_p^k with residual(x) = 0 for an affine residual map, by probing
// the origin and the unit vectors and then verifying. Free variables are zero,
// so parameters listed first are preferred as pivots.
std::optional<std::vector<Residue>> affine_solve(
    const PrimeField& field, std::size_t k,
    const std::function<std::vector<Residue>(std::span<const Residue>)>& residual);

// rho(e) = 1 and rho(g s) = rho(g) rho(s) on every generator edge; on small
// full-table models every pair is checked instead.
bool is_homomorphism(const GroupModel& model, const std::function<GmaElement(ElemId)>& rho);

// Vectors over the local ids of I_p spanning the allowed local classes: the
// declared flat tables restricted to inertia, plus the coboundary of 1 when
// the weight is nontrivial on I_p.
std::vector<std::vector<Residue>> local_span_at_p(const GroupModel& model, int weight,
                                                  const std::vector<std::vector<Residue>>& tables);
bool in_span(const PrimeField& f, const std::vector<std::vector<Residue>>& basis, std::span<const Residue> v);
// Values of a global 1-cochain on I_p, in local id order.
std::vector<Residue> on_inertia_at_p(const GroupModel& model, const std::function<Residue(ElemId)>& f);

// (1, 0; -x + y eps, 1) in E_n.
GmaElement lower_unipotent(std::uint32_t p, int order, Residue x, Residue y);

// The admissible global moves of the second-order torsor.
struct Moves {
  std::vector<Cochain> z0;  // Z^1(0)
  // V: pairs (b, c) with b cup c1 + b1 cup c a coboundary, and their sigma.
  std::vector<TorsorElement> pairs;
  std::vector<Cochain> pair_sigma;
  // The part of V with c = 0.
  std::vector<TorsorElement> b_only;
  std::vector<Cochain> b_only_sigma;
};
Moves admissible_moves(const FirstOrder& fo);

// s + sum t_i * (b_i, c_i) using precomputed sigmas.
SecondOrder apply_pairs(const SecondOrder& s, const FirstOrder& fo, const std::vector<TorsorElement>& pairs,
                        const std::vector<Cochain>& sigmas, std::span<const Residue> t);

}  // namespace psd::detail
