#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psd/cochain.hpp"

namespace psd {

// Solves df = y for 1-cochains f of a fixed weight, simultaneously for every
// linear combination of a list of right-hand sides y_1..y_m.
//
// The unknowns are f(e) and f(s) for each generator s. A spanning tree of the
// right Cayley graph expresses every f(g) as an affine form in those unknowns
// and the right-hand sides; each non-tree edge contributes one linear
// condition. Since df = y holds everywhere iff it holds on all (g, s) edges for
// a 2-cocycle y, the resulting system is exact.
class EdgeSolver {
 public:
  EdgeSolver(ModelPtr model, int weight, std::vector<LazyTwoCochain> rhs = {});

  [[nodiscard]] const ModelPtr& model() const { return model_; }
  [[nodiscard]] int weight() const { return weight_; }
  [[nodiscard]] std::size_t rhs_count() const { return rhs_count_; }

  // Rows o with sum_i o_i t_i = 0 exactly when the combination t is solvable.
  [[nodiscard]] const std::vector<std::vector<Residue>>& obstructions() const { return obstructions_; }
  [[nodiscard]] bool consistent(std::span<const Residue> t) const;

  // The canonical solution of df = sum t_i y_i: the particular solution reduced
  // against the echelon basis of Z^1, hence linear in t.
  [[nodiscard]] std::optional<Cochain> solve(std::span<const Residue> t) const;

  // Z^1 of this weight in reduced echelon form over the element order.
  [[nodiscard]] const std::vector<Cochain>& cocycles() const { return cocycles_; }

  // Reduces a 1-cochain against the echelon cocycle basis.
  [[nodiscard]] Cochain reduce_mod_cocycles(Cochain f) const;

 private:
  ModelPtr model_;
  int weight_;
  std::size_t rhs_count_;
  std::size_t unknowns_;
  // Per element: affine form over unknowns, then per-RHS coefficients.
  std::vector<Residue> forms_;
  std::vector<Residue> rhs_forms_;
  // Reduced pivot rows over the unknowns with matching RHS parts.
  std::vector<std::vector<Residue>> pivot_rows_;
  std::vector<std::vector<Residue>> pivot_rhs_;
  std::vector<std::size_t> pivot_cols_;
  std::vector<std::vector<Residue>> obstructions_;
  std::vector<Cochain> cocycles_;
  std::vector<ElemId> cocycle_pivots_;
};

// df = y for a dense 2-cochain y. Throws std::invalid_argument when y is not a
// cocycle; returns nullopt when it is a cocycle but not a coboundary.
std::optional<Cochain> solve_coboundary(const Cochain& y);
// Same, for a lazily evaluated 2-cochain assumed to be a cocycle.
std::optional<Cochain> solve_coboundary(const ModelPtr& model, const LazyTwoCochain& y);
// dx = f for a 1-cochain f; x is returned as a residue (the 0-cochain value).
std::optional<Residue> solve_zero_coboundary(const Cochain& f);

// True iff the 2-cochain is a cocycle. Uses the full check on small models and
// the (g, h, s) reduction otherwise.
bool is_two_cocycle(const Cochain& y);

struct CocycleSpace {
  int degree = 0;
  int weight = 0;
  std::vector<Cochain> cocycles;
  std::vector<Cochain> coboundaries;
  [[nodiscard]] std::size_t h_dim() const { return cocycles.size() - coboundaries.size(); }
};

// Echelon bases of Z^k and B^k. Degree 2 is limited to small models.
CocycleSpace space(const ModelPtr& model, int degree, int weight);

// Membership of a vector in the span of a list of vectors, and the coefficients.
std::optional<std::vector<Residue>> span_coefficients(const PrimeField& f,
                                                      const std::vector<std::vector<Residue>>& basis,
                                                      std::span<const Residue> target);

struct PinnedC1 {
  Cochain c1;
  // The 0-cochain on D_p with dx = c1 restricted to D_p.
  Residue x_c1 = 0;
  // Set when the normalization left a coboundary ambiguity that was resolved
  // by the deterministic choice.
  std::optional<std::string> note;
};

// The weight -1 cocycle with c(gamma_ell0) = 1, vanishing on D_ell1 and a
// coboundary on D_p. Throws PipelineError tagged "no such class" or "class not
// unique up to scaling".
PinnedC1 solve_pinned_c1(const ModelPtr& model);

}  // namespace psd
