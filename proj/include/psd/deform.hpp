#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psd/cochain.hpp"
#include "psd/errors.hpp"
#include "psd/gma.hpp"
#include "psd/weighted.hpp"

namespace psd {

struct StageEntry {
  std::string stage;
  bool ok = true;
  std::string detail;
  friend bool operator==(const StageEntry&, const StageEntry&) = default;
};
using StageLog = std::vector<StageEntry>;

// Pinned global data for one model: the Kummer cocycle b1 of ell1, the class
// c1 of weight -1, and the optional auxiliary cocycles.
struct DeformationContext {
  ModelPtr model;
  ElemId gamma0 = 0;  // global ids of the distinguished inertia elements
  ElemId gamma1 = 0;
  // Generator of D_ell1 / I_ell1 with the smallest id; absent when D = I.
  std::optional<ElemId> frobenius1;
  Cochain b1;
  Cochain c1;
  std::optional<Cochain> b0, a0, ap;
  // The weight -1 constant with dx = c1 on D_p.
  Residue x_c1 = 0;
  std::vector<std::string> notes;
};

// Pins b1 and c1 and validates the context invariants. Throws PipelineError
// tagged "pinning-data", "no such class" or "class not unique up to scaling".
DeformationContext make_context(ModelPtr model);

struct A1Result {
  Cochain a1;
  WeightedScalar alpha;
};

// sigma -> (w(1 + a1 eps), b1; w c1, 1 + d1 eps) with d1 = b1 c1 - a1.
struct FirstOrder {
  ModelPtr model;
  Cochain b1, c1, a1, d1;
  WeightedScalar alpha;
  [[nodiscard]] GmaElement rho(ElemId g) const;
};

// Checks -d a1 = b1 cup c1 and fills in d1.
FirstOrder make_first_order(Cochain b1, Cochain c1, Cochain a1, WeightedScalar alpha);

// Tags: "ell1-pth-power" (b1 nonzero on D_ell0), "cup-vanishing" (b1 cup c1
// not a coboundary), "rk2-basis" (constraints do not pin a1 down),
// "ell1-unramified" (a1 nonzero on I_ell1).
A1Result build_a1(const DeformationContext& ctx);
// Verifies multiplicativity, the trace formula, Cayley-Hamilton, US at both
// places and flatness at p; a failure throws "rho1-verification".
FirstOrder build_rho1(const DeformationContext& ctx, const A1Result& a1, StageLog* log = nullptr);

// sigma -> (w(1 + a1 eps + a2 eps^2), b1 + b2 eps; w(c1 + c2 eps), 1 + d1 eps + d2 eps^2).
struct SecondOrder {
  Cochain a2, d2, b2, c2;
  bool det_normalized = false;
  bool flat_normalized = false;
};

GmaElement rho2(const FirstOrder& fo, const SecondOrder& s, ElemId g);
// rho2 is a homomorphism, i.e. the four second-order equations hold.
bool satisfies_pi2(const FirstOrder& fo, const SecondOrder& s);

// (a, d, b, c) acting by
//   a2 += a + sigma, d2 += d - sigma + b c1 + b1 c, b2 += b, c2 += c,
// where sigma is the canonical solution of d sigma = -(b cup c1 + b1 cup c).
struct TorsorElement {
  Cochain a, d, b, c;
  static TorsorElement zero(const FirstOrder& fo);
};

// Throws PipelineError "z1b-membership" when z is not in the acting group.
SecondOrder torsor_act(const TorsorElement& z, const SecondOrder& s, const FirstOrder& fo);

struct Pi2Result {
  SecondOrder solution;
  // Basis of Z1(0) x Z1(0) x V, V the admissible (b, c) pairs.
  std::vector<TorsorElement> basis;
  std::vector<std::string> log;
};

// None exactly when no second-order lift exists. On models with local data
// at ell1 this is cross-checked against a1 on D_ell1 ("ell1-obstruction"),
// and an unsolvable equation with a1|ell1 = 0 throws "pi2-equation".
std::optional<Pi2Result> solve_pi2(const FirstOrder& fo, const std::optional<Cochain>& b0 = std::nullopt);

// d2 = b1 c2 + b2 c1 - a1 d1 - a2; verifies det rho2 = omega.
SecondOrder normalize_det(const SecondOrder& s, const FirstOrder& fo);

struct FlatResult {
  SecondOrder solution;
  WeightedScalar beta;
  std::vector<std::string> log;
};

// Tags: "hasse-surjectivity" (a local condition at p cannot be met by global
// moves), "b2-line" (b2 on D_ell0 is not a multiple of c1).
FlatResult normalize_flat(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx);

// The diagonal character at p after conjugating by (1, 0; -x_c1 + y eps, 1):
// returns a''2 - a''1^2 / 2 on D_p, local ids.
std::vector<Residue> chi2_at_p(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx,
                               Residue y);

struct UsnResult {
  bool us_ell0 = false;
  bool us_ell1 = false;
  bool flat_ok = false;
  // First failing pair (global ids), when there is one.
  std::optional<std::pair<ElemId, ElemId>> witness_ell0;
  std::optional<std::pair<ElemId, ElemId>> witness_ell1;
};

UsnResult check_usn(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx);

struct CriterionReport {
  FpElement a1_at_ell1;
  WeightedScalar alpha;
  std::optional<WeightedScalar> beta;
  std::optional<WeightedScalar> alpha_sq_plus_beta;
  bool dim_exceeds_three = false;
  StageLog stage_log;
  friend bool operator==(const CriterionReport&, const CriterionReport&) = default;
};

// build_a1 -> build_rho1 -> solve_pi2 -> normalize_det -> normalize_flat ->
// check_usn. Errors are rethrown with the stage name attached.
CriterionReport main_criterion(const DeformationContext& ctx);

// Coordinates of M^-1 rho M, read off directly.
struct Conjugated {
  Cochain a1, b1, c1, d1;
  std::optional<SecondOrder> second;
};

// M must be a unit of E_2 with constant determinant. Both the closed-form
// coordinates and the direct product are computed for every element; a
// disagreement throws "conj-formula".
Conjugated conjugate(const GmaElement& m, const FirstOrder& fo, const SecondOrder* s = nullptr);
// The same comparison at one element.
bool conjugation_formulas_hold(const GmaElement& m, const FirstOrder& fo, const SecondOrder* s, ElemId g);
// Closed-form alpha and beta after conjugating by M.
std::pair<WeightedScalar, WeightedScalar> conjugated_invariants(const GmaElement& m, const WeightedScalar& alpha,
                                                                const WeightedScalar& beta);

// The unique lambda with x = lambda * c1 on D_ell0. Throws `tag` if none.
WeightedScalar line_coordinate(const Cochain& x, const Cochain& c1, ElemId gamma0, int weight,
                               const std::string& tag);

// Reports before and after a change of pinning data, and whether alpha,
// beta, alpha^2 + beta and the verdict moved as predicted.
struct PinningChange {
  CriterionReport before;
  CriterionReport after;
  bool alpha_ok = false;
  bool beta_ok = false;
  bool phi_ok = false;
  bool verdict_ok = false;
};

// Replaces the inertia generators by their A^-1 powers and b1, b0 by A b1,
// A b0. Predicted: alpha' = A alpha, beta' = A^2 beta.
ModelSpec rescale_zeta(const ModelSpec& spec, Residue a);
PinningChange change_zeta(const ModelSpec& spec, Residue a);
// Conjugates the ell0 local data by sigma; the new generator is chosen so
// that c1 keeps the value 1 on it. Predicted: the invariants of conjugation
// by rho1(sigma), i.e. A0 = omega(sigma) and B0 = b1(sigma). They reduce to
// alpha' = alpha, beta' = beta when omega(sigma) = 1 and b1(sigma) = 0.
ModelSpec move_ell0(const ModelSpec& spec, ElemId sigma);
PinningChange change_ell0(const ModelSpec& spec, ElemId sigma);

}  // namespace psd
