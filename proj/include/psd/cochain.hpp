#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "psd/group.hpp"

namespace psd {

// Inhomogeneous k-cochain with values in F_p(w), stored as a dense table over
// G^k in lexicographic order. Degrees above 1 are only materialized on models
// small enough for |G|^k entries.
class Cochain {
 public:
  Cochain(ModelPtr model, int degree, int weight);
  Cochain(ModelPtr model, int degree, int weight, std::vector<Residue> values);
  static Cochain from_ints(ModelPtr model, int degree, int weight, std::span<const std::int64_t> values);

  [[nodiscard]] const ModelPtr& model() const { return model_; }
  [[nodiscard]] const GroupModel& group() const { return *model_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int weight() const { return weight_; }
  [[nodiscard]] std::span<const Residue> values() const { return values_; }
  [[nodiscard]] std::size_t index(std::span<const ElemId> args) const;

  [[nodiscard]] Residue operator()() const { return values_[0]; }
  [[nodiscard]] Residue operator()(ElemId g) const { return values_[g]; }
  [[nodiscard]] Residue operator()(ElemId g, ElemId h) const { return values_[g * model_->size() + h]; }
  [[nodiscard]] Residue at(std::span<const ElemId> args) const { return values_[index(args)]; }
  void set(std::span<const ElemId> args, Residue v) { values_[index(args)] = v % model_->prime(); }
  void set(ElemId g, Residue v) { values_[g] = v % model_->prime(); }

  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] Cochain scaled(Residue s) const;
  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
  Cochain operator-() const { return scaled(model_->prime() - 1); }
  friend bool operator==(const Cochain& a, const Cochain& b);

 private:
  void require_compatible(const Cochain& o) const;
  ModelPtr model_;
  int degree_;
  int weight_;
  std::vector<Residue> values_;
};

// A 2-cochain given by an evaluator. Solvers only query it on (g, generator)
// pairs, so it works on models far too large for a dense |G|^2 table.
struct LazyTwoCochain {
  int weight = 0;
  std::function<Residue(ElemId, ElemId)> eval;
};

LazyTwoCochain lazy(const Cochain& dense_two);
// sum_i coeffs[i] * terms[i]; all terms must share a weight.
LazyTwoCochain lazy_combination(std::vector<Residue> coeffs, std::vector<LazyTwoCochain> terms,
                                std::uint32_t p);

// Largest table materialized for a degree >= 2 cochain.
inline constexpr std::size_t kDenseCochainLimit = std::size_t{1} << 24;

// Bar differential:
//   (dx)(g) = omega(g)^w x - x,   (df)(g,h) = omega(g)^w f(h) - f(gh) + f(g),
// and the same alternating pattern in higher degree.
Cochain d(const Cochain& f);

// (f cup g)(s_1..s_i, t_1..t_j) = f(s) * omega(s_1...s_i)^{wt g} * g(t).
Cochain cup(const Cochain& f, const Cochain& g);
LazyTwoCochain cup_lazy(const Cochain& f, const Cochain& g);

// Pointwise product of two cochains of the same degree; weights add.
Cochain pointwise(const Cochain& f, const Cochain& g);

// Restriction to the decomposition group at `tag`, as a cochain on the local model.
Cochain restrict(const Cochain& f, LocalTag tag);
LazyTwoCochain restrict_lazy(const GroupModel& model, const LazyTwoCochain& y, LocalTag tag);

// The 1-coboundary of the constant 0-cochain x in weight w.
Cochain coboundary_of_constant(const ModelPtr& model, int weight, Residue x);

// True iff the 1-cochain satisfies the cocycle identity on every (g, generator)
// edge and vanishes at the identity, which is equivalent to df = 0.
bool is_one_cocycle(const Cochain& f);

}  // namespace psd
