#include <algorithm>

#include "deform_internal.hpp"

namespace psd {

using detail::combine;
using detail::negated_sum;

namespace {

std::vector<std::vector<Residue>> as_vectors(const std::vector<Cochain>& basis) {
  std::vector<std::vector<Residue>> out;
  for (const auto& z : basis) out.emplace_back(z.values().begin(), z.values().end());
  return out;
}

// Solves sum_k o_k u_k = -o_0 for every obstruction row o.
class JointSystem {
 public:
  JointSystem(std::uint32_t p, std::size_t unknowns) : p_(p), unknowns_(unknowns) {}

  void add(const std::vector<std::vector<Residue>>& obstructions) {
    const PrimeField f(p_);
    for (const auto& o : obstructions) {
      rows_.emplace_back(o.begin() + 1, o.end());
      rhs_.push_back(f.neg(o[0]));
    }
  }

  [[nodiscard]] bool satisfied_by(std::span<const Residue> u) const {
    const PrimeField f(p_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      Residue acc = 0;
      for (std::size_t k = 0; k < unknowns_; ++k) acc = f.add(acc, f.mul(rows_[i][k], u[k]));
      if (acc != rhs_[i]) return false;
    }
    return true;
  }

  // The unknowns restricted to lambda * direction.
  [[nodiscard]] std::optional<std::vector<Residue>> along(const std::vector<Residue>& direction) const {
    const PrimeField f(p_);
    FpMatrix a(p_, std::max<std::size_t>(rows_.size(), 1), 1);
    std::vector<Residue> y(a.rows(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      Residue acc = 0;
      for (std::size_t k = 0; k < unknowns_; ++k) acc = f.add(acc, f.mul(rows_[i][k], direction[k]));
      a.at(i, 0) = acc;
      y[i] = rhs_[i];
    }
    auto sol = solve_linear(a, y);
    if (!sol.particular) return std::nullopt;
    std::vector<Residue> u(unknowns_);
    for (std::size_t k = 0; k < unknowns_; ++k) u[k] = f.mul((*sol.particular)[0], direction[k]);
    return u;
  }

  [[nodiscard]] std::optional<std::vector<Residue>> general() const {
    FpMatrix a(p_, std::max<std::size_t>(rows_.size(), 1), std::max<std::size_t>(unknowns_, 1));
    std::vector<Residue> y(a.rows(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (std::size_t k = 0; k < unknowns_; ++k) a.at(i, k) = rows_[i][k];
      y[i] = rhs_[i];
    }
    auto sol = solve_linear(a, y);
    if (!sol.particular) return std::nullopt;
    sol.particular->resize(unknowns_);
    return sol.particular;
  }

 private:
  std::uint32_t p_;
  std::size_t unknowns_;
  std::vector<std::vector<Residue>> rows_;
  std::vector<Residue> rhs_;
};

bool vanishes_on(const Cochain& x, const LocalData& loc) {
  return std::all_of(loc.decomposition.begin(), loc.decomposition.end(), [&](ElemId g) { return x(g) == 0; });
}

}  // namespace

GmaElement rho2(const FirstOrder& fo, const SecondOrder& s, ElemId g) {
  const auto& f = fo.model->field();
  const std::uint32_t p = f.prime();
  const Residue w = fo.model->omega(g);
  return {TruncatedPoly(p, 2, {w, f.mul(w, fo.a1(g)), f.mul(w, s.a2(g))}),
          TruncatedPoly(p, 1, {fo.b1(g), s.b2(g)}),
          TruncatedPoly(p, 1, {f.mul(w, fo.c1(g)), f.mul(w, s.c2(g))}),
          TruncatedPoly(p, 2, {1, fo.d1(g), s.d2(g)})};
}

bool satisfies_pi2(const FirstOrder& fo, const SecondOrder& s) {
  return detail::is_homomorphism(*fo.model, [&](ElemId g) { return rho2(fo, s, g); });
}

TorsorElement TorsorElement::zero(const FirstOrder& fo) {
  return {Cochain(fo.model, 1, 0), Cochain(fo.model, 1, 0), Cochain(fo.model, 1, 1), Cochain(fo.model, 1, -1)};
}

SecondOrder torsor_act(const TorsorElement& z, const SecondOrder& s, const FirstOrder& fo) {
  const auto& m = *fo.model;
  auto expect = [&](const Cochain& x, int weight, const char* name) {
    if (m.normalize_weight(x.weight()) != m.normalize_weight(weight) || !is_one_cocycle(x)) {
      throw PipelineError("z1b-membership", std::string(name) + " is not a cocycle of weight " + std::to_string(weight));
    }
  };
  expect(z.a, 0, "a");
  expect(z.d, 0, "d");
  expect(z.b, 1, "b");
  expect(z.c, -1, "c");
  EdgeSolver solver(fo.model, 0, {negated_sum(m.prime(), {cup_lazy(z.b, fo.c1), cup_lazy(fo.b1, z.c)})});
  const std::vector<Residue> one{1};
  auto sigma = solver.solve(one);
  if (!sigma) throw PipelineError("z1b-membership", "b cup c1 + b1 cup c is not a coboundary");
  SecondOrder out = s;
  out.a2 += z.a + *sigma;
  out.d2 += z.d - *sigma + pointwise(z.b, fo.c1) + pointwise(fo.b1, z.c);
  out.b2 += z.b;
  out.c2 += z.c;
  out.det_normalized = false;
  out.flat_normalized = false;
  return out;
}

std::optional<Pi2Result> solve_pi2(const FirstOrder& fo, const std::optional<Cochain>& b0) {
  const auto& model = fo.model;
  const auto& m = *model;
  const std::uint32_t p = m.prime();
  Pi2Result result{{Cochain(model, 1, 0), Cochain(model, 1, 0), Cochain(model, 1, 1), Cochain(model, 1, -1)}, {}, {}};

  const bool has_ell1 = m.has_local(LocalTag::ell1);
  const bool a1_split = has_ell1 && vanishes_on(fo.a1, m.local(LocalTag::ell1));
  auto empty = [&](const std::string& why) -> std::optional<Pi2Result> {
    if (has_ell1 && a1_split) throw PipelineError("pi2-equation", why + " although a1 vanishes on D_ell1");
    return std::nullopt;
  };

  const std::vector<Residue> one{1};
  EdgeSolver s_ii(model, 1, {negated_sum(p, {cup_lazy(fo.a1, fo.b1), cup_lazy(fo.b1, fo.d1)})});
  auto b2p = s_ii.solve(one);
  if (!b2p) return empty("the b2 equation has no solution");
  EdgeSolver s_iii(model, -1, {negated_sum(p, {cup_lazy(fo.c1, fo.a1), cup_lazy(fo.d1, fo.c1)})});
  auto c2p = s_iii.solve(one);
  if (!c2p) return empty("the c2 equation has no solution");

  const auto& zb = s_ii.cocycles();
  const auto& zc = s_iii.cocycles();
  std::vector<LazyTwoCochain> rhs_i{
      negated_sum(p, {cup_lazy(fo.a1, fo.a1), cup_lazy(fo.b1, *c2p), cup_lazy(*b2p, fo.c1)})};
  std::vector<LazyTwoCochain> rhs_iv{
      negated_sum(p, {cup_lazy(fo.d1, fo.d1), cup_lazy(fo.c1, *b2p), cup_lazy(*c2p, fo.b1)})};
  for (const auto& b : zb) {
    rhs_i.push_back(negated_sum(p, {cup_lazy(b, fo.c1)}));
    rhs_iv.push_back(negated_sum(p, {cup_lazy(fo.c1, b)}));
  }
  for (const auto& c : zc) {
    rhs_i.push_back(negated_sum(p, {cup_lazy(fo.b1, c)}));
    rhs_iv.push_back(negated_sum(p, {cup_lazy(c, fo.b1)}));
  }
  EdgeSolver s_i(model, 0, rhs_i);
  EdgeSolver s_iv(model, 0, rhs_iv);

  const std::size_t nb = zb.size();
  const std::size_t unknowns = nb + zc.size();
  JointSystem system(p, unknowns);
  system.add(s_i.obstructions());
  system.add(s_iv.obstructions());

  std::optional<std::vector<Residue>> u;
  const std::vector<Residue> origin(unknowns, 0);
  if (system.satisfied_by(origin)) {
    u = origin;
    result.log.push_back("pi2: particular b2, c2 kept");
  }
  if (!u && b0 && nb > 0) {
    if (auto coords = span_coefficients(m.field(), as_vectors(zb), b0->values())) {
      std::vector<Residue> direction(unknowns, 0);
      std::copy(coords->begin(), coords->end(), direction.begin());
      u = system.along(direction);
      if (u) result.log.push_back("pi2: b2 shifted by a multiple of b0");
    }
  }
  if (!u) {
    u = system.general();
    if (u) result.log.push_back("pi2: b2, c2 shifted by a general cocycle");
  }
  if (!u) return empty("the a2 and d2 equations have no common solution");
  if (has_ell1 && !a1_split) {
    throw PipelineError("ell1-obstruction", "a second-order lift exists although a1 is nonzero on D_ell1");
  }

  std::vector<Residue> t{1};
  t.insert(t.end(), u->begin(), u->end());
  const std::span<const Residue> tu(*u);
  SecondOrder& s = result.solution;
  s.b2 = *b2p + combine(model, 1, zb, tu.subspan(0, nb));
  s.c2 = *c2p + combine(model, -1, zc, tu.subspan(nb));
  s.a2 = *s_i.solve(t);
  s.d2 = *s_iv.solve(t);
  if (!satisfies_pi2(fo, s)) throw PipelineError("pi2-equation", "assembled second-order lift is not a homomorphism");

  for (const auto& z : s_i.cocycles()) {
    auto e = TorsorElement::zero(fo);
    e.a = z;
    result.basis.push_back(std::move(e));
  }
  for (const auto& z : s_i.cocycles()) {
    auto e = TorsorElement::zero(fo);
    e.d = z;
    result.basis.push_back(std::move(e));
  }
  auto moves = detail::admissible_moves(fo);
  for (auto& v : moves.pairs) result.basis.push_back(std::move(v));
  return result;
}

SecondOrder normalize_det(const SecondOrder& s, const FirstOrder& fo) {
  const auto& m = *fo.model;
  SecondOrder out = s;
  out.d2 = pointwise(fo.b1, s.c2) + pointwise(s.b2, fo.c1) - pointwise(fo.a1, fo.d1) - s.a2;
  for (ElemId g = 0; g < m.size(); ++g) {
    if (!(psi(rho2(fo, out, g)).det == TruncatedPoly::constant(m.prime(), 2, m.omega(g)))) {
      throw PipelineError("det-normalization", "det rho2 differs from omega at " + m.name(g));
    }
  }
  if (!is_one_cocycle(out.d2 - s.d2)) {
    throw PipelineError("det-normalization", "the determinant correction is not a cocycle");
  }
  out.det_normalized = true;
  return out;
}

}  // namespace psd
