#include <algorithm>

#include "deform_internal.hpp"

namespace psd::detail {

LazyTwoCochain negated_sum(std::uint32_t p, std::vector<LazyTwoCochain> terms) {
  std::vector<Residue> coeffs(terms.size(), p - 1);
  return lazy_combination(std::move(coeffs), std::move(terms), p);
}

Cochain combine(const ModelPtr& model, int weight, const std::vector<Cochain>& basis,
                std::span<const Residue> coeffs) {
  Cochain out(model, 1, weight);
  for (std::size_t i = 0; i < basis.size() && i < coeffs.size(); ++i) {
    if (coeffs[i] != 0) out += basis[i].scaled(coeffs[i]);
  }
  return out;
}

std::optional<std::vector<Residue>> affine_solve(
    const PrimeField& field, std::size_t k,
    const std::function<std::vector<Residue>(std::span<const Residue>)>& residual) {
  std::vector<Residue> x(k, 0);
  const auto base = residual(x);
  const std::size_t rows = base.size();
  if (std::all_of(base.begin(), base.end(), [](Residue v) { return v == 0; })) return x;
  if (k == 0) return std::nullopt;
  FpMatrix a(field.prime(), rows, k);
  for (std::size_t j = 0; j < k; ++j) {
    x.assign(k, 0);
    x[j] = 1;
    const auto r = residual(x);
    for (std::size_t i = 0; i < rows; ++i) a.at(i, j) = field.sub(r[i], base[i]);
  }
  std::vector<Residue> rhs(rows);
  for (std::size_t i = 0; i < rows; ++i) rhs[i] = field.neg(base[i]);
  auto sol = solve_linear(a, rhs);
  if (!sol.particular) return std::nullopt;
  const auto check = residual(*sol.particular);
  if (!std::all_of(check.begin(), check.end(), [](Residue v) { return v == 0; })) return std::nullopt;
  return sol.particular;
}

bool is_homomorphism(const GroupModel& model, const std::function<GmaElement(ElemId)>& rho) {
  const auto one = rho(model.identity());
  if (!(one == GmaElement::identity(model.prime(), one.order()))) return false;
  const std::size_t n = model.size();
  if (model.is_dense() && n <= 512) {
    std::vector<GmaElement> images;
    images.reserve(n);
    for (ElemId g = 0; g < n; ++g) images.push_back(rho(g));
    for (ElemId g = 0; g < n; ++g) {
      for (ElemId h = 0; h < n; ++h) {
        if (!(images[model.mul(g, h)] == images[g] * images[h])) return false;
      }
    }
    return true;
  }
  const auto gens = model.generators();
  std::vector<GmaElement> gen_images;
  for (ElemId s : gens) gen_images.push_back(rho(s));
  for (ElemId g = 0; g < n; ++g) {
    const auto rg = rho(g);
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (!(rho(model.right_mul(g, j)) == rg * gen_images[j])) return false;
    }
  }
  return true;
}

std::vector<std::vector<Residue>> local_span_at_p(const GroupModel& model, int weight,
                                                  const std::vector<std::vector<Residue>>& tables) {
  const auto& lp = model.local(LocalTag::p);
  std::vector<std::vector<Residue>> out;
  for (const auto& t : tables) {
    std::vector<Residue> v;
    for (ElemId i : lp.inertia) v.push_back(t[i]);
    out.push_back(std::move(v));
  }
  std::vector<Residue> cob;
  bool nontrivial = false;
  for (ElemId i : lp.inertia) {
    const Residue c = model.field().sub(model.twist(weight, lp.global(i)), 1);
    nontrivial = nontrivial || c != 0;
    cob.push_back(c);
  }
  if (nontrivial) out.push_back(std::move(cob));
  return out;
}

bool in_span(const PrimeField& f, const std::vector<std::vector<Residue>>& basis, std::span<const Residue> v) {
  if (std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; })) return true;
  return span_coefficients(f, basis, v).has_value();
}

std::vector<Residue> on_inertia_at_p(const GroupModel& model, const std::function<Residue(ElemId)>& f) {
  const auto& lp = model.local(LocalTag::p);
  std::vector<Residue> out;
  for (ElemId i : lp.inertia) out.push_back(f(lp.global(i)));
  return out;
}

GmaElement lower_unipotent(std::uint32_t p, int order, Residue x, Residue y) {
  const PrimeField f(p);
  TruncatedPoly c(p, order - 1);
  c.set(0, f.neg(x));
  if (order >= 2) c.set(1, y);
  return {TruncatedPoly::constant(p, order, 1), TruncatedPoly(p, order - 1), c, TruncatedPoly::constant(p, order, 1)};
}

Moves admissible_moves(const FirstOrder& fo) {
  const auto& model = fo.model;
  const std::uint32_t p = model->prime();
  const auto zb = EdgeSolver(model, 1).cocycles();
  const auto zc = EdgeSolver(model, -1).cocycles();
  const std::size_t rb = zb.size();
  const std::size_t rc = zc.size();
  std::vector<LazyTwoCochain> rhs;
  for (const auto& b : zb) rhs.push_back(negated_sum(p, {cup_lazy(b, fo.c1)}));
  for (const auto& c : zc) rhs.push_back(negated_sum(p, {cup_lazy(fo.b1, c)}));
  EdgeSolver solver(model, 0, rhs);

  Moves out;
  out.z0 = solver.cocycles();
  const auto& obs = solver.obstructions();
  auto kernel_of = [&](std::size_t cols) {
    FpMatrix a(p, std::max<std::size_t>(obs.size(), 1), cols);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) a.at(i, j) = obs[i][j];
    }
    return solve_linear(a, std::vector<Residue>(a.rows(), 0)).kernel;
  };
  auto element = [&](const std::vector<Residue>& v) {
    TorsorElement z = TorsorElement::zero(fo);
    z.b = combine(model, 1, zb, std::span<const Residue>(v).subspan(0, rb));
    if (v.size() > rb) z.c = combine(model, -1, zc, std::span<const Residue>(v).subspan(rb));
    return z;
  };
  for (auto v : kernel_of(rb + rc)) {
    out.pairs.push_back(element(v));
    out.pair_sigma.push_back(*solver.solve(v));
  }
  for (auto v : kernel_of(rb)) {
    v.resize(rb + rc, 0);
    out.b_only.push_back(element(v));
    out.b_only_sigma.push_back(*solver.solve(v));
  }
  return out;
}

SecondOrder apply_pairs(const SecondOrder& s, const FirstOrder& fo, const std::vector<TorsorElement>& pairs,
                        const std::vector<Cochain>& sigmas, std::span<const Residue> t) {
  SecondOrder out = s;
  out.flat_normalized = false;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (t[i] == 0) continue;
    const auto& z = pairs[i];
    out.a2 += sigmas[i].scaled(t[i]);
    out.d2 += (pointwise(z.b, fo.c1) + pointwise(fo.b1, z.c) - sigmas[i]).scaled(t[i]);
    out.b2 += z.b.scaled(t[i]);
    out.c2 += z.c.scaled(t[i]);
  }
  return out;
}

}  // namespace psd::detail
