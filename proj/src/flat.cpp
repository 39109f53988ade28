#include <algorithm>

#include "deform_internal.hpp"

namespace psd {

namespace {

// M^-1 rho2(g) M with M = (1, 0; -x_c1 + y eps, 1).
GmaElement conjugated_at_p(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx, Residue y,
                           ElemId g) {
  const auto m = detail::lower_unipotent(fo.model->prime(), 2, ctx.x_c1, y);
  return gma_invert(m) * rho2(fo, s, g) * m;
}

std::vector<Residue> c_residual(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx,
                                Residue y) {
  const auto& lp = fo.model->local(LocalTag::p);
  std::vector<Residue> out;
  for (ElemId g : lp.decomposition) {
    const auto x = conjugated_at_p(s, fo, ctx, y, g);
    out.push_back(x.c()[0]);
    out.push_back(x.c()[1]);
  }
  return out;
}

std::vector<Residue> b2_on_inertia(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx,
                                   Residue y) {
  return detail::on_inertia_at_p(*fo.model, [&](ElemId g) { return conjugated_at_p(s, fo, ctx, y, g).b()[1]; });
}

std::vector<Residue> chi2_on_inertia(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx,
                                     Residue y) {
  const auto chi = chi2_at_p(s, fo, ctx, y);
  const auto& lp = fo.model->local(LocalTag::p);
  std::vector<Residue> out;
  for (ElemId i : lp.inertia) out.push_back(chi[i]);
  return out;
}

// residual - sum_j coeffs[j] * span[j], entrywise.
std::vector<Residue> minus_span(const PrimeField& f, std::vector<Residue> residual,
                                const std::vector<std::vector<Residue>>& span, std::span<const Residue> coeffs) {
  for (std::size_t j = 0; j < span.size(); ++j) {
    for (std::size_t k = 0; k < residual.size(); ++k) residual[k] = f.sub(residual[k], f.mul(coeffs[j], span[j][k]));
  }
  return residual;
}

SecondOrder shift_diagonal(const SecondOrder& s, const std::vector<Cochain>& z0, std::span<const Residue> t) {
  SecondOrder out = s;
  for (std::size_t i = 0; i < z0.size(); ++i) {
    if (t[i] == 0) continue;
    out.a2 += z0[i].scaled(t[i]);
    out.d2 -= z0[i].scaled(t[i]);
  }
  return out;
}

std::optional<std::pair<ElemId, ElemId>> us_witness(const SecondOrder& s, const FirstOrder& fo, LocalTag tag) {
  const auto& m = *fo.model;
  const auto& loc = m.local(tag);
  std::vector<GmaElement> images;
  images.reserve(loc.decomposition.size());
  for (ElemId g : loc.decomposition) images.push_back(rho2(fo, s, g));
  for (ElemId i = 0; i < images.size(); ++i) {
    const auto kappa = TruncatedPoly::constant(m.prime(), 2, m.omega(loc.global(i)));
    for (ElemId j = 0; j < images.size(); ++j) {
      if (!loc.in_inertia(i) && !loc.in_inertia(j)) continue;
      if (!us_product_check(images[i], kappa, images[j])) return std::make_pair(loc.global(i), loc.global(j));
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<Residue> chi2_at_p(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx,
                               Residue y) {
  const auto& m = *fo.model;
  const auto& f = m.field();
  const Residue half = f.inv(2);
  std::vector<Residue> out;
  for (ElemId g : m.local(LocalTag::p).decomposition) {
    const auto x = conjugated_at_p(s, fo, ctx, y, g);
    const Residue w_inv = f.inv(m.omega(g));
    const Residue a1 = f.mul(x.a()[1], w_inv);
    const Residue a2 = f.mul(x.a()[2], w_inv);
    out.push_back(f.sub(a2, f.mul(half, f.mul(a1, a1))));
  }
  return out;
}

FlatResult normalize_flat(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx) {
  const auto& m = *fo.model;
  const auto& f = m.field();
  const auto moves = detail::admissible_moves(fo);
  std::vector<std::string> log;

  // Clear c'' on D_p with the local parameter y and the pairs in V.
  const std::size_t nv = moves.pairs.size();
  auto step1 = detail::affine_solve(f, 1 + nv, [&](std::span<const Residue> x) {
    return c_residual(detail::apply_pairs(s, fo, moves.pairs, moves.pair_sigma, x.subspan(1)), fo, ctx, x[0]);
  });
  if (!step1) throw PipelineError("hasse-surjectivity", "c2 cannot be made a coboundary on D_p");
  const Residue y = (*step1)[0];
  SecondOrder s1 = detail::apply_pairs(s, fo, moves.pairs, moves.pair_sigma, std::span<const Residue>(*step1).subspan(1));
  log.push_back("flat: y = " + std::to_string(y));

  // Make b''2 flat on I_p with pairs of the form (b, 0).
  const auto span1 = detail::local_span_at_p(m, 1, m.flat().weight_1);
  const std::size_t n1 = span1.size();
  auto step3 = detail::affine_solve(f, n1 + moves.b_only.size(), [&](std::span<const Residue> x) {
    auto moved = detail::apply_pairs(s1, fo, moves.b_only, moves.b_only_sigma, x.subspan(n1));
    return minus_span(f, b2_on_inertia(moved, fo, ctx, y), span1, x.subspan(0, n1));
  });
  if (!step3) throw PipelineError("hasse-surjectivity", "b2 cannot be made flat on I_p");
  SecondOrder s3 =
      detail::apply_pairs(s1, fo, moves.b_only, moves.b_only_sigma, std::span<const Residue>(*step3).subspan(n1));

  // Make the diagonal character flat on I_p with (a, -a), a in Z1(0).
  const auto span0 = detail::local_span_at_p(m, 0, m.flat().weight_0);
  const std::size_t n0 = span0.size();
  auto step4 = detail::affine_solve(f, n0 + moves.z0.size(), [&](std::span<const Residue> x) {
    auto moved = shift_diagonal(s3, moves.z0, x.subspan(n0));
    return minus_span(f, chi2_on_inertia(moved, fo, ctx, y), span0, x.subspan(0, n0));
  });
  if (!step4) throw PipelineError("hasse-surjectivity", "the diagonal character cannot be made flat on I_p");
  SecondOrder s4 = shift_diagonal(s3, moves.z0, std::span<const Residue>(*step4).subspan(n0));
  s4.det_normalized = s.det_normalized;
  s4.flat_normalized = true;

  auto moved = [](std::span<const Residue> x) { return std::any_of(x.begin(), x.end(), [](Residue v) { return v != 0; }); };
  if (moved(std::span<const Residue>(*step1).subspan(1))) log.push_back("flat: moved by a pair in V");
  if (moved(std::span<const Residue>(*step3).subspan(n1))) log.push_back("flat: b2 moved by a global cocycle");
  if (moved(std::span<const Residue>(*step4).subspan(n0))) log.push_back("flat: a2, d2 moved by a global cocycle");

  auto beta = line_coordinate(s4.b2, fo.c1, ctx.gamma0, 2, "b2-line");
  return {std::move(s4), beta, std::move(log)};
}

UsnResult check_usn(const SecondOrder& s, const FirstOrder& fo, const DeformationContext& ctx) {
  const auto& m = *fo.model;
  const auto& f = m.field();
  UsnResult out;
  out.witness_ell0 = us_witness(s, fo, LocalTag::ell0);
  out.us_ell0 = !out.witness_ell0;

  // At ell1 the lift may first be moved by a global coboundary in c.
  SecondOrder at_ell1 = s;
  if (auto x = solve_zero_coboundary(restrict(s.c2, LocalTag::ell1))) {
    auto z = TorsorElement::zero(fo);
    z.c = -coboundary_of_constant(fo.model, -1, *x);
    at_ell1 = torsor_act(z, s, fo);
  }
  out.witness_ell1 = us_witness(at_ell1, fo, LocalTag::ell1);
  out.us_ell1 = !out.witness_ell1;

  auto y = detail::affine_solve(f, 1, [&](std::span<const Residue> x) { return c_residual(s, fo, ctx, x[0]); });
  if (y) {
    const auto span1 = detail::local_span_at_p(m, 1, m.flat().weight_1);
    const auto span0 = detail::local_span_at_p(m, 0, m.flat().weight_0);
    out.flat_ok = detail::in_span(f, span1, b2_on_inertia(s, fo, ctx, (*y)[0])) &&
                  detail::in_span(f, span0, chi2_on_inertia(s, fo, ctx, (*y)[0]));
  }
  return out;
}

}  // namespace psd
