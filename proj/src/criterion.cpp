#include <algorithm>
#include <functional>

#include "deform_internal.hpp"

namespace psd {

namespace {

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const PipelineError& e) {
    if (!e.stage().empty()) throw;
    throw e.in_stage(name);
  }
}

// M scaled so that d(0) = 1, after checking it is a unit with constant det.
GmaElement normalized(const GmaElement& m) {
  if (m.order() != 2 || m.off_order() != 1) throw std::invalid_argument("conjugating element must lie in E_2");
  if (!m.d().is_unit() || !m.a().is_unit()) throw std::invalid_argument("conjugating element must have unit diagonal");
  const PrimeField f(m.prime());
  const auto out = m.scaled(TruncatedPoly::constant(m.prime(), 2, f.inv(m.d()[0])));
  const auto det = psi(out).det;
  if (det[1] != 0 || det[2] != 0) throw std::invalid_argument("conjugating element must have constant determinant");
  return out;
}

struct Coordinates {
  Residue a1, b1, c1, d1;
  std::optional<Residue> b2;
  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

Coordinates read_off(const GmaElement& x, const GmaElement* x2, const PrimeField& f, Residue w) {
  const Residue w_inv = f.inv(w);
  Coordinates out{f.mul(x.a()[1], w_inv), x.b()[0], f.mul(x.c()[0], w_inv), x.d()[1], std::nullopt};
  if (x2) out.b2 = x2->b()[1];
  return out;
}

Coordinates closed_form(const GmaElement& m, const FirstOrder& fo, const SecondOrder* s, ElemId g) {
  const auto& f = fo.model->field();
  const Residue w = fo.model->omega(g);
  const Residue w_inv = f.inv(w);
  const Residue a0 = m.a()[0], a1m = m.a()[1];
  const Residue b0 = m.b()[0], b1m = m.b()[1];
  const Residue c0 = m.c()[0];
  const Residue a0_inv = f.inv(a0);
  const Residue a1 = fo.a1(g), b1 = fo.b1(g), c1 = fo.c1(g), d1 = fo.d1(g);
  const Residue w_minus = f.sub(w, 1);
  const Residue w_inv_minus = f.sub(w_inv, 1);

  Coordinates out{};
  out.b1 = f.mul(a0_inv, f.add(b1, f.mul(b0, w_minus)));
  out.c1 = f.mul(a0, f.add(c1, f.mul(f.mul(a0_inv, c0), w_inv_minus)));
  out.a1 = f.sub(f.add(f.sub(a1, f.mul(b0, c1)), f.mul(f.mul(a0_inv, c0), f.mul(w_inv, b1))),
                 f.mul(f.mul(a0_inv, f.mul(b0, c0)), w_inv_minus));
  out.d1 = f.sub(f.mul(out.b1, out.c1), out.a1);
  if (s) {
    const Residue dm1 = f.mul(f.sub(f.mul(b0, c0), a1m), a0_inv);
    const Residue shift =
        f.add(f.sub(b1m, f.mul(f.mul(a1m, b0), a0_inv)), f.mul(f.mul(f.mul(b0, b0), c0), a0_inv));
    Residue acc = s->b2(g);
    acc = f.add(acc, f.mul(f.mul(2, dm1), b1));
    acc = f.add(acc, f.mul(shift, w_minus));
    acc = f.add(acc, f.mul(b0, f.sub(f.mul(w, a1), d1)));
    acc = f.sub(acc, f.mul(f.mul(b0, b0), f.mul(w, c1)));
    out.b2 = f.mul(a0_inv, acc);
  }
  return out;
}

Coordinates direct(const GmaElement& m, const FirstOrder& fo, const SecondOrder* s, ElemId g) {
  const auto& f = fo.model->field();
  const auto m1 = reduce(m, 1);
  const auto x = gma_invert(m1) * fo.rho(g) * m1;
  if (!s) return read_off(x, nullptr, f, fo.model->omega(g));
  const auto x2 = gma_invert(m) * rho2(fo, *s, g) * m;
  return read_off(x, &x2, f, fo.model->omega(g));
}

ElemId power(const GroupModel& m, ElemId g, std::uint64_t k) {
  ElemId out = m.identity();
  for (std::uint64_t i = 0; i < k; ++i) out = m.mul(out, g);
  return out;
}

// Expected alpha' and beta' from alpha and beta, plus the factor on alpha^2 + beta.
struct Expectation {
  std::function<std::pair<WeightedScalar, WeightedScalar>(const WeightedScalar&, const WeightedScalar&)> invariants;
  FpElement phi_scale;
};

PinningChange compare(CriterionReport before, const ModelSpec& after_spec, const Expectation& expect) {
  PinningChange out{std::move(before), main_criterion(make_context(GroupModel::build(after_spec))), false, false,
                    false, false};
  const auto& b = out.before;
  const auto& a = out.after;
  out.verdict_ok = a.dim_exceeds_three == b.dim_exceeds_three;
  if (!b.beta || !a.beta) {
    // Without a second-order lift only alpha can be compared.
    const auto beta0 = WeightedScalar::zero(expect.phi_scale.prime(), 2);
    out.alpha_ok = a.alpha == expect.invariants(b.alpha, beta0).first;
    out.beta_ok = out.phi_ok = a.beta.has_value() == b.beta.has_value();
    return out;
  }
  const auto [alpha1, beta1] = expect.invariants(b.alpha, *b.beta);
  out.alpha_ok = a.alpha == alpha1;
  out.beta_ok = *a.beta == beta1;
  out.phi_ok = a.alpha_sq_plus_beta->value() == b.alpha_sq_plus_beta->value() * expect.phi_scale;
  return out;
}

}  // namespace

CriterionReport main_criterion(const DeformationContext& ctx) {
  const auto& m = *ctx.model;
  const std::uint32_t p = m.prime();
  CriterionReport report{FpElement(p, 0), WeightedScalar::zero(p, 1), std::nullopt, std::nullopt, false, {}};
  auto& log = report.stage_log;

  const auto a1r = run_stage("build_a1", [&] { return build_a1(ctx); });
  report.alpha = a1r.alpha;
  log.push_back({"build_a1", true, "alpha = " + a1r.alpha.to_string()});

  const auto fo = run_stage("build_rho1", [&] { return build_rho1(ctx, a1r, &log); });
  if (ctx.frobenius1) report.a1_at_ell1 = FpElement(p, fo.a1(*ctx.frobenius1));

  const auto pi2 = run_stage("solve_pi2", [&] { return solve_pi2(fo, ctx.b0); });
  if (!pi2) {
    log.push_back({"solve_pi2", false, "no second-order lift; a1(Frob_ell1) = " +
                                           std::to_string(report.a1_at_ell1.value())});
    return report;
  }
  for (const auto& line : pi2->log) log.push_back({"solve_pi2", true, line});

  const auto det = run_stage("normalize_det", [&] { return normalize_det(pi2->solution, fo); });
  log.push_back({"normalize_det", true, ""});

  const auto flat = run_stage("normalize_flat", [&] { return normalize_flat(det, fo, ctx); });
  for (const auto& line : flat.log) log.push_back({"normalize_flat", true, line});
  report.beta = flat.beta;
  const auto phi = report.alpha * report.alpha + flat.beta;
  report.alpha_sq_plus_beta = phi;
  log.push_back({"normalize_flat", true, "beta = " + flat.beta.to_string()});

  const auto usn = run_stage("check_usn", [&] { return check_usn(flat.solution, fo, ctx); });
  log.push_back({"us-ell0", usn.us_ell0, ""});
  log.push_back({"us-ell1", usn.us_ell1, ""});
  log.push_back({"flat-at-p", usn.flat_ok, ""});
  log.push_back({"us-dichotomy", usn.us_ell0 == phi.is_zero(), ""});

  report.dim_exceeds_three = report.a1_at_ell1.is_zero() && phi.is_zero();
  return report;
}

bool conjugation_formulas_hold(const GmaElement& m, const FirstOrder& fo, const SecondOrder* s, ElemId g) {
  const auto n = normalized(m);
  return direct(n, fo, s, g) == closed_form(n, fo, s, g);
}

Conjugated conjugate(const GmaElement& m, const FirstOrder& fo, const SecondOrder* s) {
  const auto& model = fo.model;
  const auto& f = model->field();
  const auto n = normalized(m);
  const auto n1 = reduce(n, 1);
  const auto n1_inv = gma_invert(n1);
  const auto n_inv = gma_invert(n);
  Conjugated out{Cochain(model, 1, 0), Cochain(model, 1, 1), Cochain(model, 1, -1), Cochain(model, 1, 0),
                 std::nullopt};
  if (s) out.second = SecondOrder{Cochain(model, 1, 0), Cochain(model, 1, 0), Cochain(model, 1, 1),
                                  Cochain(model, 1, -1), false, false};
  for (ElemId g = 0; g < model->size(); ++g) {
    const Residue w_inv = f.inv(model->omega(g));
    const auto x = n1_inv * fo.rho(g) * n1;
    out.a1.set(g, f.mul(x.a()[1], w_inv));
    out.b1.set(g, x.b()[0]);
    out.c1.set(g, f.mul(x.c()[0], w_inv));
    out.d1.set(g, x.d()[1]);
    if (s) {
      const auto x2 = n_inv * rho2(fo, *s, g) * n;
      out.second->a2.set(g, f.mul(x2.a()[2], w_inv));
      out.second->b2.set(g, x2.b()[1]);
      out.second->c2.set(g, f.mul(x2.c()[1], w_inv));
      out.second->d2.set(g, x2.d()[2]);
    }
    if (!(direct(n, fo, s, g) == closed_form(n, fo, s, g))) {
      throw PipelineError("conj-formula", "closed form disagrees with the direct product at " + model->name(g));
    }
  }
  return out;
}

std::pair<WeightedScalar, WeightedScalar> conjugated_invariants(const GmaElement& m, const WeightedScalar& alpha,
                                                                const WeightedScalar& beta) {
  const auto n = normalized(m);
  const std::uint32_t p = n.prime();
  const FpElement a0_inv = FpElement(p, n.a()[0]).inverse();
  const FpElement b0(p, n.b()[0]);
  const FpElement two(p, 2);
  const FpElement al = alpha.value();
  return {{a0_inv * (al - b0), alpha.weight()},
          {a0_inv * a0_inv * (beta.value() + two * b0 * al - b0 * b0), beta.weight()}};
}

ModelSpec rescale_zeta(const ModelSpec& spec, Residue a) {
  const auto model = GroupModel::build(spec);
  const auto& f = model->field();
  if (f.reduce(a) == 0) throw std::invalid_argument("rescaling factor must be nonzero");
  const Residue k = f.inv(f.reduce(a));
  ModelSpec out = spec;
  for (auto tag : {LocalTag::ell0, LocalTag::ell1}) {
    auto& loc = out.locals[static_cast<std::size_t>(tag)];
    if (loc && loc->gamma) loc->gamma = power(*model, *loc->gamma, k);
  }
  if (out.pinned) {
    for (auto* table : {&out.pinned->b1, &out.pinned->b0}) {
      if (!*table) continue;
      for (auto& v : **table) v = f.mul(f.reduce(v), f.reduce(a));
    }
  }
  return out;
}

PinningChange change_zeta(const ModelSpec& spec, Residue a) {
  const FpElement s(spec.p, a);
  Expectation expect{[s](const WeightedScalar& alpha, const WeightedScalar& beta) {
                       return std::pair{WeightedScalar(alpha.value() * s, alpha.weight()),
                                        WeightedScalar(beta.value() * s * s, beta.weight())};
                     },
                     s * s};
  return compare(main_criterion(make_context(GroupModel::build(spec))), rescale_zeta(spec, a), expect);
}

ModelSpec move_ell0(const ModelSpec& spec, ElemId sigma) {
  const auto model = GroupModel::build(spec);
  const auto& m = *model;
  if (sigma >= m.size()) throw std::out_of_range("sigma is not an element of the model");
  ModelSpec out = spec;
  auto& loc = out.locals[static_cast<std::size_t>(LocalTag::ell0)];
  if (!loc || !loc->gamma) throw PipelineError("pinning-data", "model lacks local data at ell0");
  auto moved = [&](std::vector<ElemId> ids) {
    for (auto& g : ids) g = m.conj(g, sigma);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  loc->decomposition = moved(loc->decomposition);
  loc->inertia = moved(loc->inertia);
  // c1 on the conjugated inertia picks up omega(sigma); this power undoes it.
  loc->gamma = m.conj(power(m, *loc->gamma, m.field().inv(m.omega(sigma))), sigma);
  return out;
}

PinningChange change_ell0(const ModelSpec& spec, ElemId sigma) {
  const auto ctx = make_context(GroupModel::build(spec));
  const std::uint32_t p = spec.p;
  // Restricting to sigma^-1 D sigma conjugates rho1 by rho1(sigma); only its
  // diagonal and b entries reach alpha and beta.
  const GmaElement m(TruncatedPoly::constant(p, 2, ctx.model->omega(sigma)), TruncatedPoly(p, 1, {ctx.b1(sigma), 0}),
                     TruncatedPoly(p, 1), TruncatedPoly::constant(p, 2, 1));
  const FpElement a0_inv = FpElement(p, ctx.model->omega(sigma)).inverse();
  Expectation expect{[m](const WeightedScalar& alpha, const WeightedScalar& beta) {
                       return conjugated_invariants(m, alpha, beta);
                     },
                     a0_inv * a0_inv};
  return compare(main_criterion(ctx), move_ell0(spec, sigma), expect);
}

}  // namespace psd
