#include <algorithm>

#include "deform_internal.hpp"

namespace psd {

using detail::combine;
using detail::negated_sum;

namespace {

// Smallest-id element of D_ell1 whose coset generates D_ell1 / I_ell1.
std::optional<ElemId> find_frobenius(const GroupModel& model) {
  const auto& l1 = model.local(LocalTag::ell1);
  const auto& sub = *l1.group;
  const std::size_t index = l1.decomposition.size() / l1.inertia.size();
  if (index == 1) return std::nullopt;
  std::vector<ElemId> order(l1.decomposition.size());
  for (ElemId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](ElemId x, ElemId y) { return l1.global(x) < l1.global(y); });
  for (ElemId g : order) {
    if (l1.in_inertia(g)) continue;
    std::size_t k = 1;
    ElemId power = g;
    while (!l1.in_inertia(power)) {
      power = sub.mul(power, g);
      ++k;
    }
    if (k == index) return l1.global(g);
  }
  throw PipelineError("pinning-data", "D_ell1 / I_ell1 is not cyclic");
}

// The weight-1 cocycle with b(gamma1) = 1, unramified at ell0 and flat at p.
Cochain solve_b1(const ModelPtr& model, ElemId gamma1, std::vector<std::string>& notes) {
  const auto& m = *model;
  const auto& f = m.field();
  const auto basis = EdgeSolver(model, 1).cocycles();
  const auto allowed = detail::local_span_at_p(m, 1, m.flat().weight_1);
  const std::size_t r = basis.size();
  const std::size_t cols = r + allowed.size();
  std::vector<std::vector<Residue>> rows;
  std::vector<Residue> rhs;
  auto add_row = [&](std::vector<Residue> row, Residue value) {
    row.resize(cols, 0);
    rows.push_back(std::move(row));
    rhs.push_back(value);
  };
  {
    std::vector<Residue> row;
    for (const auto& z : basis) row.push_back(z(gamma1));
    add_row(row, 1);
  }
  const auto& l0 = m.local(LocalTag::ell0);
  for (ElemId i : l0.inertia) {
    std::vector<Residue> row;
    for (const auto& z : basis) row.push_back(z(l0.global(i)));
    add_row(row, 0);
  }
  const auto& lp = m.local(LocalTag::p);
  for (std::size_t k = 0; k < lp.inertia.size(); ++k) {
    std::vector<Residue> row;
    for (const auto& z : basis) row.push_back(z(lp.global(lp.inertia[k])));
    for (const auto& v : allowed) row.push_back(f.neg(v[k]));
    add_row(row, 0);
  }
  FpMatrix a(m.prime(), rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) a.at(i, j) = rows[i][j];
  }
  auto sol = solve_linear(a, rhs);
  if (!sol.particular) throw PipelineError("pinning-data", "no weight 1 class with b1(gamma1) = 1");
  for (const auto& k : sol.kernel) {
    auto c = combine(model, 1, basis, k);
    if (c.is_zero()) continue;
    if (!solve_zero_coboundary(c)) throw PipelineError("pinning-data", "b1 is not determined by the local conditions");
    notes.push_back("b1 determined up to a global coboundary; kept the solution with free variables zero");
  }
  return combine(model, 1, basis, *sol.particular);
}

std::optional<Cochain> pinned_table(const ModelPtr& model, const std::optional<std::vector<Residue>>& t, int w) {
  if (!t) return std::nullopt;
  return Cochain(model, 1, w, *t);
}

}  // namespace

DeformationContext make_context(ModelPtr model) {
  const auto& m = *model;
  for (auto tag : kAllLocalTags) {
    if (!m.has_local(tag)) {
      throw PipelineError("pinning-data", "model lacks local data at " + std::string(to_string(tag)));
    }
  }
  const auto& l0 = m.local(LocalTag::ell0);
  const auto& l1 = m.local(LocalTag::ell1);
  const ElemId gamma0 = l0.global(*l0.gamma);
  const ElemId gamma1 = l1.global(*l1.gamma);
  auto pinned_c1 = solve_pinned_c1(model);
  std::vector<std::string> notes;
  if (pinned_c1.note) notes.push_back(*pinned_c1.note);
  const auto& pins = m.pinned();
  Cochain b1 = pins.b1 ? Cochain(model, 1, 1, *pins.b1) : solve_b1(model, gamma1, notes);
  if (b1(gamma1) != 1) throw PipelineError("pinning-data", "b1(gamma1) must be 1");
  DeformationContext ctx{model,
                         gamma0,
                         gamma1,
                         find_frobenius(m),
                         std::move(b1),
                         std::move(pinned_c1.c1),
                         pinned_table(model, pins.b0, 1),
                         pinned_table(model, pins.a0, 0),
                         pinned_table(model, pins.ap, 0),
                         pinned_c1.x_c1,
                         std::move(notes)};
  if (ctx.a0 && (*ctx.a0)(gamma0) != 1) throw PipelineError("pinning-data", "a0(gamma0) must be 1");
  return ctx;
}

GmaElement FirstOrder::rho(ElemId g) const {
  const auto& f = model->field();
  const std::uint32_t p = f.prime();
  const Residue w = model->omega(g);
  return {TruncatedPoly(p, 1, {w, f.mul(w, a1(g))}), TruncatedPoly(p, 0, {b1(g)}),
          TruncatedPoly(p, 0, {f.mul(w, c1(g))}), TruncatedPoly(p, 1, {1, d1(g)})};
}

FirstOrder make_first_order(Cochain b1, Cochain c1, Cochain a1, WeightedScalar alpha) {
  const auto& m = a1.group();
  const auto& f = m.field();
  if (a1(m.identity()) != 0) throw std::invalid_argument("a1 must vanish at the identity");
  // -d a1 = b1 cup c1 on every generator edge.
  const auto gens = m.generators();
  for (ElemId g = 0; g < m.size(); ++g) {
    for (std::size_t j = 0; j < gens.size(); ++j) {
      const ElemId s = gens[j];
      const Residue da = f.add(f.sub(a1(s), a1(m.right_mul(g, j))), a1(g));
      const Residue cup_value = f.mul(f.mul(b1(g), m.twist(c1.weight(), g)), c1(s));
      if (f.add(da, cup_value) != 0) throw std::invalid_argument("a1 does not bound b1 cup c1");
    }
  }
  Cochain d1 = pointwise(b1, c1) - a1;
  return {a1.model(), std::move(b1), std::move(c1), std::move(a1), std::move(d1), alpha};
}

WeightedScalar line_coordinate(const Cochain& x, const Cochain& c1, ElemId gamma0, int weight,
                               const std::string& tag) {
  const auto& m = x.group();
  const auto& f = m.field();
  const auto& l0 = m.local(LocalTag::ell0);
  if (c1(gamma0) == 0) throw PipelineError(tag, "c1 vanishes at gamma0");
  const Residue lambda = f.mul(x(gamma0), f.inv(c1(gamma0)));
  for (ElemId g : l0.decomposition) {
    if (x(g) != f.mul(lambda, c1(g))) {
      throw PipelineError(tag, "restriction to D_ell0 is not a multiple of c1 (element " + m.name(g) + ")");
    }
  }
  return {FpElement(f.prime(), lambda), weight};
}

A1Result build_a1(const DeformationContext& ctx) {
  const auto& model = ctx.model;
  const auto& m = *model;
  const auto& f = m.field();
  const auto& l0 = m.local(LocalTag::ell0);
  for (ElemId g : l0.decomposition) {
    if (ctx.b1(g) != 0) {
      throw PipelineError("ell1-pth-power", "b1 is nonzero on D_ell0 at " + m.name(g));
    }
  }
  EdgeSolver solver(model, 0, {negated_sum(m.prime(), {cup_lazy(ctx.b1, ctx.c1)})});
  const std::vector<Residue> one{1};
  auto particular = solver.solve(one);
  if (!particular) throw PipelineError("cup-vanishing", "b1 cup c1 is not a coboundary");
  const auto& z = solver.cocycles();
  const auto& flat0 = m.flat().weight_0;
  const auto& lp = m.local(LocalTag::p);
  const std::size_t r = z.size();
  const std::size_t k = flat0.size();
  const std::size_t cols = r + k + 1;

  std::vector<std::vector<Residue>> rows;
  std::vector<Residue> rhs;
  // (g + z)'' on I_p lies in the flat span, where x'' = x - b1 cup x_c1.
  for (ElemId i : lp.inertia) {
    const ElemId g = lp.global(i);
    std::vector<Residue> row(cols, 0);
    for (std::size_t j = 0; j < r; ++j) row[j] = z[j](g);
    for (std::size_t j = 0; j < k; ++j) row[r + j] = f.neg(f.reduce(flat0[j][i]));
    const Residue shifted =
        f.sub((*particular)(g), f.mul(f.mul(ctx.b1(g), m.twist(-1, g)), ctx.x_c1));
    rows.push_back(std::move(row));
    rhs.push_back(f.neg(shifted));
  }
  // (g + z) = alpha c1 on D_ell0.
  for (ElemId g : l0.decomposition) {
    std::vector<Residue> row(cols, 0);
    for (std::size_t j = 0; j < r; ++j) row[j] = z[j](g);
    row[cols - 1] = f.neg(ctx.c1(g));
    rows.push_back(std::move(row));
    rhs.push_back(f.neg((*particular)(g)));
  }
  FpMatrix a(m.prime(), rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) a.at(i, j) = rows[i][j];
  }
  auto sol = solve_linear(a, rhs);
  if (!sol.particular) throw PipelineError("rk2-basis", "no a1 is flat at p and on the c1 line at ell0");
  for (const auto& v : sol.kernel) {
    const bool moves_a1 = std::any_of(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(r), [](Residue x) { return x != 0; });
    if (moves_a1 || v[cols - 1] != 0) {
      throw PipelineError("rk2-basis", "the local conditions at p and ell0 do not determine a1");
    }
  }
  Cochain a1 = *particular + combine(model, 0, z, *sol.particular);
  const auto& l1 = m.local(LocalTag::ell1);
  for (ElemId i : l1.inertia) {
    if (a1(l1.global(i)) != 0) throw PipelineError("ell1-unramified", "a1 is nonzero on I_ell1");
  }
  return {std::move(a1), WeightedScalar(FpElement(m.prime(), (*sol.particular)[cols - 1]), 1)};
}

FirstOrder build_rho1(const DeformationContext& ctx, const A1Result& a1r, StageLog* log) {
  const auto& m = *ctx.model;
  const auto& f = m.field();
  const std::uint32_t p = m.prime();
  FirstOrder fo = make_first_order(ctx.b1, ctx.c1, a1r.a1, a1r.alpha);
  std::vector<GmaElement> images;
  images.reserve(m.size());
  for (ElemId g = 0; g < m.size(); ++g) images.push_back(fo.rho(g));

  auto record = [&](const std::string& name, bool ok, std::string detail = {}) {
    if (log) log->push_back({name, ok, detail});
    if (!ok) throw PipelineError("rho1-verification", name + " failed" + (detail.empty() ? "" : ": " + detail));
  };

  record("rho1-homomorphism", detail::is_homomorphism(m, [&](ElemId g) { return images[g]; }));

  bool ch = true;
  bool trace = true;
  for (ElemId g = 0; g < m.size() && (ch || trace); ++g) {
    ch = ch && cayley_hamilton_check(images[g]);
    const Residue w = m.omega(g);
    const Residue eps = f.add(f.mul(fo.b1(g), fo.c1(g)), f.mul(f.sub(w, 1), fo.a1(g)));
    trace = trace && psi(images[g]).trace == TruncatedPoly(p, 1, {f.add(w, 1), eps});
  }
  record("rho1-cayley-hamilton", ch);
  record("rho1-trace-formula", trace);

  auto us_at = [&](LocalTag tag) -> std::optional<std::pair<ElemId, ElemId>> {
    const auto& loc = m.local(tag);
    for (ElemId s : loc.decomposition) {
      for (ElemId t : loc.decomposition) {
        const bool pair = loc.in_inertia(*loc.local_id(t)) || loc.in_inertia(*loc.local_id(s));
        if (!pair) continue;
        if (!us_product_check(images[s], TruncatedPoly::constant(p, 1, m.omega(s)), images[t])) {
          return std::make_pair(s, t);
        }
      }
    }
    return std::nullopt;
  };
  for (auto tag : {LocalTag::ell0, LocalTag::ell1}) {
    auto w = us_at(tag);
    record("rho1-us-" + std::string(to_string(tag)), !w,
           w ? "pair (" + m.name(w->first) + ", " + m.name(w->second) + ")" : "");
  }

  // Upper-triangular at p after conjugating by (1, 0; -x_c1, 1), with flat diagonal and extension.
  const auto conj = detail::lower_unipotent(p, 1, ctx.x_c1, 0);
  const auto conj_inv = gma_invert(conj);
  const auto& lp = m.local(LocalTag::p);
  bool upper = true;
  std::vector<Residue> a_pp(lp.decomposition.size());
  for (ElemId i = 0; i < lp.decomposition.size(); ++i) {
    const ElemId g = lp.global(i);
    const auto x = conj_inv * images[g] * conj;
    upper = upper && x.c().is_zero();
    a_pp[i] = f.mul(x.a()[1], f.inv(m.omega(g)));
  }
  std::vector<Residue> a_inertia;
  for (ElemId i : lp.inertia) a_inertia.push_back(a_pp[i]);
  const bool a_flat = detail::in_span(f, detail::local_span_at_p(m, 0, m.flat().weight_0), a_inertia);
  const bool b_flat = detail::in_span(f, detail::local_span_at_p(m, 1, m.flat().weight_1),
                              detail::on_inertia_at_p(m, [&](ElemId g) { return fo.b1(g); }));
  record("rho1-flat-at-p", upper && a_flat && b_flat,
         !upper ? "not upper triangular" : !a_flat ? "diagonal not flat" : b_flat ? "" : "b1 not flat");

  bool witness = false;
  for (ElemId g = 0; g < m.size() && !witness; ++g) {
    witness = m.omega(g) == 1 && f.mul(fo.b1(g), fo.c1(g)) != 0;
  }
  if (log) log->push_back({"rho1-surjectivity-witness", witness, witness ? "" : "no element with omega = 1 and b1 c1 != 0"});
  return fo;
}

}  // namespace psd
