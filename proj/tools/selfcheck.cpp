#include "selfcheck.hpp"

#include <functional>
#include <random>
#include <set>

#include "fixture_gen.hpp"
#include "psd/deform.hpp"
#include "psd/solver.hpp"

namespace psd::selfcheck {

namespace {

using Suite = std::function<std::string()>;  // empty string on success

std::mt19937_64& rng() {
  static thread_local std::mt19937_64 engine;
  return engine;
}

TruncatedPoly random_poly(std::uint32_t p, int order) {
  std::uniform_int_distribution<Residue> dist(0, p - 1);
  std::vector<Residue> c(static_cast<std::size_t>(order) + 1);
  for (auto& x : c) x = dist(rng());
  return {p, order, std::move(c)};
}

Cochain random_cochain(const ModelPtr& model, int weight) {
  std::uniform_int_distribution<Residue> dist(0, model->prime() - 1);
  std::vector<Residue> v(model->size());
  for (auto& x : v) x = dist(rng());
  return {model, 1, weight, std::move(v)};
}

std::string cayley_hamilton() {
  for (std::uint32_t p : {3U, 5U, 7U}) {
    for (int n = 1; n <= 3; ++n) {
      for (int i = 0; i < 500; ++i) {
        const GmaElement x(random_poly(p, n), random_poly(p, n - 1), random_poly(p, n - 1), random_poly(p, n));
        if (!cayley_hamilton_check(x)) return "fails over F_" + std::to_string(p) + " at order " + std::to_string(n);
      }
    }
  }
  return {};
}

ModelPtr small_first_order_model() {
  return GroupModel::build(fixtures::first_order_fixture(3, 1, fixtures::FirstOrderVariant::a1_nonzero_at_ell1));
}

// rho1 built from the cup-product equation must multiply like the group.
std::string d1_homomorphism() {
  const auto ctx = make_context(small_first_order_model());
  const auto a1 = build_a1(ctx);
  const auto fo = make_first_order(ctx.b1, ctx.c1, a1.a1, a1.alpha);
  const auto& m = *fo.model;
  for (ElemId g = 0; g < m.size(); ++g) {
    for (ElemId h = 0; h < m.size(); ++h) {
      if (!(fo.rho(g) * fo.rho(h) == fo.rho(m.mul(g, h)))) {
        return "rho1(" + m.name(g) + ") rho1(" + m.name(h) + ") != rho1(product)";
      }
    }
  }
  return {};
}

std::string sign_conventions() {
  const auto model = small_first_order_model();
  const auto& f = model->field();
  for (int i = 0; i < 20; ++i) {
    const auto x = random_cochain(model, 1);
    const auto y = random_cochain(model, -1);
    const auto xy = cup(x, y);
    for (ElemId g = 0; g < model->size(); ++g) {
      for (ElemId h = 0; h < model->size(); ++h) {
        if (xy(g, h) != f.mul(f.mul(x(g), model->twist(y.weight(), g)), y(h))) return "cup differs from its definition";
      }
    }
    if (!d(d(x)).is_zero()) return "d d != 0";
  }
  // Cocycles cup to cocycles.
  const EdgeSolver z1(model, 1);
  const EdgeSolver z_minus(model, -1);
  for (const auto& x : z1.cocycles()) {
    for (const auto& y : z_minus.cocycles()) {
      if (!d(cup(x, y)).is_zero()) return "cup of cocycles is not a cocycle";
    }
  }
  return {};
}

std::string torsor_enumeration() {
  const auto ctx = make_context(GroupModel::build(fixtures::second_order_fixture(3, 0, 0)));
  const auto fo = build_rho1(ctx, build_a1(ctx));
  const auto pi2 = solve_pi2(fo, ctx.b0);
  if (!pi2) return "no second-order lift on the planted model";
  const std::uint32_t p = fo.model->prime();
  const std::size_t k = pi2->basis.size();
  std::set<std::vector<Residue>> seen;
  std::vector<Residue> t(k, 0);
  std::size_t count = 0;
  while (true) {
    auto z = TorsorElement::zero(fo);
    for (std::size_t i = 0; i < k; ++i) {
      z.a += pi2->basis[i].a.scaled(t[i]);
      z.d += pi2->basis[i].d.scaled(t[i]);
      z.b += pi2->basis[i].b.scaled(t[i]);
      z.c += pi2->basis[i].c.scaled(t[i]);
    }
    const auto s = torsor_act(z, pi2->solution, fo);
    if (!satisfies_pi2(fo, s)) return "the action leaves the solution set";
    std::vector<Residue> key;
    for (const auto* c : {&s.a2, &s.d2, &s.b2, &s.c2}) key.insert(key.end(), c->values().begin(), c->values().end());
    seen.insert(std::move(key));
    ++count;
    std::size_t i = 0;
    while (i < k && ++t[i] == p) t[i++] = 0;
    if (i == k) break;
  }
  if (seen.size() != count) return "nontrivial stabilizer: " + std::to_string(count - seen.size()) + " repeats";
  return {};
}

std::string conjugation_formulas() {
  const auto ctx = make_context(GroupModel::build(fixtures::second_order_fixture(5, 2, 3)));
  const auto fo = build_rho1(ctx, build_a1(ctx));
  const auto pi2 = solve_pi2(fo, ctx.b0);
  if (!pi2) return "no second-order lift on the planted model";
  const auto s = normalize_det(pi2->solution, fo);
  const std::uint32_t p = 5;
  const PrimeField f(p);
  std::uniform_int_distribution<Residue> unit(1, p - 1);
  std::uniform_int_distribution<ElemId> elem(0, static_cast<ElemId>(fo.model->size() - 1));
  for (int i = 0; i < 200; ++i) {
    const Residue a0 = unit(rng());
    const auto a = random_poly(p, 2);
    const TruncatedPoly a_unit(p, 2, {a0, a[1], a[2]});
    const auto b = random_poly(p, 1);
    const auto c = random_poly(p, 1);
    const auto dd = (TruncatedPoly::constant(p, 2, a0) + (b * c).shift_up()) * poly_invert(a_unit);
    const GmaElement m(a_unit, b, c, dd.scaled(f.inv(dd[0])));
    const ElemId g = elem(rng());
    if (!conjugation_formulas_hold(m, fo, &s, g)) return "closed form differs at " + fo.model->name(g);
  }
  return {};
}

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all{
      {"cayley-hamilton", cayley_hamilton},
      {"D1-homomorphism", d1_homomorphism},
      {"sign-conventions", sign_conventions},
      {"torsor-enumeration", torsor_enumeration},
      {"conjugation-formulas", conjugation_formulas},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, suite] : suites()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<SuiteResult> run() {
  rng().seed(0x5e1f'c4ec);
  std::vector<SuiteResult> out;
  for (const auto& [name, suite] : suites()) {
    SuiteResult r{name, false, {}};
    try {
      r.detail = suite();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out.push_back(r);
    if (!r.passed) break;
  }
  return out;
}

}  // namespace psd::selfcheck
