#include "fixture_gen.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace psd::fixtures {

namespace {

void append_coeffs(std::uint64_t& k, std::uint64_t p, const TruncatedPoly& x) {
  for (Residue c : x.coeffs()) k = k * p + c;
}

TruncatedPoly poly_of(std::uint32_t p, int order, const std::vector<std::int64_t>& v) {
  std::vector<std::int64_t> padded(v);
  padded.resize(static_cast<std::size_t>(order) + 1, 0);
  return TruncatedPoly::from_ints(p, order, padded);
}

Residue least_generator(const PrimeField& f) {
  for (Residue g = 2; g < f.prime(); ++g) {
    if (f.order(g) == f.prime() - 1) return g;
  }
  return 1;
}

ModelSpec::Local local_of(std::vector<ElemId> decomposition, std::vector<ElemId> inertia,
                          std::optional<ElemId> gamma) {
  return {std::move(decomposition), std::move(inertia), gamma};
}

}  // namespace

std::uint64_t GmaGroup::key(const GmaElement& x) const {
  std::uint64_t k = 0;
  append_coeffs(k, prime_, x.a());
  append_coeffs(k, prime_, x.b());
  append_coeffs(k, prime_, x.c());
  append_coeffs(k, prime_, x.d());
  return k;
}

GmaGroup GmaGroup::close(const std::vector<GmaElement>& generators, std::size_t limit) {
  if (generators.empty()) throw std::invalid_argument("need at least one generator");
  GmaGroup g;
  g.prime_ = generators.front().prime();
  const int order = generators.front().order();
  auto one = GmaElement::identity(g.prime_, order);
  g.elements_.push_back(one);
  g.index_.emplace(g.key(one), 0);
  for (std::size_t head = 0; head < g.elements_.size(); ++head) {
    std::vector<ElemId> row;
    for (const auto& s : generators) {
      auto y = g.elements_[head] * s;
      auto [it, fresh] = g.index_.emplace(g.key(y), static_cast<ElemId>(g.elements_.size()));
      if (fresh) {
        if (g.elements_.size() >= limit) throw std::length_error("closure exceeds the element limit");
        g.elements_.push_back(std::move(y));
      }
      row.push_back(it->second);
    }
    g.right_.push_back(std::move(row));
  }
  for (const auto& s : generators) g.generator_ids_.push_back(g.id_of(s));
  return g;
}

ElemId GmaGroup::id_of(const GmaElement& x) const {
  auto it = index_.find(key(x));
  if (it == index_.end()) throw std::out_of_range("element not in the group");
  return it->second;
}

std::vector<ElemId> GmaGroup::subgroup(const std::vector<GmaElement>& gens) const {
  std::vector<ElemId> out{0};
  std::vector<char> seen(size(), 0);
  seen[0] = 1;
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const auto& s : gens) {
      const ElemId y = id_of(elements_[out[head]] * s);
      if (seen[y] == 0) {
        seen[y] = 1;
        out.push_back(y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ModelSpec GmaGroup::tabulate(bool dense) const {
  ModelSpec spec;
  spec.p = prime_;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    spec.elements.push_back("g" + std::to_string(i));
    spec.omega.push_back(elements_[i].a()[0]);
  }
  if (dense) {
    spec.dense.assign(n, std::vector<ElemId>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) spec.dense[i][j] = id_of(elements_[i] * elements_[j]);
    }
  } else {
    spec.cayley = ModelSpec::Cayley{generator_ids_, right_};
  }
  return spec;
}

GmaElement det_constant_element(std::uint32_t p, int order, std::vector<std::int64_t> a,
                                std::vector<std::int64_t> b, std::vector<std::int64_t> c) {
  auto ta = poly_of(p, order, a);
  auto tb = poly_of(p, order - 1, b);
  auto tc = poly_of(p, order - 1, c);
  // a d - eps b c = a(0)
  auto target = TruncatedPoly::constant(p, order, ta[0]) + (tb * tc).shift_up();
  return {ta, tb, tc, target * poly_invert(ta)};
}

SecondOrderGenerators second_order_generators(std::uint32_t p, std::int64_t alpha, std::int64_t beta) {
  const auto mu = static_cast<std::int64_t>(least_generator(PrimeField(p)));
  return {det_constant_element(p, 2, {mu}, {0}, {0}), det_constant_element(p, 2, {1, alpha}, {0, beta}, {1}),
          det_constant_element(p, 2, {1}, {1}, {0})};
}

GmaGroup second_order_group(std::uint32_t p, std::int64_t alpha, std::int64_t beta) {
  const auto gens = second_order_generators(p, alpha, beta);
  return GmaGroup::close({gens.g_mu, gens.gamma0, gens.gamma1});
}

ModelSpec second_order_fixture(std::uint32_t p, std::int64_t alpha, std::int64_t beta) {
  const auto [g_mu, gamma0, gamma1] = second_order_generators(p, alpha, beta);
  auto group = GmaGroup::close({g_mu, gamma0, gamma1});
  auto spec = group.tabulate(false);
  const ElemId id0 = group.id_of(gamma0);
  const ElemId id1 = group.id_of(gamma1);
  auto ell0 = group.subgroup({gamma0});
  spec.locals[0] = local_of(ell0, ell0, id0);
  spec.locals[1] = local_of(group.subgroup({gamma1, g_mu}), group.subgroup({gamma1}), id1);
  auto at_p = group.subgroup({g_mu});
  spec.locals[2] = local_of(at_p, at_p, std::nullopt);
  ModelSpec::Pinned pinned;
  std::vector<std::int64_t> b1(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) b1[i] = group.element(static_cast<ElemId>(i)).b()[0];
  pinned.b1 = std::move(b1);
  spec.pinned = std::move(pinned);
  return spec;
}

ModelSpec first_order_fixture(std::uint32_t p, std::int64_t alpha, FirstOrderVariant variant) {
  const PrimeField f(p);
  const auto mu = static_cast<std::int64_t>(least_generator(f));
  auto g_mu = det_constant_element(p, 1, {mu}, {0}, {0});
  auto gamma0 = det_constant_element(p, 1, {1, alpha}, {0}, {1});
  auto gamma1 = det_constant_element(p, 1, {1}, {1}, {0});
  auto twist = det_constant_element(p, 1, {1, 1}, {0}, {0});
  auto lower = det_constant_element(p, 1, {1}, {0}, {1});
  auto group = GmaGroup::close({g_mu, gamma0, gamma1});
  auto spec = group.tabulate(true);

  GmaElement inertia0 = variant == FirstOrderVariant::b1_nonzero_at_ell0 ? gamma0 * gamma1 : gamma0;
  auto ell0 = group.subgroup({inertia0});
  spec.locals[0] = local_of(ell0, ell0, group.id_of(inertia0));

  std::vector<GmaElement> d1{gamma1, g_mu};
  if (variant == FirstOrderVariant::a1_nonzero_at_ell1) d1.push_back(twist);
  spec.locals[1] = local_of(group.subgroup(d1), group.subgroup({gamma1}), group.id_of(gamma1));

  std::vector<GmaElement> dp{g_mu};
  if (variant == FirstOrderVariant::no_such_class) dp.push_back(lower);
  auto at_p = group.subgroup(dp);
  spec.locals[2] = local_of(at_p, at_p, std::nullopt);

  ModelSpec::Pinned pinned;
  std::vector<std::int64_t> b1(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) b1[i] = group.element(static_cast<ElemId>(i)).b()[0];
  pinned.b1 = std::move(b1);
  spec.pinned = std::move(pinned);
  return spec;
}

}  // namespace psd::fixtures
