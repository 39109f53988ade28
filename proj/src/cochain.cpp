#include "psd/cochain.hpp"

#include <algorithm>
#include <stdexcept>

#include "psd/mutation.hpp"

namespace psd {

namespace {

std::size_t table_size(const GroupModel& m, int degree) {
  if (degree < 0 || degree > 3) throw std::invalid_argument("cochain degree must be in 0..3");
  std::size_t n = 1;
  for (int k = 0; k < degree; ++k) {
    if (n > kDenseCochainLimit / m.size()) {
      throw std::length_error("degree-" + std::to_string(degree) + " cochain table too large for |G| = " +
                              std::to_string(m.size()));
    }
    n *= m.size();
  }
  return n;
}

// Iterates over all k-tuples of elements in lexicographic order.
template <typename Fn>
void for_each_tuple(std::size_t n, int k, Fn&& fn) {
  std::vector<ElemId> t(static_cast<std::size_t>(k), 0);
  std::size_t idx = 0;
  while (true) {
    fn(std::span<const ElemId>(t), idx++);
    int pos = k - 1;
    while (pos >= 0 && ++t[static_cast<std::size_t>(pos)] == n) t[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
}

Residue cup_sign(const PrimeField& f, Residue v) {
  return active_mutation() == Mutation::flip_cup_sign ? f.neg(v) : v;
}

}  // namespace

Cochain::Cochain(ModelPtr model, int degree, int weight)
    : model_(std::move(model)), degree_(degree), weight_(0) {
  weight_ = model_->normalize_weight(weight);
  values_.assign(table_size(*model_, degree), 0);
}

Cochain::Cochain(ModelPtr model, int degree, int weight, std::vector<Residue> values)
    : model_(std::move(model)), degree_(degree), weight_(0), values_(std::move(values)) {
  weight_ = model_->normalize_weight(weight);
  if (values_.size() != table_size(*model_, degree)) throw std::invalid_argument("cochain table has wrong size");
  for (auto& v : values_) v %= model_->prime();
}

Cochain Cochain::from_ints(ModelPtr model, int degree, int weight, std::span<const std::int64_t> values) {
  std::vector<Residue> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = model->field().reduce(values[i]);
  return {std::move(model), degree, weight, std::move(v)};
}

std::size_t Cochain::index(std::span<const ElemId> args) const {
  if (static_cast<int>(args.size()) != degree_) throw std::invalid_argument("wrong number of cochain arguments");
  std::size_t idx = 0;
  for (ElemId g : args) idx = idx * model_->size() + g;
  return idx;
}

bool Cochain::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](Residue v) { return v == 0; });
}

Cochain Cochain::scaled(Residue s) const {
  Cochain out = *this;
  const auto& f = model_->field();
  for (auto& v : out.values_) v = f.mul(v, s % f.prime());
  return out;
}

void Cochain::require_compatible(const Cochain& o) const {
  if (model_ != o.model_) throw std::invalid_argument("cochains live on different models");
  if (degree_ != o.degree_ || weight_ != o.weight_) {
    throw std::invalid_argument("cochains differ in degree or weight");
  }
}

Cochain& Cochain::operator+=(const Cochain& o) {
  require_compatible(o);
  const auto& f = model_->field();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = f.add(values_[i], o.values_[i]);
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& o) {
  require_compatible(o);
  const auto& f = model_->field();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = f.sub(values_[i], o.values_[i]);
  return *this;
}

bool operator==(const Cochain& a, const Cochain& b) {
  return a.model_ == b.model_ && a.degree_ == b.degree_ && a.weight_ == b.weight_ && a.values_ == b.values_;
}

LazyTwoCochain lazy(const Cochain& dense_two) {
  if (dense_two.degree() != 2) throw std::invalid_argument("lazy() expects a 2-cochain");
  return {dense_two.weight(), [c = dense_two](ElemId g, ElemId h) { return c(g, h); }};
}

LazyTwoCochain lazy_combination(std::vector<Residue> coeffs, std::vector<LazyTwoCochain> terms, std::uint32_t p) {
  if (coeffs.size() != terms.size()) throw std::invalid_argument("coefficient count mismatch");
  const int w = terms.empty() ? 0 : terms.front().weight;
  return {w, [coeffs = std::move(coeffs), terms = std::move(terms), p](ElemId g, ElemId h) {
            std::uint64_t acc = 0;
            for (std::size_t i = 0; i < terms.size(); ++i) {
              if (coeffs[i] != 0) acc = (acc + std::uint64_t{coeffs[i]} * terms[i].eval(g, h)) % p;
            }
            return static_cast<Residue>(acc);
          }};
}

Cochain d(const Cochain& f) {
  const auto& m = f.group();
  const auto& fld = m.field();
  const int k = f.degree();
  if (k > 2) throw std::invalid_argument("differential is implemented up to degree 2");
  Cochain out(f.model(), k + 1, f.weight());
  std::vector<ElemId> args(static_cast<std::size_t>(k));
  for_each_tuple(m.size(), k + 1, [&](std::span<const ElemId> g, std::size_t idx) {
    // omega(g_1)^w f(g_2, ..., g_{k+1})
    std::copy(g.begin() + 1, g.end(), args.begin());
    Residue acc = fld.mul(m.twist(f.weight(), g[0]), f.at(args));
    for (int i = 1; i <= k; ++i) {
      std::size_t pos = 0;
      for (int j = 0; j <= k; ++j) {
        if (j == i) continue;
        args[pos++] = j == i - 1 ? m.mul(g[static_cast<std::size_t>(j)], g[static_cast<std::size_t>(j) + 1])
                                 : g[static_cast<std::size_t>(j)];
      }
      const Residue term = f.at(args);
      acc = (i % 2 == 1) ? fld.sub(acc, term) : fld.add(acc, term);
    }
    std::copy(g.begin(), g.end() - 1, args.begin());
    const Residue last = f.at(args);
    acc = (k % 2 == 0) ? fld.sub(acc, last) : fld.add(acc, last);
    out.set(g, acc);
    (void)idx;
  });
  return out;
}

Cochain cup(const Cochain& f, const Cochain& g) {
  if (f.model() != g.model()) throw std::invalid_argument("cup of cochains on different models");
  const auto& m = f.group();
  const auto& fld = m.field();
  const int i = f.degree();
  const int j = g.degree();
  Cochain out(f.model(), i + j, f.weight() + g.weight());
  std::vector<ElemId> left(static_cast<std::size_t>(i));
  std::vector<ElemId> right(static_cast<std::size_t>(j));
  for_each_tuple(m.size(), i + j, [&](std::span<const ElemId> t, std::size_t idx) {
    ElemId prod = m.identity();
    for (int a = 0; a < i; ++a) {
      left[static_cast<std::size_t>(a)] = t[static_cast<std::size_t>(a)];
      prod = m.mul(prod, t[static_cast<std::size_t>(a)]);
    }
    for (int b = 0; b < j; ++b) right[static_cast<std::size_t>(b)] = t[static_cast<std::size_t>(i + b)];
    const Residue v = fld.mul(fld.mul(f.at(left), m.twist(g.weight(), prod)), g.at(right));
    out.set(t, cup_sign(fld, v));
    (void)idx;
  });
  return out;
}

LazyTwoCochain cup_lazy(const Cochain& f, const Cochain& g) {
  if (f.degree() != 1 || g.degree() != 1) throw std::invalid_argument("cup_lazy expects two 1-cochains");
  if (f.model() != g.model()) throw std::invalid_argument("cup of cochains on different models");
  const int w = f.group().normalize_weight(f.weight() + g.weight());
  return {w, [f, g](ElemId s, ElemId t) {
            const auto& m = f.group();
            const auto& fld = m.field();
            return cup_sign(fld, fld.mul(fld.mul(f(s), m.twist(g.weight(), s)), g(t)));
          }};
}

Cochain pointwise(const Cochain& f, const Cochain& g) {
  if (f.model() != g.model() || f.degree() != g.degree()) {
    throw std::invalid_argument("pointwise product needs matching model and degree");
  }
  std::vector<Residue> v(f.values().size());
  const auto& fld = f.group().field();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fld.mul(f.values()[i], g.values()[i]);
  return {f.model(), f.degree(), f.weight() + g.weight(), std::move(v)};
}

Cochain restrict(const Cochain& f, LocalTag tag) {
  const auto& loc = f.group().local(tag);
  const auto& sub = loc.group;
  Cochain out(sub, f.degree(), f.weight());
  std::vector<ElemId> args(static_cast<std::size_t>(f.degree()));
  for_each_tuple(sub->size(), f.degree(), [&](std::span<const ElemId> t, std::size_t idx) {
    for (std::size_t a = 0; a < t.size(); ++a) args[a] = loc.global(t[a]);
    out.set(t, f.at(args));
    (void)idx;
  });
  return out;
}

LazyTwoCochain restrict_lazy(const GroupModel& model, const LazyTwoCochain& y, LocalTag tag) {
  const auto& loc = model.local(tag);
  return {loc.group->normalize_weight(y.weight),
          [decomp = loc.decomposition, eval = y.eval](ElemId g, ElemId h) { return eval(decomp[g], decomp[h]); }};
}

Cochain coboundary_of_constant(const ModelPtr& model, int weight, Residue x) {
  Cochain out(model, 1, weight);
  const auto& fld = model->field();
  for (ElemId g = 0; g < model->size(); ++g) out.set(g, fld.mul(fld.sub(model->twist(weight, g), 1), x));
  return out;
}

bool is_one_cocycle(const Cochain& f) {
  if (f.degree() != 1) throw std::invalid_argument("is_one_cocycle expects a 1-cochain");
  const auto& m = f.group();
  const auto& fld = m.field();
  if (f(m.identity()) != 0) return false;
  const auto gens = m.generators();
  for (ElemId g = 0; g < m.size(); ++g) {
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (f(m.right_mul(g, j)) != fld.add(f(g), fld.mul(m.twist(f.weight(), g), f(gens[j])))) return false;
    }
  }
  return true;
}

}  // namespace psd
