#include "psd/solver.hpp"

#include <algorithm>
#include <stdexcept>

#include "psd/errors.hpp"

namespace psd {

namespace {

bool all_zero(std::span<const Residue> v) {
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

// Adds `row` (with right-hand part `rhs`) to a reduced echelon system kept as
// parallel lists. Returns false and leaves `rhs` reduced when the row becomes
// zero on the unknowns.
bool absorb_row(const PrimeField& f, std::vector<Residue>& row, std::vector<Residue>& rhs,
                std::vector<std::vector<Residue>>& rows, std::vector<std::vector<Residue>>& rhss,
                std::vector<std::size_t>& pivots) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Residue c = row[pivots[i]];
    if (c == 0) continue;
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = f.sub(row[k], f.mul(c, rows[i][k]));
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = f.sub(rhs[k], f.mul(c, rhss[i][k]));
  }
  auto it = std::find_if(row.begin(), row.end(), [](Residue x) { return x != 0; });
  if (it == row.end()) return false;
  const auto col = static_cast<std::size_t>(it - row.begin());
  const Residue s = f.inv(row[col]);
  for (auto& x : row) x = f.mul(x, s);
  for (auto& x : rhs) x = f.mul(x, s);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Residue c = rows[i][col];
    if (c == 0) continue;
    for (std::size_t k = 0; k < row.size(); ++k) rows[i][k] = f.sub(rows[i][k], f.mul(c, row[k]));
    for (std::size_t k = 0; k < rhs.size(); ++k) rhss[i][k] = f.sub(rhss[i][k], f.mul(c, rhs[k]));
  }
  rows.push_back(row);
  rhss.push_back(rhs);
  pivots.push_back(col);
  return true;
}

// Echelon basis over element order for a list of 1-cochains on one model.
std::vector<Cochain> echelon(const ModelPtr& model, int weight, std::vector<std::vector<Residue>> vecs,
                             std::vector<ElemId>* pivots_out = nullptr) {
  auto pivots = row_reduce(model->field(), vecs);
  std::vector<Cochain> out;
  for (auto& v : vecs) out.emplace_back(model, 1, weight, std::move(v));
  if (pivots_out != nullptr) {
    pivots_out->clear();
    for (auto p : pivots) pivots_out->push_back(static_cast<ElemId>(p));
  }
  return out;
}

}  // namespace

EdgeSolver::EdgeSolver(ModelPtr model, int weight, std::vector<LazyTwoCochain> rhs)
    : model_(std::move(model)), weight_(model_->normalize_weight(weight)), rhs_count_(rhs.size()) {
  const auto& m = *model_;
  const auto& f = m.field();
  for (const auto& y : rhs) {
    if (m.normalize_weight(y.weight) != weight_) throw std::invalid_argument("right-hand side has the wrong weight");
  }
  const auto gens = m.generators();
  const std::size_t k = gens.size();
  const std::size_t n = m.size();
  const std::size_t r = rhs_count_;
  unknowns_ = 1 + k;
  const std::size_t K = unknowns_;
  forms_.assign(n * K, 0);
  rhs_forms_.assign(n * r, 0);

  std::vector<char> seen(n, 0);
  std::vector<ElemId> order{m.identity()};
  seen[m.identity()] = 1;
  forms_[m.identity() * K] = 1;

  std::vector<Residue> row(K);
  std::vector<Residue> rrow(r);
  std::vector<Residue> yv(r);
  auto absorb = [&] {
    if (!absorb_row(f, row, rrow, pivot_rows_, pivot_rhs_, pivot_cols_)) {
      if (all_zero(rrow)) return;
      std::vector<std::vector<Residue>> ob = obstructions_;
      ob.push_back(rrow);
      row_reduce(f, ob);
      obstructions_ = std::move(ob);
    }
  };

  // df(e, e) = f(e) = y(e, e).
  std::fill(row.begin(), row.end(), 0);
  row[0] = 1;
  for (std::size_t i = 0; i < r; ++i) rrow[i] = rhs[i].eval(m.identity(), m.identity());
  absorb();

  for (std::size_t head = 0; head < order.size(); ++head) {
    const ElemId g = order[head];
    const Residue tw = m.twist(weight_, g);
    for (std::size_t j = 0; j < k; ++j) {
      const ElemId h = m.right_mul(g, j);
      for (std::size_t i = 0; i < r; ++i) yv[i] = rhs[i].eval(g, gens[j]);
      if (seen[h] == 0) {
        seen[h] = 1;
        order.push_back(h);
        for (std::size_t c = 0; c < K; ++c) forms_[h * K + c] = forms_[g * K + c];
        forms_[h * K + 1 + j] = f.add(forms_[h * K + 1 + j], tw);
        for (std::size_t i = 0; i < r; ++i) rhs_forms_[h * r + i] = f.sub(rhs_forms_[g * r + i], yv[i]);
        continue;
      }
      // (form_g + tw e_j - form_h) . U = (rhs_h - rhs_g + y) . t
      for (std::size_t c = 0; c < K; ++c) row[c] = f.sub(forms_[g * K + c], forms_[h * K + c]);
      row[1 + j] = f.add(row[1 + j], tw);
      for (std::size_t i = 0; i < r; ++i) {
        rrow[i] = f.add(f.sub(rhs_forms_[h * r + i], rhs_forms_[g * r + i]), yv[i]);
      }
      absorb();
    }
  }
  if (order.size() != n) throw std::logic_error("generators do not reach every element");

  // f(s_j) = v_j
  for (std::size_t j = 0; j < k; ++j) {
    const ElemId s = gens[j];
    for (std::size_t c = 0; c < K; ++c) row[c] = forms_[s * K + c];
    row[1 + j] = f.sub(row[1 + j], 1);
    for (std::size_t i = 0; i < r; ++i) rrow[i] = f.neg(rhs_forms_[s * r + i]);
    absorb();
  }

  // Kernel: one vector per free unknown, expanded over the group.
  std::vector<char> is_pivot(K, 0);
  for (auto c : pivot_cols_) is_pivot[c] = 1;
  std::vector<std::vector<Residue>> kernel;
  for (std::size_t free = 0; free < K; ++free) {
    if (is_pivot[free] != 0) continue;
    std::vector<Residue> u(K, 0);
    u[free] = 1;
    for (std::size_t i = 0; i < pivot_rows_.size(); ++i) u[pivot_cols_[i]] = f.neg(pivot_rows_[i][free]);
    std::vector<Residue> vals(n);
    for (std::size_t g = 0; g < n; ++g) {
      std::uint64_t acc = 0;
      for (std::size_t c = 0; c < K; ++c) acc += std::uint64_t{forms_[g * K + c]} * u[c];
      vals[g] = static_cast<Residue>(acc % f.prime());
    }
    kernel.push_back(std::move(vals));
  }
  cocycles_ = echelon(model_, weight_, std::move(kernel), &cocycle_pivots_);
}

bool EdgeSolver::consistent(std::span<const Residue> t) const {
  if (t.size() != rhs_count_) throw std::invalid_argument("combination length mismatch");
  const auto& f = model_->field();
  for (const auto& o : obstructions_) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += std::uint64_t{o[i]} * (t[i] % f.prime());
    if (acc % f.prime() != 0) return false;
  }
  return true;
}

Cochain EdgeSolver::reduce_mod_cocycles(Cochain v) const {
  const auto& f = model_->field();
  for (std::size_t i = 0; i < cocycles_.size(); ++i) {
    const Residue c = v(cocycle_pivots_[i]);
    if (c != 0) v -= cocycles_[i].scaled(c);
  }
  (void)f;
  return v;
}

std::optional<Cochain> EdgeSolver::solve(std::span<const Residue> t) const {
  if (!consistent(t)) return std::nullopt;
  const auto& f = model_->field();
  const std::size_t K = unknowns_;
  const std::size_t r = rhs_count_;
  std::vector<Residue> u(K, 0);
  for (std::size_t i = 0; i < pivot_rows_.size(); ++i) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < r; ++c) acc += std::uint64_t{pivot_rhs_[i][c]} * (t[c] % f.prime());
    u[pivot_cols_[i]] = static_cast<Residue>(acc % f.prime());
  }
  const std::size_t n = model_->size();
  std::vector<Residue> vals(n);
  for (std::size_t g = 0; g < n; ++g) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < K; ++c) acc += std::uint64_t{forms_[g * K + c]} * u[c];
    for (std::size_t c = 0; c < r; ++c) acc += std::uint64_t{rhs_forms_[g * r + c]} * (t[c] % f.prime());
    vals[g] = static_cast<Residue>(acc % f.prime());
  }
  return reduce_mod_cocycles(Cochain(model_, 1, weight_, std::move(vals)));
}

bool is_two_cocycle(const Cochain& y) {
  if (y.degree() != 2) throw std::invalid_argument("is_two_cocycle expects a 2-cochain");
  const auto& m = y.group();
  const auto& f = m.field();
  std::vector<ElemId> ks(m.generators().begin(), m.generators().end());
  ks.push_back(m.identity());
  for (ElemId g = 0; g < m.size(); ++g) {
    const Residue tw = m.twist(y.weight(), g);
    for (ElemId h = 0; h < m.size(); ++h) {
      const ElemId gh = m.mul(g, h);
      for (ElemId k : ks) {
        const Residue v = f.add(f.sub(f.mul(tw, y(h, k)), y(gh, k)), f.sub(y(g, m.mul(h, k)), y(g, h)));
        if (v != 0) return false;
      }
    }
  }
  return true;
}

std::optional<Cochain> solve_coboundary(const Cochain& y) {
  if (!is_two_cocycle(y)) throw std::invalid_argument("solve_coboundary: input is not a 2-cocycle");
  return solve_coboundary(y.model(), lazy(y));
}

std::optional<Cochain> solve_coboundary(const ModelPtr& model, const LazyTwoCochain& y) {
  EdgeSolver solver(model, y.weight, {y});
  const Residue one = 1;
  return solver.solve(std::span<const Residue>(&one, 1));
}

std::optional<Residue> solve_zero_coboundary(const Cochain& f) {
  if (f.degree() != 1) throw std::invalid_argument("solve_zero_coboundary expects a 1-cochain");
  const auto& m = f.group();
  const auto& fld = m.field();
  Residue x = 0;
  for (ElemId g = 0; g < m.size(); ++g) {
    const Residue t = m.twist(f.weight(), g);
    if (t != 1) {
      x = fld.mul(f(g), fld.inv(fld.sub(t, 1)));
      break;
    }
  }
  if (coboundary_of_constant(f.model(), f.weight(), x) != f) return std::nullopt;
  return x;
}

std::optional<std::vector<Residue>> span_coefficients(const PrimeField& f,
                                                      const std::vector<std::vector<Residue>>& basis,
                                                      std::span<const Residue> target) {
  if (basis.empty()) {
    if (all_zero(target)) return std::vector<Residue>{};
    return std::nullopt;
  }
  FpMatrix a(f.prime(), target.size(), basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    if (basis[c].size() != target.size()) throw std::invalid_argument("span vectors differ in length");
    for (std::size_t r = 0; r < target.size(); ++r) a.at(r, c) = basis[c][r];
  }
  return solve_linear(a, target).particular;
}

CocycleSpace space(const ModelPtr& model, int degree, int weight) {
  const auto& m = *model;
  const auto& f = m.field();
  CocycleSpace out;
  out.degree = degree;
  out.weight = m.normalize_weight(weight);
  if (degree == 0) {
    if (m.twist_trivial(weight)) out.cocycles.emplace_back(model, 0, weight, std::vector<Residue>{1});
    return out;
  }
  if (degree == 1) {
    out.cocycles = EdgeSolver(model, weight).cocycles();
    if (!m.twist_trivial(weight)) {
      auto b = coboundary_of_constant(model, weight, 1);
      out.coboundaries = echelon(model, weight, {std::vector<Residue>(b.values().begin(), b.values().end())});
    }
    return out;
  }
  if (degree != 2) throw std::invalid_argument("space() supports degrees 0, 1 and 2");
  const std::size_t n = m.size();
  if (n > 16) throw std::length_error("degree-2 spaces are limited to groups of order at most 16");
  const std::size_t n2 = n * n;
  const std::size_t n3 = n2 * n;
  FpMatrix dmat(m.prime(), n3, n2);
  for (std::size_t col = 0; col < n2; ++col) {
    std::vector<Residue> e(n2, 0);
    e[col] = 1;
    auto image = d(Cochain(model, 2, weight, std::move(e)));
    for (std::size_t r = 0; r < n3; ++r) dmat.at(r, col) = image.values()[r];
  }
  auto sol = solve_linear(dmat, std::vector<Residue>(n3, 0));
  auto zs = sol.kernel;
  row_reduce(f, zs);
  for (auto& v : zs) out.cocycles.emplace_back(model, 2, weight, std::move(v));
  std::vector<std::vector<Residue>> bs;
  for (std::size_t g = 0; g < n; ++g) {
    std::vector<Residue> e(n, 0);
    e[g] = 1;
    auto image = d(Cochain(model, 1, weight, std::move(e)));
    bs.emplace_back(image.values().begin(), image.values().end());
  }
  row_reduce(f, bs);
  for (auto& v : bs) out.coboundaries.emplace_back(model, 2, weight, std::move(v));
  return out;
}

PinnedC1 solve_pinned_c1(const ModelPtr& model) {
  const auto& m = *model;
  const auto& f = m.field();
  for (auto tag : kAllLocalTags) {
    if (!m.has_local(tag)) throw PipelineError("pinning-data", "model lacks local data at " + std::string(to_string(tag)));
  }
  const auto& l0 = m.local(LocalTag::ell0);
  const auto& l1 = m.local(LocalTag::ell1);
  const auto& lp = m.local(LocalTag::p);
  const ElemId gamma0 = l0.global(*l0.gamma);

  EdgeSolver solver(model, -1);
  const auto& basis = solver.cocycles();
  const std::size_t r = basis.size();
  // Unknowns: coefficients z_i on the Z^1 basis, then y for the local coboundary at p.
  std::vector<std::vector<Residue>> rows;
  std::vector<Residue> rhs;
  for (ElemId loc = 0; loc < lp.decomposition.size(); ++loc) {
    std::vector<Residue> row(r + 1);
    const ElemId g = lp.global(loc);
    for (std::size_t i = 0; i < r; ++i) row[i] = basis[i](g);
    row[r] = f.neg(f.sub(m.twist(-1, g), 1));
    rows.push_back(std::move(row));
    rhs.push_back(0);
  }
  for (ElemId g : l1.decomposition) {
    std::vector<Residue> row(r + 1, 0);
    for (std::size_t i = 0; i < r; ++i) row[i] = basis[i](g);
    rows.push_back(std::move(row));
    rhs.push_back(0);
  }
  {
    std::vector<Residue> row(r + 1, 0);
    for (std::size_t i = 0; i < r; ++i) row[i] = basis[i](gamma0);
    rows.push_back(std::move(row));
    rhs.push_back(1);
  }
  FpMatrix a(m.prime(), rows.size(), r + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c <= r; ++c) a.at(i, c) = rows[i][c];
  }
  auto sol = solve_linear(a, rhs);
  if (!sol.particular) {
    throw PipelineError("no such class",
                        "no weight -1 cocycle is ramified at ell0, split at ell1 and a coboundary at p");
  }
  auto combine = [&](const std::vector<Residue>& z) {
    Cochain c(model, 1, -1);
    for (std::size_t i = 0; i < r; ++i) {
      if (z[i] != 0) c += basis[i].scaled(z[i]);
    }
    return c;
  };
  std::optional<std::string> note;
  for (const auto& k : sol.kernel) {
    auto c = combine(k);
    if (c.is_zero()) continue;
    if (!solve_zero_coboundary(c)) {
      throw PipelineError("class not unique up to scaling",
                          "the constrained weight -1 class space has dimension above one");
    }
    note = "c1 determined up to a global coboundary; kept the solution with free variables zero";
  }
  PinnedC1 out{combine(*sol.particular), 0, note};
  auto local = restrict(out.c1, LocalTag::p);
  auto x = solve_zero_coboundary(local);
  if (!x) throw std::logic_error("c1 restricted to D_p is not a coboundary after solving");
  out.x_c1 = *x;
  return out;
}

}  // namespace psd
