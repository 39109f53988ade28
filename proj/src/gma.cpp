#include "psd/gma.hpp"

#include <sstream>
#include <stdexcept>

#include "psd/mutation.hpp"

namespace psd {

namespace {

// Truncates or zero-pads to the requested order.
TruncatedPoly resize(const TruncatedPoly& x, int order) {
  if (order <= x.order()) return x.truncate(order);
  TruncatedPoly out(x.prime(), order);
  for (int k = 0; k <= x.order(); ++k) out.set(k, x[k]);
  return out;
}

// The multiplication map B (x) C -> A of the algebra.
TruncatedPoly cross(const TruncatedPoly& b, const TruncatedPoly& c, int diag_order) {
  return resize((b * c).shift_up(), diag_order);
}

// Cross term inside gma_mul; the only place the drop-eps-shift fault applies.
TruncatedPoly product_cross(const TruncatedPoly& b, const TruncatedPoly& c, int diag_order) {
  if (active_mutation() == Mutation::drop_eps_shift) return resize(b * c, diag_order);
  return cross(b, c, diag_order);
}

// Scalar matrix with the same off-diagonal order as the template element.
GmaElement scalar_like(const TruncatedPoly& s, const GmaElement& shape) {
  if (!shape.has_off_diagonal()) return {s, s};
  TruncatedPoly z(s.prime(), shape.off_order());
  return {s, z, z, s};
}

}  // namespace

GmaElement::GmaElement(TruncatedPoly a, TruncatedPoly b, TruncatedPoly c, TruncatedPoly d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (a_.prime() != d_.prime() || a_.prime() != b_->prime() || a_.prime() != c_->prime()) {
    throw ModulusMismatch("GMA entries have different moduli");
  }
  if (a_.order() != d_.order() || b_->order() != c_->order()) {
    throw std::invalid_argument("GMA diagonal or off-diagonal orders disagree");
  }
  const int k = b_->order();
  if (k != a_.order() - 1 && k != a_.order()) {
    throw std::invalid_argument("GMA off-diagonal order must be n-1 or n");
  }
}

GmaElement::GmaElement(TruncatedPoly a, TruncatedPoly d) : a_(std::move(a)), d_(std::move(d)) {
  if (a_.prime() != d_.prime()) throw ModulusMismatch("GMA entries have different moduli");
  if (a_.order() != 0 || d_.order() != 0) {
    throw std::invalid_argument("only E_0 elements omit off-diagonal entries");
  }
}

GmaElement GmaElement::identity(std::uint32_t p, int order) {
  return scalar(TruncatedPoly::constant(p, order, 1));
}

GmaElement GmaElement::zero(std::uint32_t p, int order) {
  return scalar(TruncatedPoly(p, order));
}

GmaElement GmaElement::scalar(const TruncatedPoly& s) {
  if (s.order() == 0) return {s, s};
  TruncatedPoly z(s.prime(), s.order() - 1);
  return {s, z, z, s};
}

GmaElement GmaElement::from_ints(std::uint32_t p, int order, std::int64_t a, std::int64_t b,
                                 std::int64_t c, std::int64_t d) {
  auto ta = TruncatedPoly::constant(p, order, a);
  auto td = TruncatedPoly::constant(p, order, d);
  if (order == 0) return {ta, td};
  return {ta, TruncatedPoly::constant(p, order - 1, b), TruncatedPoly::constant(p, order - 1, c),
          td};
}

const TruncatedPoly& GmaElement::b() const {
  if (!b_) throw std::logic_error("E_0 element has no off-diagonal entries");
  return *b_;
}

const TruncatedPoly& GmaElement::c() const {
  if (!c_) throw std::logic_error("E_0 element has no off-diagonal entries");
  return *c_;
}

bool GmaElement::is_zero() const {
  return a_.is_zero() && d_.is_zero() && (!b_ || b_->is_zero()) && (!c_ || c_->is_zero());
}

GmaElement GmaElement::scaled(const TruncatedPoly& s) const {
  GmaElement out = *this;
  out.a_ = s * a_;
  out.d_ = s * d_;
  if (b_) {
    auto so = resize(s, b_->order());
    out.b_ = so * *b_;
    out.c_ = so * *c_;
  }
  return out;
}

void GmaElement::require_same_shape(const GmaElement& o) const {
  if (prime() != o.prime()) throw ModulusMismatch("GMA elements have different moduli");
  if (order() != o.order() || off_order() != o.off_order()) {
    throw std::invalid_argument("GMA elements have different shapes");
  }
}

GmaElement& GmaElement::operator+=(const GmaElement& o) {
  require_same_shape(o);
  a_ += o.a_;
  d_ += o.d_;
  if (b_) {
    *b_ += *o.b_;
    *c_ += *o.c_;
  }
  return *this;
}

GmaElement& GmaElement::operator-=(const GmaElement& o) {
  require_same_shape(o);
  a_ -= o.a_;
  d_ -= o.d_;
  if (b_) {
    *b_ -= *o.b_;
    *c_ -= *o.c_;
  }
  return *this;
}

GmaElement operator*(const GmaElement& x, const GmaElement& y) {
  x.require_same_shape(y);
  if (!x.b_) return {x.a_ * y.a_, x.d_ * y.d_};
  const int n = x.order();
  const int k = x.off_order();
  auto a = x.a_ * y.a_ + product_cross(*x.b_, *y.c_, n);
  auto d = x.d_ * y.d_ + product_cross(*x.c_, *y.b_, n);
  auto b = resize(x.a_, k) * *y.b_ + *x.b_ * resize(y.d_, k);
  auto c = *x.c_ * resize(y.a_, k) + resize(x.d_, k) * *y.c_;
  return {std::move(a), std::move(b), std::move(c), std::move(d)};
}

std::string GmaElement::to_string() const {
  std::ostringstream os;
  os << "(" << a_.to_string();
  if (b_) os << ", " << b_->to_string() << "; " << c_->to_string() << ", ";
  else os << ", -; -, ";
  os << d_.to_string() << ")";
  return os.str();
}

GmaElement gma_mul(const GmaElement& x, const GmaElement& y) { return x * y; }

PseudoRepValue psi(const GmaElement& x) {
  auto det = x.a() * x.d();
  if (x.has_off_diagonal()) det -= cross(x.b(), x.c(), x.order());
  return {x.a() + x.d(), det};
}

GmaElement gma_invert(const GmaElement& x) {
  auto det = psi(x).det;
  if (!det.is_unit()) throw NotInvertible("GMA element has non-unit determinant");
  auto inv = poly_invert(det);
  if (!x.has_off_diagonal()) return GmaElement(x.d(), x.a()).scaled(inv);
  return GmaElement(x.d(), -x.b(), -x.c(), x.a()).scaled(inv);
}

bool cayley_hamilton_check(const GmaElement& x) {
  auto pr = psi(x);
  auto lhs = x * x - x.scaled(pr.trace) + scalar_like(pr.det, x);
  return lhs.is_zero();
}

bool us_product_check(const GmaElement& rho_sigma, const TruncatedPoly& kappa_sigma,
                      const GmaElement& rho_tau) {
  const auto one = scalar_like(TruncatedPoly::constant(rho_tau.prime(), rho_tau.order(), 1), rho_tau);
  auto left = rho_sigma - scalar_like(kappa_sigma, rho_sigma);
  return (left * (rho_tau - one)).is_zero();
}

GmaElement reduce(const GmaElement& x, int m) {
  if (m > x.order()) throw std::invalid_argument("reduction target order exceeds source order");
  if (m < 0) throw std::invalid_argument("negative reduction order");
  if (m == 0) return {x.a().truncate(0), x.d().truncate(0)};
  return {x.a().truncate(m), x.b().truncate(m - 1), x.c().truncate(m - 1), x.d().truncate(m)};
}

GmaElement tensor_reduce(const GmaElement& x, int m) {
  if (m >= x.order()) throw std::invalid_argument("tensor reduction needs m < n");
  if (m < 0) throw std::invalid_argument("negative reduction order");
  return {x.a().truncate(m), x.b().truncate(m), x.c().truncate(m), x.d().truncate(m)};
}

GmaElement off_diagonal_reduce(const GmaElement& x) {
  if (x.off_order() != x.order()) throw std::invalid_argument("expected a tensor-reduced element");
  if (x.order() == 0) return {x.a(), x.d()};
  const int k = x.order() - 1;
  return {x.a(), x.b().truncate(k), x.c().truncate(k), x.d()};
}

PolyMatrix2 PolyMatrix2::identity(std::uint32_t p, int order) {
  auto one = TruncatedPoly::constant(p, order, 1);
  TruncatedPoly z(p, order);
  return {one, z, z, one};
}

PolyMatrix2 operator*(const PolyMatrix2& x, const PolyMatrix2& y) {
  return {x.e00 * y.e00 + x.e01 * y.e10, x.e00 * y.e01 + x.e01 * y.e11,
          x.e10 * y.e00 + x.e11 * y.e10, x.e10 * y.e01 + x.e11 * y.e11};
}

PolyMatrix2 ut_embed(const GmaElement& x) {
  const int n = x.order();
  TruncatedPoly z(x.prime(), n);
  if (!x.has_off_diagonal()) return {x.a(), z, z, x.d()};
  if (!x.c().is_zero()) throw std::invalid_argument("ut_embed needs a zero lower-left entry");
  return {x.a(), resize(x.b().shift_up(), n), z, x.d()};
}

PolyMatrix2 matrix_reduce(const GmaElement& x) {
  const int n = x.order();
  if (n == 0) throw std::invalid_argument("matrix_reduce needs order at least 1");
  if (x.off_order() != n - 1) throw std::invalid_argument("matrix_reduce expects an E_n element");
  return {x.a().truncate(n - 1), x.b(), x.c().shift_up().truncate(n - 1), x.d().truncate(n - 1)};
}

}  // namespace psd
