#include "psd/ring.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace psd {

namespace {

__extension__ using Wide = unsigned __int128;

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<Wide>(a) * b) % m);
}

}  // namespace

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e != 0) {
    if ((e & 1U) != 0) r = mulmod64(r, a, m);
    a = mulmod64(a, a, m);
    e >>= 1U;
  }
  return r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto q : bases) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (auto a : bases) {
    std::uint64_t x = powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (p < 3 || !is_prime(p)) {
    throw std::invalid_argument("modulus " + std::to_string(p) + " is not an odd prime");
  }
}

Residue PrimeField::reduce(std::int64_t v) const {
  auto m = static_cast<std::int64_t>(p_);
  auto r = v % m;
  return static_cast<Residue>(r < 0 ? r + m : r);
}

Residue PrimeField::pow(Residue a, std::int64_t e) const {
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  return static_cast<Residue>(powmod64(a, static_cast<std::uint64_t>(e), p_));
}

Residue PrimeField::inv(Residue a) const {
  if (a % p_ == 0) throw NotInvertible("zero has no inverse mod " + std::to_string(p_));
  return static_cast<Residue>(powmod64(a, p_ - 2, p_));
}

std::uint32_t PrimeField::order(Residue a) const {
  if (a % p_ == 0) throw NotInvertible("zero has no multiplicative order");
  std::uint32_t k = 1;
  Residue x = a % p_;
  while (x != 1) {
    x = mul(x, a);
    ++k;
  }
  return k;
}

FpElement::FpElement(std::uint32_t p, std::int64_t v) : p_(p), value_(0) {
  if (p < 3 || !is_prime(p)) {
    throw std::invalid_argument("modulus " + std::to_string(p) + " is not an odd prime");
  }
  auto m = static_cast<std::int64_t>(p);
  auto r = v % m;
  value_ = static_cast<Residue>(r < 0 ? r + m : r);
}

void FpElement::require_same(const FpElement& o) const {
  if (p_ != o.p_) {
    throw ModulusMismatch("F_" + std::to_string(p_) + " vs F_" + std::to_string(o.p_));
  }
}

FpElement FpElement::inverse() const {
  if (value_ == 0) throw NotInvertible("zero has no inverse mod " + std::to_string(p_));
  return {p_, static_cast<std::int64_t>(powmod64(value_, p_ - 2, p_))};
}

FpElement& FpElement::operator+=(const FpElement& o) {
  require_same(o);
  value_ = static_cast<Residue>((static_cast<std::uint64_t>(value_) + o.value_) % p_);
  return *this;
}

FpElement& FpElement::operator-=(const FpElement& o) {
  require_same(o);
  value_ = static_cast<Residue>((static_cast<std::uint64_t>(value_) + p_ - o.value_) % p_);
  return *this;
}

FpElement& FpElement::operator*=(const FpElement& o) {
  require_same(o);
  value_ = static_cast<Residue>((static_cast<std::uint64_t>(value_) * o.value_) % p_);
  return *this;
}

TruncatedPoly::TruncatedPoly(std::uint32_t p, int order)
    : p_(p), order_(order), coeffs_(static_cast<std::size_t>(order < 0 ? 0 : order + 1), 0) {
  if (order < 0) throw std::invalid_argument("truncation order must be non-negative");
  (void)PrimeField(p);
}

TruncatedPoly::TruncatedPoly(std::uint32_t p, int order, std::vector<Residue> coeffs)
    : p_(p), order_(order), coeffs_(std::move(coeffs)) {
  if (order < 0) throw std::invalid_argument("truncation order must be non-negative");
  if (coeffs_.size() != static_cast<std::size_t>(order) + 1) {
    throw std::invalid_argument("coefficient count must be order+1");
  }
  for (auto& c : coeffs_) c %= p_;
}

TruncatedPoly TruncatedPoly::constant(std::uint32_t p, int order, std::int64_t c) {
  TruncatedPoly t(p, order);
  t.coeffs_[0] = PrimeField(p).reduce(c);
  return t;
}

TruncatedPoly TruncatedPoly::from_ints(std::uint32_t p, int order,
                                       std::span<const std::int64_t> coeffs) {
  PrimeField f(p);
  TruncatedPoly t(p, order);
  for (std::size_t k = 0; k < coeffs.size() && k <= static_cast<std::size_t>(order); ++k) {
    t.coeffs_[k] = f.reduce(coeffs[k]);
  }
  return t;
}

void TruncatedPoly::set(int k, Residue v) {
  if (k < 0 || k > order_) throw std::out_of_range("coefficient index outside truncation");
  coeffs_[static_cast<std::size_t>(k)] = v % p_;
}

bool TruncatedPoly::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Residue c) { return c == 0; });
}

TruncatedPoly TruncatedPoly::truncate(int m) const {
  if (m > order_) throw std::invalid_argument("cannot truncate to a higher order");
  std::vector<Residue> c(coeffs_.begin(), coeffs_.begin() + m + 1);
  return {p_, m, std::move(c)};
}

TruncatedPoly TruncatedPoly::shift_up() const {
  TruncatedPoly t(p_, order_ + 1);
  std::copy(coeffs_.begin(), coeffs_.end(), t.coeffs_.begin() + 1);
  return t;
}

TruncatedPoly TruncatedPoly::scaled(Residue s) const {
  TruncatedPoly t = *this;
  for (auto& c : t.coeffs_) c = static_cast<Residue>((static_cast<std::uint64_t>(c) * s) % p_);
  return t;
}

void TruncatedPoly::require_same(const TruncatedPoly& o) const {
  if (p_ != o.p_ || order_ != o.order_) {
    throw ModulusMismatch("truncated polynomials differ in modulus or order");
  }
}

TruncatedPoly& TruncatedPoly::operator+=(const TruncatedPoly& o) {
  require_same(o);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    coeffs_[k] = static_cast<Residue>((static_cast<std::uint64_t>(coeffs_[k]) + o.coeffs_[k]) % p_);
  }
  return *this;
}

TruncatedPoly& TruncatedPoly::operator-=(const TruncatedPoly& o) {
  require_same(o);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    coeffs_[k] =
        static_cast<Residue>((static_cast<std::uint64_t>(coeffs_[k]) + p_ - o.coeffs_[k]) % p_);
  }
  return *this;
}

TruncatedPoly TruncatedPoly::operator-() const {
  TruncatedPoly t = *this;
  for (auto& c : t.coeffs_) c = c == 0 ? 0 : p_ - c;
  return t;
}

TruncatedPoly operator*(const TruncatedPoly& a, const TruncatedPoly& b) {
  a.require_same(b);
  TruncatedPoly r(a.p_, a.order_);
  const auto n = a.coeffs_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; i + j < n; ++j) {
      r.coeffs_[i + j] = static_cast<Residue>(
          (r.coeffs_[i + j] + static_cast<std::uint64_t>(a.coeffs_[i]) * b.coeffs_[j]) % a.p_);
    }
  }
  return r;
}

std::string TruncatedPoly::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k <= order_; ++k) {
    auto c = coeffs_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (k == 0) {
      os << c;
    } else {
      if (c != 1) os << c;
      os << "e";
      if (k > 1) os << "^" << k;
    }
  }
  if (first) os << "0";
  return os.str();
}

TruncatedPoly poly_mul(const TruncatedPoly& a, const TruncatedPoly& b) { return a * b; }

TruncatedPoly poly_invert(const TruncatedPoly& a) {
  if (!a.is_unit()) throw NotInvertible("truncated polynomial has zero constant term");
  PrimeField f(a.prime());
  std::vector<Residue> r(static_cast<std::size_t>(a.order()) + 1, 0);
  r[0] = f.inv(a[0]);
  for (int k = 1; k <= a.order(); ++k) {
    Residue s = 0;
    for (int i = 1; i <= k; ++i) s = f.add(s, f.mul(a[i], r[static_cast<std::size_t>(k - i)]));
    r[static_cast<std::size_t>(k)] = f.neg(f.mul(s, r[0]));
  }
  return {a.prime(), a.order(), std::move(r)};
}

FpMatrix::FpMatrix(std::uint32_t p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {
  (void)PrimeField(p);
}

FpMatrix FpMatrix::from_rows(std::uint32_t p, const std::vector<std::vector<std::int64_t>>& rows) {
  PrimeField f(p);
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  FpMatrix m(p, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = f.reduce(rows[r][c]);
  }
  return m;
}

std::vector<Residue> FpMatrix::apply(std::span<const Residue> x) const {
  if (x.size() != cols_) throw std::invalid_argument("vector length does not match columns");
  std::vector<Residue> out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
      acc = (acc + static_cast<std::uint64_t>(at(r, c)) * x[c]) % p_;
    }
    out[r] = static_cast<Residue>(acc);
  }
  return out;
}

std::vector<std::size_t> row_reduce(const PrimeField& f, std::vector<std::vector<Residue>>& rows) {
  std::vector<std::size_t> pivots;
  if (rows.empty()) return pivots;
  const std::size_t width = rows.front().size();
  std::size_t next = 0;
  for (std::size_t col = 0; col < width && next < rows.size(); ++col) {
    std::size_t sel = next;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[next], rows[sel]);
    const Residue s = f.inv(rows[next][col]);
    for (auto& v : rows[next]) v = f.mul(v, s);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == next || rows[r][col] == 0) continue;
      const Residue factor = rows[r][col];
      for (std::size_t c = col; c < width; ++c) {
        rows[r][c] = f.sub(rows[r][c], f.mul(factor, rows[next][c]));
      }
    }
    pivots.push_back(col);
    ++next;
  }
  rows.resize(next);
  return pivots;
}

LinearSolution solve_linear(const FpMatrix& a, std::span<const Residue> y) {
  if (y.size() != a.rows()) throw std::invalid_argument("right-hand side length mismatch");
  PrimeField f(a.prime());
  const std::size_t n = a.cols();
  std::vector<std::vector<Residue>> aug(a.rows(), std::vector<Residue>(n + 1));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) aug[r][c] = a.at(r, c);
    aug[r][n] = y[r] % a.prime();
  }
  auto pivots = row_reduce(f, aug);

  LinearSolution out;
  bool consistent = true;
  std::vector<char> is_pivot(n, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] == n) {
      consistent = false;
    } else {
      is_pivot[pivots[i]] = 1;
    }
  }
  out.rank = static_cast<std::size_t>(std::count(is_pivot.begin(), is_pivot.end(), 1));
  if (consistent) {
    std::vector<Residue> x(n, 0);
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug[i][n];
    out.particular = std::move(x);
  }
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free] != 0) continue;
    std::vector<Residue> k(n, 0);
    k[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      if (pivots[i] < n) k[pivots[i]] = f.neg(aug[i][free]);
    }
    out.kernel.push_back(std::move(k));
  }
  return out;
}

}  // namespace psd
