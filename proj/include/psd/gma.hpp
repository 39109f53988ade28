#pragma once

#include <optional>
#include <string>

#include "psd/ring.hpp"

namespace psd {

// A 2x2 generalized matrix algebra element over F_p[eps_n] whose off-diagonal
// entries have order n-1 (the 1-reducible algebra E_n) or order n (the target of
// tensor reduction). Cross-diagonal products always pick up a factor of eps.
// E_0 has no off-diagonal entries.
class GmaElement {
 public:
  // Element of E_n.
  GmaElement(TruncatedPoly a, TruncatedPoly b, TruncatedPoly c, TruncatedPoly d);
  // Diagonal element of E_0.
  GmaElement(TruncatedPoly a, TruncatedPoly d);

  static GmaElement identity(std::uint32_t p, int order);
  static GmaElement zero(std::uint32_t p, int order);
  static GmaElement scalar(const TruncatedPoly& s);
  static GmaElement from_ints(std::uint32_t p, int order, std::int64_t a, std::int64_t b,
                              std::int64_t c, std::int64_t d);

  [[nodiscard]] std::uint32_t prime() const { return a_.prime(); }
  [[nodiscard]] int order() const { return a_.order(); }
  // Order of b and c; -1 when they are absent.
  [[nodiscard]] int off_order() const { return b_ ? b_->order() : -1; }
  [[nodiscard]] bool has_off_diagonal() const { return b_.has_value(); }

  [[nodiscard]] const TruncatedPoly& a() const { return a_; }
  [[nodiscard]] const TruncatedPoly& d() const { return d_; }
  [[nodiscard]] const TruncatedPoly& b() const;
  [[nodiscard]] const TruncatedPoly& c() const;

  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] GmaElement scaled(const TruncatedPoly& s) const;

  GmaElement& operator+=(const GmaElement& o);
  GmaElement& operator-=(const GmaElement& o);
  friend GmaElement operator+(GmaElement x, const GmaElement& y) { return x += y; }
  friend GmaElement operator-(GmaElement x, const GmaElement& y) { return x -= y; }
  friend GmaElement operator*(const GmaElement& x, const GmaElement& y);
  friend bool operator==(const GmaElement&, const GmaElement&) = default;

  [[nodiscard]] std::string to_string() const;

 private:
  void require_same_shape(const GmaElement& o) const;
  TruncatedPoly a_;
  std::optional<TruncatedPoly> b_;
  std::optional<TruncatedPoly> c_;
  TruncatedPoly d_;
};

struct PseudoRepValue {
  TruncatedPoly trace;
  TruncatedPoly det;
  friend bool operator==(const PseudoRepValue&, const PseudoRepValue&) = default;
};

GmaElement gma_mul(const GmaElement& x, const GmaElement& y);
GmaElement gma_invert(const GmaElement& x);
PseudoRepValue psi(const GmaElement& x);
bool cayley_hamilton_check(const GmaElement& x);
bool us_product_check(const GmaElement& rho_sigma, const TruncatedPoly& kappa_sigma,
                      const GmaElement& rho_tau);

// r_{n,m}: truncates diagonals to order m and off-diagonals to order m-1.
GmaElement reduce(const GmaElement& x, int m);
// E_n -> E_n (x) F_p[eps_m] for m < n: every coordinate truncated to order m.
GmaElement tensor_reduce(const GmaElement& x, int m);
// From the tensor-reduced algebra to E_m by dropping the top off-diagonal term.
GmaElement off_diagonal_reduce(const GmaElement& x);

// Ordinary 2x2 matrix over a truncated polynomial ring.
struct PolyMatrix2 {
  TruncatedPoly e00, e01, e10, e11;
  static PolyMatrix2 identity(std::uint32_t p, int order);
  friend PolyMatrix2 operator*(const PolyMatrix2& x, const PolyMatrix2& y);
  friend bool operator==(const PolyMatrix2&, const PolyMatrix2&) = default;
};

// Upper-triangular elements only: (a, eps*b; 0, d).
PolyMatrix2 ut_embed(const GmaElement& x);
// (a mod eps^n, b; eps*c, d mod eps^n) over F_p[eps_{n-1}].
PolyMatrix2 matrix_reduce(const GmaElement& x);

}  // namespace psd
