#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace psd {

using Residue = std::uint32_t;

// Deterministic for every 64-bit input.
bool is_prime(std::uint64_t n);
// a^e mod m without overflow, for m >= 1.
std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m);

class ModulusMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Arithmetic helpers for a fixed odd prime. Residues are plain integers in [0, p).
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p);

  [[nodiscard]] std::uint32_t prime() const { return p_; }
  [[nodiscard]] Residue reduce(std::int64_t v) const;
  [[nodiscard]] Residue add(Residue a, Residue b) const {
    Residue s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  [[nodiscard]] Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + p_ - b; }
  [[nodiscard]] Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
  [[nodiscard]] Residue mul(Residue a, Residue b) const {
    return static_cast<Residue>((static_cast<std::uint64_t>(a) * b) % p_);
  }
  [[nodiscard]] Residue pow(Residue a, std::int64_t e) const;
  [[nodiscard]] Residue inv(Residue a) const;
  // Multiplicative order of a nonzero residue.
  [[nodiscard]] std::uint32_t order(Residue a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint32_t p_;
};

class FpElement {
 public:
  FpElement(std::uint32_t p, std::int64_t v);

  [[nodiscard]] Residue value() const { return value_; }
  [[nodiscard]] std::uint32_t prime() const { return p_; }
  [[nodiscard]] bool is_zero() const { return value_ == 0; }
  [[nodiscard]] FpElement inverse() const;

  FpElement& operator+=(const FpElement& o);
  FpElement& operator-=(const FpElement& o);
  FpElement& operator*=(const FpElement& o);
  friend FpElement operator+(FpElement a, const FpElement& b) { return a += b; }
  friend FpElement operator-(FpElement a, const FpElement& b) { return a -= b; }
  friend FpElement operator*(FpElement a, const FpElement& b) { return a *= b; }
  friend FpElement operator/(const FpElement& a, const FpElement& b) { return a * b.inverse(); }
  FpElement operator-() const { return FpElement(p_, -static_cast<std::int64_t>(value_)); }
  friend bool operator==(const FpElement&, const FpElement&) = default;

 private:
  void require_same(const FpElement& o) const;
  std::uint32_t p_;
  Residue value_;
};

// Element of F_p[eps]/(eps^(order+1)).
class TruncatedPoly {
 public:
  TruncatedPoly(std::uint32_t p, int order);
  TruncatedPoly(std::uint32_t p, int order, std::vector<Residue> coeffs);
  static TruncatedPoly constant(std::uint32_t p, int order, std::int64_t c);
  static TruncatedPoly from_ints(std::uint32_t p, int order, std::span<const std::int64_t> coeffs);

  [[nodiscard]] std::uint32_t prime() const { return p_; }
  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] Residue operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] std::span<const Residue> coeffs() const { return coeffs_; }
  void set(int k, Residue v);
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_unit() const { return coeffs_[0] != 0; }

  // Reduction modulo eps^(m+1).
  [[nodiscard]] TruncatedPoly truncate(int m) const;
  // Multiplication by eps into the ring of order order()+1.
  [[nodiscard]] TruncatedPoly shift_up() const;
  [[nodiscard]] TruncatedPoly scaled(Residue s) const;

  TruncatedPoly& operator+=(const TruncatedPoly& o);
  TruncatedPoly& operator-=(const TruncatedPoly& o);
  friend TruncatedPoly operator+(TruncatedPoly a, const TruncatedPoly& b) { return a += b; }
  friend TruncatedPoly operator-(TruncatedPoly a, const TruncatedPoly& b) { return a -= b; }
  friend TruncatedPoly operator*(const TruncatedPoly& a, const TruncatedPoly& b);
  TruncatedPoly operator-() const;
  friend bool operator==(const TruncatedPoly&, const TruncatedPoly&) = default;

  [[nodiscard]] std::string to_string() const;

 private:
  void require_same(const TruncatedPoly& o) const;
  std::uint32_t p_;
  int order_;
  std::vector<Residue> coeffs_;
};

TruncatedPoly poly_mul(const TruncatedPoly& a, const TruncatedPoly& b);
TruncatedPoly poly_invert(const TruncatedPoly& a);

class FpMatrix {
 public:
  FpMatrix(std::uint32_t p, std::size_t rows, std::size_t cols);
  static FpMatrix from_rows(std::uint32_t p, const std::vector<std::vector<std::int64_t>>& rows);

  [[nodiscard]] std::uint32_t prime() const { return p_; }
  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] Residue at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Residue& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  [[nodiscard]] std::span<const Residue> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::vector<Residue> apply(std::span<const Residue> x) const;

 private:
  std::uint32_t p_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Residue> data_;
};

struct LinearSolution {
  // Absent when the system is inconsistent.
  std::optional<std::vector<Residue>> particular;
  // One null-space vector per free column, with a 1 in that column.
  std::vector<std::vector<Residue>> kernel;
  std::size_t rank = 0;
};

// Smallest-index pivoting; free variables are zero in the particular solution.
LinearSolution solve_linear(const FpMatrix& a, std::span<const Residue> y);

// In-place reduced row echelon form of a list of equal-length vectors.
// Zero rows are dropped; returns the pivot column of each surviving row.
std::vector<std::size_t> row_reduce(const PrimeField& f, std::vector<std::vector<Residue>>& rows);

}  // namespace psd
