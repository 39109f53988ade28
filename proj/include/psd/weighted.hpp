#pragma once

#include <string>

#include "psd/ring.hpp"

namespace psd {

// An element of F_p(w). The Tate twist only changes bookkeeping, so the value
// is a plain residue and the weight travels alongside it.
class WeightedScalar {
 public:
  WeightedScalar(FpElement value, int weight) : value_(value), weight_(weight) {}
  static WeightedScalar zero(std::uint32_t p, int weight) { return {FpElement(p, 0), weight}; }

  [[nodiscard]] const FpElement& value() const { return value_; }
  [[nodiscard]] Residue residue() const { return value_.value(); }
  [[nodiscard]] int weight() const { return weight_; }
  [[nodiscard]] bool is_zero() const { return value_.is_zero(); }

  // Sums need equal weights; products add them.
  friend WeightedScalar operator+(const WeightedScalar& x, const WeightedScalar& y);
  friend WeightedScalar operator-(const WeightedScalar& x, const WeightedScalar& y);
  friend WeightedScalar operator*(const WeightedScalar& x, const WeightedScalar& y);
  friend bool operator==(const WeightedScalar&, const WeightedScalar&) = default;

  // "value (weight w)"
  [[nodiscard]] std::string to_string() const;

 private:
  FpElement value_;
  int weight_;
};

}  // namespace psd
