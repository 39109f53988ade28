#include "psd/weighted.hpp"

#include <stdexcept>

namespace psd {

namespace {

void require_same_weight(const WeightedScalar& x, const WeightedScalar& y) {
  if (x.weight() != y.weight()) {
    throw std::invalid_argument("adding scalars of weights " + std::to_string(x.weight()) + " and " +
                                std::to_string(y.weight()));
  }
}

}  // namespace

WeightedScalar operator+(const WeightedScalar& x, const WeightedScalar& y) {
  require_same_weight(x, y);
  return {x.value() + y.value(), x.weight()};
}

WeightedScalar operator-(const WeightedScalar& x, const WeightedScalar& y) {
  require_same_weight(x, y);
  return {x.value() - y.value(), x.weight()};
}

WeightedScalar operator*(const WeightedScalar& x, const WeightedScalar& y) {
  return {x.value() * y.value(), x.weight() + y.weight()};
}

std::string WeightedScalar::to_string() const {
  return std::to_string(value_.value()) + " (weight " + std::to_string(weight_) + ")";
}

}  // namespace psd
