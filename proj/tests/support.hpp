#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "psd/gma.hpp"
#include "psd/ring.hpp"

namespace psd::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine{0x5eed'2024ULL};
  return engine;
}

inline Residue random_residue(std::uint32_t p) {
  return static_cast<Residue>(std::uniform_int_distribution<std::uint32_t>(0, p - 1)(rng()));
}

inline TruncatedPoly random_poly(std::uint32_t p, int order) {
  std::vector<Residue> c(static_cast<std::size_t>(order) + 1);
  for (auto& x : c) x = random_residue(p);
  return {p, order, std::move(c)};
}

inline TruncatedPoly poly(std::uint32_t p, std::initializer_list<std::int64_t> coeffs) {
  std::vector<std::int64_t> v(coeffs);
  return TruncatedPoly::from_ints(p, static_cast<int>(v.size()) - 1, v);
}

// A random E_2 unit with constant determinant a0 and d(0) = 1.
inline GmaElement random_conjugator(std::uint32_t p, Residue a0) {
  const PrimeField f(p);
  auto r = [&] { return random_residue(p); };
  const TruncatedPoly a(p, 2, {a0, r(), r()});
  const TruncatedPoly b(p, 1, {r(), r()});
  const TruncatedPoly c(p, 1, {r(), r()});
  // d = (a0 + eps b c) / a solves a d - eps b c = a0.
  const auto d = (TruncatedPoly::constant(p, 2, a0) + (b * c).shift_up()) * poly_invert(a);
  return {a, b, c, d.scaled(f.inv(d[0]))};
}

}  // namespace psd::testing
