#include <doctest.h>

#include "psd/gma.hpp"
#include "psd/mutation.hpp"
#include "support.hpp"

using namespace psd;
using psd::testing::poly;
using psd::testing::random_poly;

namespace {

GmaElement random_gma(std::uint32_t p, int n) {
  if (n == 0) return {random_poly(p, 0), random_poly(p, 0)};
  return {random_poly(p, n), random_poly(p, n - 1), random_poly(p, n - 1), random_poly(p, n)};
}

TruncatedPoly lift(const TruncatedPoly& x, int order) {
  TruncatedPoly out(x.prime(), order);
  for (int k = 0; k <= x.order(); ++k) out.set(k, x[k]);
  return out;
}

// Independent model of E_n inside M_2(F_p[eps_n]): (a, eps*b; c, d) with c
// meaningful only modulo eps^n.
PolyMatrix2 embed(const GmaElement& x) {
  const int n = x.order();
  return {x.a(), lift(x.b(), n).shift_up().truncate(n), lift(x.c(), n), x.d()};
}

bool matches_embedding(const GmaElement& x, const PolyMatrix2& m) {
  const int n = x.order();
  return x.a() == m.e00 && x.d() == m.e11 && lift(x.b(), n).shift_up().truncate(n) == m.e01 &&
         x.c() == m.e10.truncate(n - 1);
}

// All elements of E_1 over F_3.
std::vector<GmaElement> all_e1_mod3() {
  std::vector<GmaElement> out;
  for (int code = 0; code < 729; ++code) {
    int v = code;
    auto next = [&v] { int r = v % 3; v /= 3; return r; };
    auto a0 = next(), a1 = next(), b = next(), c = next(), d0 = next(), d1 = next();
    out.emplace_back(poly(3, {a0, a1}), poly(3, {b}), poly(3, {c}), poly(3, {d0, d1}));
  }
  return out;
}

}  // namespace

TEST_CASE("order-1 product has the expected top-left coordinate") {
  for (int rep = 0; rep < 200; ++rep) {
    auto x = random_gma(7, 1);
    auto y = random_gma(7, 1);
    auto z = x * y;
    PrimeField f(7);
    CHECK(z.a()[0] == f.mul(x.a()[0], y.a()[0]));
    CHECK(z.a()[1] ==
          f.add(f.add(f.mul(x.a()[1], y.a()[0]), f.mul(x.a()[0], y.a()[1])), f.mul(x.b()[0], y.c()[0])));
  }
}

TEST_CASE("gma_mul basic examples") {
  auto x = random_gma(5, 2);
  CHECK(GmaElement::identity(5, 2) * x == x);
  CHECK(x * GmaElement::identity(5, 2) == x);
  auto upper = GmaElement::from_ints(5, 1, 0, 1, 0, 0);
  auto lower = GmaElement::from_ints(5, 1, 0, 0, 1, 0);
  CHECK(upper * lower == GmaElement(poly(5, {0, 1}), poly(5, {0}), poly(5, {0}), poly(5, {0, 0})));
  CHECK_THROWS(random_gma(5, 1) * random_gma(5, 2));
}

TEST_CASE("gma_invert examples") {
  CHECK(gma_invert(GmaElement::identity(5, 2)) == GmaElement::identity(5, 2));
  CHECK(gma_invert(GmaElement::from_ints(5, 2, 2, 0, 0, 1)) == GmaElement::from_ints(5, 2, 3, 0, 0, 1));
  for (std::int64_t b0 = 0; b0 < 5; ++b0) {
    auto m = GmaElement::from_ints(5, 2, 1, b0, 0, 1);
    auto minv = gma_invert(m);
    CHECK(minv == GmaElement::from_ints(5, 2, 1, -b0, 0, 1));
    CHECK(m * minv == GmaElement::identity(5, 2));
    CHECK(minv * m == GmaElement::identity(5, 2));
  }
  CHECK_THROWS_AS(gma_invert(GmaElement::from_ints(5, 1, 0, 1, 1, 0)), NotInvertible);
  for (int rep = 0; rep < 500; ++rep) {
    auto x = random_gma(5, 2);
    if (!psi(x).det.is_unit()) continue;
    auto xi = gma_invert(x);
    CHECK(x * xi == GmaElement::identity(5, 2));
    CHECK(xi * x == GmaElement::identity(5, 2));
  }
}

TEST_CASE("psi examples") {
  auto id = psi(GmaElement::identity(5, 1));
  CHECK(id.trace == poly(5, {2, 0}));
  CHECK(id.det == poly(5, {1, 0}));
  auto v = psi(GmaElement::from_ints(5, 1, 0, 1, 1, 0));
  CHECK(v.trace == poly(5, {0, 0}));
  CHECK(v.det == poly(5, {0, -1}));
}

TEST_CASE("gma_mul agrees with the matrix model and is associative") {
  int failures = 0;
  int cases = 0;
  for (std::uint32_t p : {3U, 5U}) {
    for (int n : {1, 2}) {
      for (int rep = 0; rep < 2600; ++rep) {
        auto x = random_gma(p, n);
        auto y = random_gma(p, n);
        auto z = random_gma(p, n);
        failures += matches_embedding(x * y, embed(x) * embed(y)) ? 0 : 1;
        failures += ((x * y) * z == x * (y * z)) ? 0 : 1;
        failures += (psi(x * y).det == psi(x).det * psi(y).det) ? 0 : 1;
        failures += cayley_hamilton_check(x) ? 0 : 1;
        failures += (reduce(x * y, n - 1) == reduce(x, n - 1) * reduce(y, n - 1)) ? 0 : 1;
        ++cases;
      }
    }
  }
  CHECK(cases >= 10000);
  CHECK(failures == 0);
}

TEST_CASE("Cayley-Hamilton holds on all of E_1 over F_3") {
  int failures = 0;
  for (const auto& x : all_e1_mod3()) failures += cayley_hamilton_check(x) ? 0 : 1;
  CHECK(failures == 0);
  CHECK(cayley_hamilton_check(GmaElement::identity(3, 0)));
}

TEST_CASE("dropping the eps shift breaks Cayley-Hamilton") {
  auto x = GmaElement::from_ints(5, 1, 0, 1, 1, 0);
  CHECK(cayley_hamilton_check(x));
  MutationGuard guard(Mutation::drop_eps_shift);
  CHECK_FALSE(cayley_hamilton_check(x));
}

TEST_CASE("us_product_check examples") {
  const auto one = TruncatedPoly::constant(5, 1, 1);
  // Steinberg shapes (0,*;0,*)+kappa and (*,*;0,0)+1.
  auto sigma = GmaElement(poly(5, {1, 0}), poly(5, {3}), poly(5, {0}), poly(5, {2, 4}));
  auto tau = GmaElement(poly(5, {3, 1}), poly(5, {2}), poly(5, {0}), poly(5, {1, 0}));
  CHECK(us_product_check(sigma, one, tau));
  CHECK(us_product_check(random_gma(5, 1), one, GmaElement::identity(5, 1)));

  auto bad = GmaElement(poly(5, {2, 0}), poly(5, {0}), poly(5, {1}), poly(5, {1, 0}));
  CHECK_FALSE(us_product_check(bad, one, bad));

  // Enumeration: with nonzero b on the left and c on the right the eps*b*c term
  // survives in the diagonal.
  bool found = false;
  for (const auto& x : all_e1_mod3()) {
    auto k = TruncatedPoly::constant(3, 1, 1);
    auto xs = x - GmaElement::scalar(k);
    if (xs.a().is_zero() && xs.d().is_zero() && xs.c().is_zero() && !xs.b().is_zero()) {
      auto t = GmaElement(poly(3, {1, 0}), poly(3, {0}), poly(3, {1}), poly(3, {1, 0}));
      if (!us_product_check(x, k, t)) found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("reduction maps") {
  auto x = GmaElement(poly(5, {1, 2, 3}), poly(5, {4, 1}), poly(5, {2, 2}), poly(5, {3, 0, 1}));
  auto r = reduce(x, 1);
  CHECK(r == GmaElement(poly(5, {1, 2}), poly(5, {4}), poly(5, {2}), poly(5, {3, 0})));
  CHECK(reduce(x, 2) == x);
  auto r0 = reduce(x, 0);
  CHECK_FALSE(r0.has_off_diagonal());
  CHECK(r0.a() == poly(5, {1}));
  CHECK(r0.d() == poly(5, {3}));
  CHECK_THROWS(reduce(r, 2));

  int failures = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    auto y = random_gma(3, 2);
    auto z = random_gma(3, 2);
    failures += off_diagonal_reduce(tensor_reduce(y, 1)) == reduce(y, 1) ? 0 : 1;
    failures += tensor_reduce(y * z, 1) == tensor_reduce(y, 1) * tensor_reduce(z, 1) ? 0 : 1;
    failures += cayley_hamilton_check(tensor_reduce(y, 1)) ? 0 : 1;
  }
  CHECK(failures == 0);
}

TEST_CASE("ut_embed is multiplicative on upper-triangular E_1 over F_3") {
  CHECK(ut_embed(GmaElement::identity(3, 1)) == PolyMatrix2::identity(3, 1));
  auto u = GmaElement(poly(5, {1, 0}), poly(5, {2}), poly(5, {0}), poly(5, {1, 0}));
  CHECK(ut_embed(u) == PolyMatrix2{poly(5, {1, 0}), poly(5, {0, 2}), poly(5, {0, 0}), poly(5, {1, 0})});
  CHECK_THROWS(ut_embed(GmaElement::from_ints(5, 1, 1, 0, 1, 1)));

  std::vector<GmaElement> upper;
  for (const auto& x : all_e1_mod3()) {
    if (x.c().is_zero()) upper.push_back(x);
  }
  REQUIRE(upper.size() == 243);
  int failures = 0;
  for (const auto& x : upper) {
    for (const auto& y : upper) failures += ut_embed(x * y) == ut_embed(x) * ut_embed(y) ? 0 : 1;
  }
  CHECK(failures == 0);
}

TEST_CASE("matrix_reduce is multiplicative") {
  CHECK(matrix_reduce(GmaElement::identity(3, 2)) == PolyMatrix2::identity(3, 1));
  int failures = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    auto x = random_gma(3, 2);
    auto y = random_gma(3, 2);
    failures += matrix_reduce(x * y) == matrix_reduce(x) * matrix_reduce(y) ? 0 : 1;
  }
  CHECK(failures == 0);
  CHECK_THROWS(matrix_reduce(GmaElement::identity(3, 0)));
}
