#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "psd/gma.hpp"
#include "psd/group.hpp"

namespace psd::fixtures {

// A finite subgroup of the unit group of E_n, closed from a generator list.
// Element 0 is the identity; ids follow breadth-first discovery order.
class GmaGroup {
 public:
  static GmaGroup close(const std::vector<GmaElement>& generators, std::size_t limit = 1u << 20);

  [[nodiscard]] std::uint32_t prime() const { return prime_; }
  [[nodiscard]] std::size_t size() const { return elements_.size(); }
  [[nodiscard]] const GmaElement& element(ElemId id) const { return elements_[id]; }
  [[nodiscard]] ElemId id_of(const GmaElement& x) const;
  [[nodiscard]] const std::vector<ElemId>& generator_ids() const { return generator_ids_; }
  // Sorted ids of the subgroup generated by the given elements.
  [[nodiscard]] std::vector<ElemId> subgroup(const std::vector<GmaElement>& gens) const;

  // Full table when dense, generator table otherwise. omega is the constant
  // term of the upper-left entry.
  [[nodiscard]] ModelSpec tabulate(bool dense) const;

 private:
  [[nodiscard]] std::uint64_t key(const GmaElement& x) const;
  std::uint32_t prime_ = 0;
  std::vector<GmaElement> elements_;
  std::vector<ElemId> generator_ids_;
  std::vector<std::vector<ElemId>> right_;
  std::unordered_map<std::uint64_t, ElemId> index_;
};

// (A, B; C, D) in E_n with D fixed by det = A(0) and D(0) = 1.
GmaElement det_constant_element(std::uint32_t p, int order, std::vector<std::int64_t> a,
                                std::vector<std::int64_t> b, std::vector<std::int64_t> c);

struct SecondOrderGenerators {
  GmaElement g_mu;    // diag(least primitive root, 1), generating D_p
  GmaElement gamma0;  // (1 + alpha eps, beta eps; 1, *), generating D_ell0
  GmaElement gamma1;  // (1, 1; 0, 1), generating I_ell1
};
SecondOrderGenerators second_order_generators(std::uint32_t p, std::int64_t alpha, std::int64_t beta);
// The closure of those generators; element ids match second_order_fixture.
GmaGroup second_order_group(std::uint32_t p, std::int64_t alpha, std::int64_t beta);

// The inclusion of {x in E_2 : d(0) = 1, det x = a(0)} with alpha and beta
// planted on the inertia generator at ell0. Generator-table model.
ModelSpec second_order_fixture(std::uint32_t p, std::int64_t alpha, std::int64_t beta);

enum class FirstOrderVariant {
  // Frobenius at ell1 is diagonal and a^(1) vanishes on D_ell1.
  split_at_ell1,
  // D_ell1 also contains (1 + eps, 0; 0, 1 - eps), so a^(1)(Frob) != 0.
  a1_nonzero_at_ell1,
  // D_p contains a lower unipotent, so c^(1) cannot be a coboundary there.
  no_such_class,
  // The ell0 inertia generator has b^(1) != 0.
  b1_nonzero_at_ell0,
};

// The same construction inside E_1, as a full-table model.
ModelSpec first_order_fixture(std::uint32_t p, std::int64_t alpha, FirstOrderVariant variant);

}  // namespace psd::fixtures
