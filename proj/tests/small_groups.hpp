#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "psd/group.hpp"

namespace psd::testing {

using Word = std::vector<int>;
using Op = std::function<Word(const Word&, const Word&)>;

// Closes `gens` under `op` starting from `one`, then tabulates the group.
// `omega` maps each element to an integer character value.
inline ModelSpec closure_model(std::uint32_t p, const Word& one, const std::vector<Word>& gens, const Op& op,
                               const std::function<std::int64_t(const Word&)>& omega) {
  std::vector<Word> elems{one};
  std::map<Word, ElemId> index{{one, 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : gens) {
      auto h = op(elems[head], g);
      if (index.emplace(h, static_cast<ElemId>(elems.size())).second) elems.push_back(h);
    }
  }
  ModelSpec spec;
  spec.p = p;
  const std::size_t n = elems.size();
  spec.dense.assign(n, std::vector<ElemId>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::string name = "g";
    for (int v : elems[i]) name += "_" + std::to_string(v);
    spec.elements.push_back(name);
    spec.omega.push_back(omega(elems[i]));
    for (std::size_t j = 0; j < n; ++j) spec.dense[i][j] = index.at(op(elems[i], elems[j]));
  }
  return spec;
}

inline Op add_mod(std::vector<int> moduli) {
  return [moduli](const Word& a, const Word& b) {
    Word c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = (a[i] + b[i]) % moduli[i];
    return c;
  };
}

// Composition of permutations: (a*b)(x) = a(b(x)).
inline Word compose(const Word& a, const Word& b) {
  Word c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[static_cast<std::size_t>(b[i])];
  return c;
}

inline std::int64_t perm_sign(const Word& a) {
  int inv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) inv += a[i] > a[j] ? 1 : 0;
  }
  return inv % 2 == 0 ? 1 : -1;
}

// 2x2 matrices over F_3 stored row-major.
inline Word mat3(const Word& a, const Word& b) {
  return {(a[0] * b[0] + a[1] * b[2]) % 3, (a[0] * b[1] + a[1] * b[3]) % 3, (a[2] * b[0] + a[3] * b[2]) % 3,
          (a[2] * b[1] + a[3] * b[3]) % 3};
}

struct NamedSpec {
  std::string name;
  ModelSpec spec;
};

// Every group of order at most 8 used by the oracle suites, over F_3, each
// with a trivial and (where one exists) a nontrivial quadratic character.
inline std::vector<NamedSpec> small_groups_p3() {
  std::vector<NamedSpec> out;
  auto trivial = [](const Word&) -> std::int64_t { return 1; };
  auto first_parity = [](const Word& w) -> std::int64_t { return w[0] % 2 == 0 ? 1 : -1; };
  for (int n : {1, 2, 3, 4, 5, 6, 7, 8}) {
    out.push_back({"Z" + std::to_string(n), closure_model(3, {0}, {{1 % n}}, add_mod({n}), trivial)});
    if (n % 2 == 0) {
      out.push_back({"Z" + std::to_string(n) + "-sign", closure_model(3, {0}, {{1}}, add_mod({n}), first_parity)});
    }
  }
  out.push_back({"Z2xZ2", closure_model(3, {0, 0}, {{1, 0}, {0, 1}}, add_mod({2, 2}), first_parity)});
  out.push_back({"Z2xZ4", closure_model(3, {0, 0}, {{1, 0}, {0, 1}}, add_mod({2, 4}),
                                        [](const Word& w) -> std::int64_t { return w[1] % 2 == 0 ? 1 : -1; })});
  out.push_back({"Z2^3", closure_model(3, {0, 0, 0}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, add_mod({2, 2, 2}),
                                       first_parity)});
  out.push_back({"S3", closure_model(3, {0, 1, 2}, {{1, 2, 0}, {1, 0, 2}}, compose, perm_sign)});
  out.push_back({"S3-trivial", closure_model(3, {0, 1, 2}, {{1, 2, 0}, {1, 0, 2}}, compose, trivial)});
  out.push_back({"D4", closure_model(3, {0, 1, 2, 3}, {{1, 2, 3, 0}, {0, 3, 2, 1}}, compose, perm_sign)});
  out.push_back({"Q8", closure_model(3, {1, 0, 0, 1}, {{0, 1, 2, 0}, {1, 1, 1, 2}}, mat3, [](const Word& w) -> std::int64_t {
                   // Trivial exactly on the cyclic subgroup generated by (0,1;2,0).
                   const bool diag_zero = w[0] == 0 && w[3] == 0;
                   const bool scalar = w[1] == 0 && w[2] == 0;
                   return diag_zero || scalar ? 1 : -1;
                 })});
  return out;
}

}  // namespace psd::testing
