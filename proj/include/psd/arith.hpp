#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "psd/ring.hpp"

namespace psd {

// Level primes are 64-bit; primitive roots are found by trial-division
// factoring of ell - 1, so very large inputs are slow rather than wrong.
bool is_primitive_root(std::uint64_t g, std::uint64_t ell);
std::uint64_t least_primitive_root(std::uint64_t ell);

// log: F_ell0^x -> F_p, the index with respect to `base` reduced mod p. The
// default base is the least primitive root, so log(base) = 1.
class DiscreteLog {
 public:
  DiscreteLog(std::uint32_t p, std::uint64_t ell0, std::optional<std::uint64_t> base = std::nullopt);

  [[nodiscard]] std::uint32_t prime() const { return p_; }
  [[nodiscard]] std::uint64_t ell0() const { return ell0_; }
  [[nodiscard]] std::uint64_t base() const { return base_; }
  [[nodiscard]] FpElement operator()(std::uint64_t x) const;

 private:
  std::uint32_t p_;
  std::uint64_t ell0_;
  std::uint64_t base_;
  std::uint64_t cofactor_;  // (ell0 - 1) / p
  // base^(cofactor k) -> k for k in [0, p).
  std::unordered_map<std::uint64_t, std::uint32_t> roots_;
};

FpElement discrete_log(std::uint64_t x, std::uint32_t p, std::uint64_t ell0);

// sum_{i=1}^{(ell0-1)/2} i log(i) in F_p.
FpElement merel_number(const DiscreteLog& log);
FpElement merel_number(std::uint32_t p, std::uint64_t ell0);

// ell1^((ell0-1)/p) == 1 mod ell0. Needs ell0 = 1 mod p and ell1 != 0 mod ell0.
bool is_pth_power(std::uint64_t ell1, std::uint32_t p, std::uint64_t ell0);

// ell^(p-1) == 1 mod p^2. Needs ell != 0 mod p.
bool tame_at_p(std::uint64_t ell, std::uint32_t p);

struct LevelCandidate {
  std::uint32_t p = 0;
  std::uint64_t ell0 = 0;
  std::uint64_t ell1 = 0;
  bool cond1 = false;  // ell0 = 1 mod p
  bool cond2 = false;  // ell1 != 0, +-1 mod p and a p-th power mod ell0
  bool merel_nonzero = false;
  bool tame_at_p = false;
  FpElement merel_value;
  std::uint64_t log_base = 0;  // 0 when cond1 fails and no log exists

  // All three level conditions; tameness is informational.
  [[nodiscard]] bool holds() const { return cond1 && cond2 && merel_nonzero; }
  friend bool operator==(const LevelCandidate&, const LevelCandidate&) = default;
};

// Requires p >= 5 and all three inputs prime with ell1 != ell0. A failed
// cond1 is reported, not thrown.
LevelCandidate check_level(std::uint32_t p, std::uint64_t ell0, std::uint64_t ell1);

// Every prime ell1 <= max_ell1 with cond2, in increasing order. Requires
// cond1. The range is split across `threads` workers (0 picks the hardware
// concurrency) and merged in order, so the output does not depend on it.
std::vector<LevelCandidate> scan_levels(std::uint32_t p, std::uint64_t ell0, std::uint64_t max_ell1,
                                        unsigned threads = 0);

}  // namespace psd
