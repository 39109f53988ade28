#include "psd/arith.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <thread>

namespace psd {

namespace {

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_log_setting(std::uint32_t p, std::uint64_t ell0) {
  require(p >= 3 && is_prime(p), std::to_string(p) + " is not an odd prime");
  require(is_prime(ell0), std::to_string(ell0) + " is not prime");
  require(ell0 % p == 1, std::to_string(ell0) + " is not 1 mod " + std::to_string(p));
}

bool residue_ok(std::uint64_t ell1, std::uint32_t p) {
  const auto r = ell1 % p;
  return r != 0 && r != 1 && r != p - 1;
}

}  // namespace

bool is_primitive_root(std::uint64_t g, std::uint64_t ell) {
  require(is_prime(ell), std::to_string(ell) + " is not prime");
  g %= ell;
  if (g == 0) return false;
  for (auto q : prime_factors(ell - 1)) {
    if (powmod64(g, (ell - 1) / q, ell) == 1) return false;
  }
  return true;
}

std::uint64_t least_primitive_root(std::uint64_t ell) {
  require(is_prime(ell), std::to_string(ell) + " is not prime");
  const auto factors = prime_factors(ell - 1);
  for (std::uint64_t g = 1;; ++g) {
    if (std::all_of(factors.begin(), factors.end(), [&](auto q) { return powmod64(g, (ell - 1) / q, ell) != 1; })) {
      return g;
    }
  }
}

DiscreteLog::DiscreteLog(std::uint32_t p, std::uint64_t ell0, std::optional<std::uint64_t> base)
    : p_(p), ell0_(ell0), base_(0), cofactor_(0) {
  require_log_setting(p, ell0);
  base_ = base ? *base % ell0 : least_primitive_root(ell0);
  require(is_primitive_root(base_, ell0), std::to_string(base_) + " is not a primitive root mod " + std::to_string(ell0));
  cofactor_ = (ell0 - 1) / p;
  // x^cofactor lies in the order-p subgroup generated by base^cofactor, and
  // its exponent there is the index of x mod p.
  const auto h = powmod64(base_, cofactor_, ell0);
  for (std::uint32_t k = 0; k < p; ++k) roots_.emplace(powmod64(h, k, ell0), k);
}

FpElement DiscreteLog::operator()(std::uint64_t x) const {
  require(x % ell0_ != 0, "log of 0 mod " + std::to_string(ell0_));
  return {p_, roots_.at(powmod64(x, cofactor_, ell0_))};
}

FpElement discrete_log(std::uint64_t x, std::uint32_t p, std::uint64_t ell0) { return DiscreteLog(p, ell0)(x); }

FpElement merel_number(const DiscreteLog& log) {
  FpElement sum(log.prime(), 0);
  for (std::uint64_t i = 1; i <= (log.ell0() - 1) / 2; ++i) {
    sum += FpElement(log.prime(), static_cast<std::int64_t>(i % log.prime())) * log(i);
  }
  return sum;
}

FpElement merel_number(std::uint32_t p, std::uint64_t ell0) { return merel_number(DiscreteLog(p, ell0)); }

bool is_pth_power(std::uint64_t ell1, std::uint32_t p, std::uint64_t ell0) {
  require_log_setting(p, ell0);
  require(ell1 % ell0 != 0, std::to_string(ell1) + " is 0 mod " + std::to_string(ell0));
  return powmod64(ell1, (ell0 - 1) / p, ell0) == 1;
}

bool tame_at_p(std::uint64_t ell, std::uint32_t p) {
  require(p >= 3 && is_prime(p), std::to_string(p) + " is not an odd prime");
  require(ell % p != 0, std::to_string(ell) + " is 0 mod " + std::to_string(p));
  const std::uint64_t p2 = static_cast<std::uint64_t>(p) * p;
  return powmod64(ell, p - 1, p2) == 1;
}

namespace {

LevelCandidate candidate(const DiscreteLog* log, const FpElement& merel, std::uint32_t p, std::uint64_t ell0,
                         std::uint64_t ell1) {
  LevelCandidate c{p, ell0, ell1, log != nullptr, false, !merel.is_zero(), false, merel, log ? log->base() : 0};
  // Without cond1, p does not divide ell0 - 1 and every unit is a p-th power.
  c.cond2 = residue_ok(ell1, p) && (!log || is_pth_power(ell1, p, ell0));
  c.tame_at_p = ell1 % p != 0 && tame_at_p(ell1, p);
  return c;
}

}  // namespace

LevelCandidate check_level(std::uint32_t p, std::uint64_t ell0, std::uint64_t ell1) {
  require(p >= 5 && is_prime(p), "p must be a prime >= 5, got " + std::to_string(p));
  require(is_prime(ell0), "ell0 = " + std::to_string(ell0) + " is not prime");
  require(is_prime(ell1), "ell1 = " + std::to_string(ell1) + " is not prime");
  require(ell1 != ell0, "ell1 must differ from ell0");
  if (ell0 % p != 1) return candidate(nullptr, FpElement(p, 0), p, ell0, ell1);
  const DiscreteLog log(p, ell0);
  return candidate(&log, merel_number(log), p, ell0, ell1);
}

std::vector<LevelCandidate> scan_levels(std::uint32_t p, std::uint64_t ell0, std::uint64_t max_ell1,
                                        unsigned threads) {
  require(p >= 5 && is_prime(p), "p must be a prime >= 5, got " + std::to_string(p));
  const DiscreteLog log(p, ell0);
  const auto merel = merel_number(log);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  const std::uint64_t span = max_ell1 < 2 ? 0 : max_ell1 - 1;
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(span / 4096, 1, threads));

  std::vector<std::vector<LevelCandidate>> parts(threads);
  auto work = [&](unsigned t) {
    const std::uint64_t lo = 2 + span * t / threads;
    const std::uint64_t hi = 2 + span * (t + 1) / threads;
    for (std::uint64_t ell1 = lo; ell1 < hi; ++ell1) {
      if (ell1 == ell0 || !residue_ok(ell1, p) || !is_prime(ell1)) continue;
      if (!is_pth_power(ell1, p, ell0)) continue;
      parts[t].push_back(candidate(&log, merel, p, ell0, ell1));
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
  }
  std::vector<LevelCandidate> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

}  // namespace psd
