#include "psd/mutation.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace psd {

namespace {
std::atomic<Mutation> g_mutation{Mutation::none};
}

Mutation active_mutation() { return g_mutation.load(std::memory_order_relaxed); }

Mutation parse_mutation(std::string_view name) {
  if (name == "none") return Mutation::none;
  if (name == "drop-eps-shift") return Mutation::drop_eps_shift;
  if (name == "flip-cup-sign") return Mutation::flip_cup_sign;
  throw std::invalid_argument("unknown mutation '" + std::string(name) + "'");
}

MutationGuard::MutationGuard(Mutation m) : previous_(g_mutation.exchange(m)) {}

MutationGuard::~MutationGuard() { g_mutation.store(previous_); }

}  // namespace psd
