#pragma once

#include <string_view>

namespace psd {

// Deliberate faults that the selfcheck suites must detect. Only test harnesses
// activate these; production code paths read the flag and otherwise ignore it.
enum class Mutation { none, drop_eps_shift, flip_cup_sign };

Mutation active_mutation();
Mutation parse_mutation(std::string_view name);

class MutationGuard {
 public:
  explicit MutationGuard(Mutation m);
  ~MutationGuard();
  MutationGuard(const MutationGuard&) = delete;
  MutationGuard& operator=(const MutationGuard&) = delete;

 private:
  Mutation previous_;
};

}  // namespace psd
