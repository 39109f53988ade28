#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psd/ring.hpp"

namespace psd {

using ElemId = std::uint32_t;

enum class LocalTag { ell0, ell1, p };
inline constexpr std::array<LocalTag, 3> kAllLocalTags{LocalTag::ell0, LocalTag::ell1, LocalTag::p};
std::string_view to_string(LocalTag tag);
std::optional<LocalTag> parse_local_tag(std::string_view name);

// Raw, unvalidated description of a finite group model. This is what the JSON
// loader produces and what fixture generators emit.
struct ModelSpec {
  struct Cayley {
    std::vector<ElemId> generators;
    // table[g][j] = g * generators[j]; element 0 is the identity.
    std::vector<std::vector<ElemId>> table;
  };
  struct Local {
    std::vector<ElemId> decomposition;
    std::vector<ElemId> inertia;
    std::optional<ElemId> gamma;
  };
  struct Flat {
    // Local 1-cocycle tables on D_p, listed in decomposition order.
    std::vector<std::vector<std::int64_t>> weight_1;
    std::vector<std::vector<std::int64_t>> weight_0;
  };
  struct Pinned {
    std::optional<std::vector<std::int64_t>> b1, b0, a0, ap;
  };

  std::uint32_t p = 0;
  std::vector<std::string> elements;
  // Exactly one of `dense` and `cayley` is used.
  std::vector<std::vector<ElemId>> dense;
  std::optional<Cayley> cayley;
  std::vector<std::int64_t> omega;
  std::array<std::optional<Local>, 3> locals;
  std::optional<Flat> flat;
  std::optional<Pinned> pinned;
};

class GroupModel;
using ModelPtr = std::shared_ptr<const GroupModel>;

// Local data at one place, realized as an embedded subgroup model.
struct LocalData {
  LocalTag tag{};
  // Global ids of D_q; the position in this list is the local id.
  std::vector<ElemId> decomposition;
  // Local ids of I_q and of the distinguished inertia element.
  std::vector<ElemId> inertia;
  std::optional<ElemId> gamma;
  ModelPtr group;

  [[nodiscard]] ElemId global(ElemId local_id) const { return decomposition[local_id]; }
  [[nodiscard]] std::optional<ElemId> local_id(ElemId global_id) const;
  [[nodiscard]] bool in_inertia(ElemId local_id) const;

 private:
  friend class GroupModel;
  std::vector<std::int32_t> global_to_local_;
  std::vector<char> inertia_mask_;
};

struct FlatSpaces {
  std::vector<std::vector<Residue>> weight_1;
  std::vector<std::vector<Residue>> weight_0;
};

struct PinnedTables {
  std::optional<std::vector<Residue>> b1, b0, a0, ap;
};

// An immutable finite group with a character omega into F_p^x, optional local
// subgroups, declared flat cocycles at p and optional pinned cocycles.
// Products are O(1) for dense tables and word walks for Cayley tables.
class GroupModel {
 public:
  // Validates and throws ModelError with a field location on failure.
  static ModelPtr build(const ModelSpec& spec);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::uint32_t prime() const { return field_.prime(); }
  [[nodiscard]] const PrimeField& field() const { return field_; }
  [[nodiscard]] ElemId identity() const { return identity_; }
  [[nodiscard]] bool is_dense() const { return !dense_.empty(); }
  [[nodiscard]] const std::string& name(ElemId g) const { return names_[g]; }

  [[nodiscard]] std::span<const ElemId> generators() const { return generators_; }
  // g * generators()[j]
  [[nodiscard]] ElemId right_mul(ElemId g, std::size_t j) const {
    return right_[g * generators_.size() + j];
  }
  [[nodiscard]] ElemId mul(ElemId g, ElemId h) const;
  [[nodiscard]] ElemId inv(ElemId g) const { return inverse_[g]; }
  [[nodiscard]] ElemId conj(ElemId g, ElemId by) const { return mul(inv(by), mul(g, by)); }

  [[nodiscard]] Residue omega(ElemId g) const { return omega_[g]; }
  // Order of the image of omega; weights are meaningful modulo this.
  [[nodiscard]] int weight_modulus() const { return weight_modulus_; }
  [[nodiscard]] int normalize_weight(int w) const;
  // omega(g)^w
  [[nodiscard]] Residue twist(int w, ElemId g) const {
    return twists_[static_cast<std::size_t>(normalize_weight(w)) * size_ + g];
  }
  [[nodiscard]] bool twist_trivial(int w) const { return normalize_weight(w) == 0; }

  [[nodiscard]] bool has_local(LocalTag tag) const { return locals_[index(tag)] != nullptr; }
  // Throws std::out_of_range for an absent tag.
  [[nodiscard]] const LocalData& local(LocalTag tag) const;
  [[nodiscard]] const FlatSpaces& flat() const { return flat_; }
  [[nodiscard]] const PinnedTables& pinned() const { return pinned_; }

  // The subgroup generated by the given elements, as a sorted id list.
  [[nodiscard]] std::vector<ElemId> generated_subgroup(std::span<const ElemId> gens) const;

 private:
  GroupModel() : field_(3) {}
  static std::size_t index(LocalTag t) { return static_cast<std::size_t>(t); }
  void init_dense(const ModelSpec& spec);
  void init_cayley(const ModelSpec& spec);
  void init_omega(const ModelSpec& spec);
  void init_locals(const ModelSpec& spec);
  void init_decls(const ModelSpec& spec);
  ModelPtr make_subgroup(const std::vector<ElemId>& members, const std::string& field) const;

  PrimeField field_;
  std::size_t size_ = 0;
  ElemId identity_ = 0;
  std::vector<std::string> names_;
  std::vector<ElemId> dense_;
  std::vector<ElemId> generators_;
  std::vector<ElemId> right_;
  // Spanning tree of the right Cayley graph: h = parent_[h] * generators_[edge_[h]].
  std::vector<ElemId> parent_;
  std::vector<std::uint32_t> edge_;
  std::vector<ElemId> inverse_;
  std::vector<Residue> omega_;
  int weight_modulus_ = 1;
  std::vector<Residue> twists_;
  std::array<std::unique_ptr<LocalData>, 3> locals_;
  FlatSpaces flat_;
  PinnedTables pinned_;
};

// Largest group handled with a full multiplication table.
inline constexpr std::size_t kDenseLimit = 4096;

}  // namespace psd
