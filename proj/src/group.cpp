#include "psd/group.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_set>

#include "psd/errors.hpp"

namespace psd {

std::string_view to_string(LocalTag tag) {
  switch (tag) {
    case LocalTag::ell0: return "ell0";
    case LocalTag::ell1: return "ell1";
    case LocalTag::p: return "p";
  }
  return "?";
}

std::optional<LocalTag> parse_local_tag(std::string_view name) {
  for (auto t : kAllLocalTags) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

std::optional<ElemId> LocalData::local_id(ElemId global_id) const {
  if (global_id >= global_to_local_.size() || global_to_local_[global_id] < 0) return std::nullopt;
  return static_cast<ElemId>(global_to_local_[global_id]);
}

bool LocalData::in_inertia(ElemId local_id) const { return inertia_mask_[local_id] != 0; }

namespace {

std::string at(std::string_view base, std::size_t i) {
  return std::string(base) + "/" + std::to_string(i);
}

// Elements reachable from the identity by right multiplication, in BFS order,
// with the tree recorded as (parent, generator index).
struct SpanningTree {
  std::vector<ElemId> order;
  std::vector<ElemId> parent;
  std::vector<std::uint32_t> edge;
};

SpanningTree bfs_tree(std::size_t n, ElemId root, std::size_t k,
                      const std::vector<ElemId>& right) {
  SpanningTree t;
  constexpr auto unseen = static_cast<ElemId>(-1);
  t.parent.assign(n, unseen);
  t.edge.assign(n, 0);
  t.parent[root] = root;
  t.order.push_back(root);
  for (std::size_t head = 0; head < t.order.size(); ++head) {
    const ElemId g = t.order[head];
    for (std::size_t j = 0; j < k; ++j) {
      const ElemId h = right[g * k + j];
      if (t.parent[h] != unseen) continue;
      t.parent[h] = g;
      t.edge[h] = static_cast<std::uint32_t>(j);
      t.order.push_back(h);
    }
  }
  return t;
}

}  // namespace

int GroupModel::normalize_weight(int w) const {
  const int m = weight_modulus_;
  return ((w % m) + m) % m;
}

const LocalData& GroupModel::local(LocalTag tag) const {
  const auto& l = locals_[index(tag)];
  if (!l) throw std::out_of_range("model has no local data for tag '" + std::string(to_string(tag)) + "'");
  return *l;
}

ElemId GroupModel::mul(ElemId g, ElemId h) const {
  if (!dense_.empty()) return dense_[g * size_ + h];
  // Walk the tree word of h starting from g.
  std::uint32_t word[256];
  std::vector<std::uint32_t> long_word;
  std::size_t len = 0;
  for (ElemId x = h; x != identity_; x = parent_[x]) {
    if (len < 256) {
      word[len] = edge_[x];
    } else {
      if (long_word.empty()) long_word.assign(word, word + 256);
      long_word.push_back(edge_[x]);
    }
    ++len;
  }
  ElemId out = g;
  for (std::size_t i = len; i-- > 0;) {
    out = right_mul(out, i < 256 ? word[i] : long_word[i]);
  }
  return out;
}

std::vector<ElemId> GroupModel::generated_subgroup(std::span<const ElemId> gens) const {
  std::vector<char> seen(size_, 0);
  std::vector<ElemId> out{identity_};
  seen[identity_] = 1;
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (ElemId s : gens) {
      const ElemId h = mul(out[head], s);
      if (seen[h] == 0) {
        seen[h] = 1;
        out.push_back(h);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ModelPtr GroupModel::build(const ModelSpec& spec) {
  std::shared_ptr<GroupModel> m(new GroupModel());
  try {
    m->field_ = PrimeField(spec.p);
  } catch (const std::invalid_argument& e) {
    throw ModelError("/p", e.what());
  }
  m->size_ = spec.elements.size();
  if (m->size_ == 0) throw ModelError("/elements", "group must have at least one element");
  {
    std::unordered_set<std::string> names;
    for (std::size_t i = 0; i < spec.elements.size(); ++i) {
      if (!names.insert(spec.elements[i]).second) {
        throw ModelError(at("/elements", i), "duplicate element name '" + spec.elements[i] + "'");
      }
    }
  }
  m->names_ = spec.elements;
  const bool has_dense = !spec.dense.empty();
  if (has_dense == spec.cayley.has_value()) {
    throw ModelError("/mul", "expected either a full table or a generator table");
  }
  if (has_dense) {
    m->init_dense(spec);
  } else {
    m->init_cayley(spec);
  }
  m->init_omega(spec);
  m->init_locals(spec);
  m->init_decls(spec);
  return m;
}

void GroupModel::init_dense(const ModelSpec& spec) {
  const std::size_t n = size_;
  if (n > kDenseLimit) {
    throw ModelError("/mul", "full tables are limited to " + std::to_string(kDenseLimit) +
                                 " elements; use the generator form");
  }
  if (spec.dense.size() != n) throw ModelError("/mul", "table must have one row per element");
  dense_.assign(n * n, 0);
  for (std::size_t g = 0; g < n; ++g) {
    if (spec.dense[g].size() != n) throw ModelError(at("/mul", g), "row length must equal group size");
    std::vector<char> hit(n, 0);
    for (std::size_t h = 0; h < n; ++h) {
      const ElemId v = spec.dense[g][h];
      if (v >= n) throw ModelError(at(at("/mul", g), h), "element index out of range");
      if (hit[v] != 0) throw ModelError(at("/mul", g), "row is not a permutation");
      hit[v] = 1;
      dense_[g * n + h] = v;
    }
  }
  for (std::size_t h = 0; h < n; ++h) {
    std::vector<char> hit(n, 0);
    for (std::size_t g = 0; g < n; ++g) {
      const ElemId v = dense_[g * n + h];
      if (hit[v] != 0) throw ModelError("/mul", "column " + std::to_string(h) + " is not a permutation");
      hit[v] = 1;
    }
  }
  bool found = false;
  for (std::size_t e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (std::size_t g = 0; g < n && ok; ++g) ok = dense_[e * n + g] == g && dense_[g * n + e] == g;
    if (ok) {
      identity_ = static_cast<ElemId>(e);
      found = true;
    }
  }
  if (!found) throw ModelError("/mul", "no identity element");

  // Greedy generating set in index order.
  std::vector<char> in_sub(n, 0);
  in_sub[identity_] = 1;
  std::vector<ElemId> sub{identity_};
  for (std::size_t g = 0; g < n; ++g) {
    if (in_sub[g] != 0) continue;
    generators_.push_back(static_cast<ElemId>(g));
    // Restart from the identity so old elements meet the new generator too.
    for (std::size_t head = 0; head < sub.size(); ++head) {
      for (ElemId s : generators_) {
        const ElemId h = dense_[sub[head] * n + s];
        if (in_sub[h] == 0) {
          in_sub[h] = 1;
          sub.push_back(h);
        }
      }
    }
  }

  // Light's associativity test: it suffices to check generators in the middle.
  for (ElemId s : generators_) {
    for (std::size_t x = 0; x < n; ++x) {
      const ElemId xs = dense_[x * n + s];
      for (std::size_t y = 0; y < n; ++y) {
        if (dense_[xs * n + y] != dense_[x * n + dense_[s * n + y]]) {
          throw ModelError("/mul", "multiplication is not associative at (" + std::to_string(x) + ", " +
                                       std::to_string(s) + ", " + std::to_string(y) + ")");
        }
      }
    }
  }

  const std::size_t k = generators_.size();
  right_.assign(n * k, 0);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t j = 0; j < k; ++j) right_[g * k + j] = dense_[g * n + generators_[j]];
  }
  auto tree = bfs_tree(n, identity_, k, right_);
  parent_ = std::move(tree.parent);
  edge_ = std::move(tree.edge);
  inverse_.assign(n, 0);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t h = 0; h < n; ++h) {
      if (dense_[g * n + h] == identity_) {
        inverse_[g] = static_cast<ElemId>(h);
        break;
      }
    }
  }
}

void GroupModel::init_cayley(const ModelSpec& spec) {
  const std::size_t n = size_;
  const auto& cay = *spec.cayley;
  const std::size_t k = cay.generators.size();
  if (k == 0 && n > 1) throw ModelError("/mul/generators", "a nontrivial group needs generators");
  for (std::size_t j = 0; j < k; ++j) {
    if (cay.generators[j] >= n) throw ModelError(at("/mul/generators", j), "element index out of range");
  }
  if (cay.table.size() != n) throw ModelError("/mul/table", "table must have one row per element");
  identity_ = 0;
  generators_ = cay.generators;
  right_.assign(n * k, 0);
  for (std::size_t g = 0; g < n; ++g) {
    if (cay.table[g].size() != k) throw ModelError(at("/mul/table", g), "row length must equal generator count");
    for (std::size_t j = 0; j < k; ++j) {
      const ElemId v = cay.table[g][j];
      if (v >= n) throw ModelError(at(at("/mul/table", g), j), "element index out of range");
      right_[g * k + j] = v;
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (right_[j] != generators_[j]) {
      throw ModelError(at("/mul/table/0", j), "row 0 must be the identity times each generator");
    }
    std::vector<char> hit(n, 0);
    for (std::size_t g = 0; g < n; ++g) {
      const ElemId v = right_[g * k + j];
      if (hit[v] != 0) throw ModelError("/mul/table", "column " + std::to_string(j) + " is not a permutation");
      hit[v] = 1;
    }
  }
  auto tree = bfs_tree(n, identity_, k, right_);
  if (tree.order.size() != n) throw ModelError("/mul", "generators do not generate every element");
  parent_ = std::move(tree.parent);
  edge_ = std::move(tree.edge);

  // Left multiplication by each generator must be a colour-preserving bijection
  // of the Cayley graph; then the graph is the Cayley graph of a group.
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<ElemId> phi(n, 0);
    phi[identity_] = generators_[i];
    for (std::size_t t = 1; t < tree.order.size(); ++t) {
      const ElemId h = tree.order[t];
      phi[h] = right_[phi[parent_[h]] * k + edge_[h]];
    }
    std::vector<char> hit(n, 0);
    for (std::size_t g = 0; g < n; ++g) {
      if (hit[phi[g]] != 0) throw ModelError("/mul", "generator table does not describe a group");
      hit[phi[g]] = 1;
      for (std::size_t j = 0; j < k; ++j) {
        if (phi[right_[g * k + j]] != right_[phi[g] * k + j]) {
          throw ModelError("/mul", "generator table does not describe a group (left translation by generator " +
                                       std::to_string(i) + " fails at element " + std::to_string(g) + ")");
        }
      }
    }
  }

  // Inverses: generator inverses from their cycles, then along the tree.
  std::vector<ElemId> gen_inv(k, identity_);
  for (std::size_t j = 0; j < k; ++j) {
    ElemId prev = identity_;
    ElemId x = generators_[j];
    while (x != identity_) {
      prev = x;
      x = right_[x * k + j];
    }
    gen_inv[j] = prev;
  }
  inverse_.assign(n, identity_);
  for (std::size_t t = 1; t < tree.order.size(); ++t) {
    const ElemId h = tree.order[t];
    inverse_[h] = mul(gen_inv[edge_[h]], inverse_[parent_[h]]);
  }
}

void GroupModel::init_omega(const ModelSpec& spec) {
  if (spec.omega.size() != size_) throw ModelError("/omega", "expected one value per element");
  omega_.resize(size_);
  for (std::size_t g = 0; g < size_; ++g) {
    omega_[g] = field_.reduce(spec.omega[g]);
    if (omega_[g] == 0) throw ModelError(at("/omega", g), "character values must be nonzero");
  }
  if (omega_[identity_] != 1) throw ModelError(at("/omega", identity_), "character must be 1 at the identity");
  const std::size_t k = generators_.size();
  for (std::size_t g = 0; g < size_; ++g) {
    for (std::size_t j = 0; j < k; ++j) {
      if (omega_[right_[g * k + j]] != field_.mul(omega_[g], omega_[generators_[j]])) {
        throw ModelError("/omega", "character is not a homomorphism at element " + std::to_string(g));
      }
    }
  }
  std::uint32_t m = 1;
  for (ElemId s : generators_) m = std::lcm(m, field_.order(omega_[s]));
  weight_modulus_ = static_cast<int>(m);
  twists_.assign(static_cast<std::size_t>(m) * size_, 1);
  for (std::size_t w = 1; w < m; ++w) {
    for (std::size_t g = 0; g < size_; ++g) {
      twists_[w * size_ + g] = field_.mul(twists_[(w - 1) * size_ + g], omega_[g]);
    }
  }
}

ModelPtr GroupModel::make_subgroup(const std::vector<ElemId>& members, const std::string& field) const {
  const std::size_t m = members.size();
  if (m > kDenseLimit) throw ModelError(field, "local subgroup too large");
  std::vector<std::int64_t> pos(size_, -1);
  for (std::size_t i = 0; i < m; ++i) pos[members[i]] = static_cast<std::int64_t>(i);
  ModelSpec sub;
  sub.p = prime();
  sub.dense.assign(m, std::vector<ElemId>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    sub.elements.push_back(names_[members[i]]);
    sub.omega.push_back(omega_[members[i]]);
    for (std::size_t j = 0; j < m; ++j) {
      const auto prod = pos[mul(members[i], members[j])];
      if (prod < 0) throw ModelError(field, "not closed under multiplication");
      sub.dense[i][j] = static_cast<ElemId>(prod);
    }
  }
  return build(sub);
}

void GroupModel::init_locals(const ModelSpec& spec) {
  for (auto tag : kAllLocalTags) {
    const auto& raw = spec.locals[index(tag)];
    if (!raw) continue;
    const std::string base = "/locals/" + std::string(to_string(tag));
    auto ld = std::make_unique<LocalData>();
    ld->tag = tag;
    ld->global_to_local_.assign(size_, -1);
    if (raw->decomposition.empty()) throw ModelError(base + "/decomposition", "must be nonempty");
    for (std::size_t i = 0; i < raw->decomposition.size(); ++i) {
      const ElemId g = raw->decomposition[i];
      if (g >= size_) throw ModelError(at(base + "/decomposition", i), "element index out of range");
      if (ld->global_to_local_[g] >= 0) throw ModelError(at(base + "/decomposition", i), "duplicate element");
      ld->global_to_local_[g] = static_cast<std::int32_t>(i);
    }
    ld->decomposition = raw->decomposition;
    ld->group = make_subgroup(ld->decomposition, base + "/decomposition");

    ld->inertia_mask_.assign(ld->decomposition.size(), 0);
    for (std::size_t i = 0; i < raw->inertia.size(); ++i) {
      const ElemId g = raw->inertia[i];
      if (g >= size_) throw ModelError(at(base + "/inertia", i), "element index out of range");
      const auto loc = ld->local_id(g);
      if (!loc) throw ModelError(at(base + "/inertia", i), "inertia element outside the decomposition group");
      if (ld->inertia_mask_[*loc] != 0) throw ModelError(at(base + "/inertia", i), "duplicate element");
      ld->inertia_mask_[*loc] = 1;
      ld->inertia.push_back(*loc);
    }
    if (ld->inertia.empty()) throw ModelError(base + "/inertia", "must be nonempty");
    const auto& dg = *ld->group;
    for (ElemId x : ld->inertia) {
      for (ElemId y : ld->inertia) {
        if (!ld->in_inertia(dg.mul(x, y))) throw ModelError(base + "/inertia", "not a subgroup");
      }
      for (std::size_t d = 0; d < dg.size(); ++d) {
        if (!ld->in_inertia(dg.conj(x, static_cast<ElemId>(d)))) {
          throw ModelError(base + "/inertia", "not normal in the decomposition group");
        }
      }
    }
    if (raw->gamma) {
      const auto loc = *raw->gamma < size_ ? ld->local_id(*raw->gamma) : std::nullopt;
      if (!loc || !ld->in_inertia(*loc)) throw ModelError(base + "/gamma", "must lie in the inertia group");
      ld->gamma = *loc;
    } else if (tag != LocalTag::p) {
      throw ModelError(base + "/gamma", "required at this place");
    }
    if (tag != LocalTag::p) {
      for (ElemId x : ld->inertia) {
        if (omega_[ld->global(x)] != 1) throw ModelError(base + "/inertia", "character must be trivial on inertia");
      }
    }
    if (tag == LocalTag::ell0) {
      for (ElemId g : ld->decomposition) {
        if (omega_[g] != 1) throw ModelError(base + "/decomposition", "character must be trivial here");
      }
    }
    locals_[index(tag)] = std::move(ld);
  }
}

void GroupModel::init_decls(const ModelSpec& spec) {
  if (spec.flat) {
    if (!has_local(LocalTag::p)) throw ModelError("/flat", "flat cocycles need local data at p");
    const auto& dp = local(LocalTag::p);
    const auto& dg = *dp.group;
    auto load = [&](const std::vector<std::vector<std::int64_t>>& raw, int weight, const std::string& name) {
      std::vector<std::vector<Residue>> out;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::string field = at("/flat/" + name, i);
        if (raw[i].size() != dg.size()) throw ModelError(field, "expected one value per element of D_p");
        std::vector<Residue> t(raw[i].size());
        for (std::size_t j = 0; j < t.size(); ++j) t[j] = field_.reduce(raw[i][j]);
        for (std::size_t x = 0; x < dg.size(); ++x) {
          for (std::size_t y = 0; y < dg.size(); ++y) {
            const auto xy = dg.mul(static_cast<ElemId>(x), static_cast<ElemId>(y));
            const auto rhs = field_.add(t[x], field_.mul(dg.twist(weight, static_cast<ElemId>(x)), t[y]));
            if (t[xy] != rhs) throw ModelError(field, "not a cocycle of weight " + std::to_string(weight));
          }
        }
        out.push_back(std::move(t));
      }
      return out;
    };
    flat_.weight_1 = load(spec.flat->weight_1, 1, "weight_1");
    flat_.weight_0 = load(spec.flat->weight_0, 0, "weight_0");
  }
  if (spec.pinned) {
    auto load = [&](const std::optional<std::vector<std::int64_t>>& raw, int weight, const char* name)
        -> std::optional<std::vector<Residue>> {
      if (!raw) return std::nullopt;
      const std::string field = std::string("/pinned/") + name;
      if (raw->size() != size_) throw ModelError(field, "expected one value per element");
      std::vector<Residue> t(size_);
      for (std::size_t j = 0; j < size_; ++j) t[j] = field_.reduce((*raw)[j]);
      const std::size_t k = generators_.size();
      if (t[identity_] != 0) throw ModelError(field, "cocycle must vanish at the identity");
      for (std::size_t g = 0; g < size_; ++g) {
        for (std::size_t j = 0; j < k; ++j) {
          const ElemId s = generators_[j];
          const auto rhs = field_.add(t[g], field_.mul(twist(weight, static_cast<ElemId>(g)), t[s]));
          if (t[right_[g * k + j]] != rhs) throw ModelError(field, "not a cocycle of weight " + std::to_string(weight));
        }
      }
      return t;
    };
    pinned_.b1 = load(spec.pinned->b1, 1, "b1");
    pinned_.b0 = load(spec.pinned->b0, 1, "b0");
    pinned_.a0 = load(spec.pinned->a0, 0, "a0");
    pinned_.ap = load(spec.pinned->ap, 0, "ap");
  }
}

}  // namespace psd
