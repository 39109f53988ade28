#include "psd/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "psd/errors.hpp"

namespace psd {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required) {
  if (!j.is_object()) throw ModelError(where.empty() ? "/" : where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (ok.count(key) == 0) throw ModelError(where + "/" + key, "unknown field");
  }
  for (const char* key : required) {
    if (!j.contains(key)) throw ModelError(where + "/" + key, "missing required field");
  }
}

std::int64_t as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ModelError(where, "expected an integer");
  return j.get<std::int64_t>();
}

ElemId as_index(const json& j, const std::string& where) {
  auto v = as_int(j, where);
  if (v < 0 || v > static_cast<std::int64_t>(UINT32_MAX)) throw ModelError(where, "expected an element index");
  return static_cast<ElemId>(v);
}

const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ModelError(where, "expected an array");
  return j;
}

std::vector<std::int64_t> int_list(const json& j, const std::string& where) {
  std::vector<std::int64_t> out;
  const auto& arr = as_array(j, where);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_int(arr[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<ElemId> index_list(const json& j, const std::string& where) {
  std::vector<ElemId> out;
  const auto& arr = as_array(j, where);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_index(arr[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<std::vector<ElemId>> index_table(const json& j, const std::string& where) {
  std::vector<std::vector<ElemId>> out;
  const auto& arr = as_array(j, where);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(index_list(arr[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<std::vector<std::int64_t>> int_table(const json& j, const std::string& where) {
  std::vector<std::vector<std::int64_t>> out;
  const auto& arr = as_array(j, where);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(int_list(arr[i], where + "/" + std::to_string(i)));
  return out;
}

}  // namespace

ModelSpec parse_model_spec(const json& j) {
  require_keys(j, "", {"p", "elements", "mul", "omega", "locals", "flat", "pinned"},
               {"p", "elements", "mul", "omega"});
  ModelSpec spec;
  const auto p = as_int(j["p"], "/p");
  if (p <= 0 || p > static_cast<std::int64_t>(UINT32_MAX)) throw ModelError("/p", "expected a positive prime");
  spec.p = static_cast<std::uint32_t>(p);

  const auto& elems = as_array(j["elements"], "/elements");
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (!elems[i].is_string()) throw ModelError("/elements/" + std::to_string(i), "expected a string");
    spec.elements.push_back(elems[i].get<std::string>());
  }

  const auto& mul = j["mul"];
  if (mul.is_array()) {
    spec.dense = index_table(mul, "/mul");
    if (spec.dense.empty()) throw ModelError("/mul", "table must not be empty");
  } else if (mul.is_object()) {
    require_keys(mul, "/mul", {"generators", "table"}, {"generators", "table"});
    ModelSpec::Cayley cay;
    cay.generators = index_list(mul["generators"], "/mul/generators");
    cay.table = index_table(mul["table"], "/mul/table");
    spec.cayley = std::move(cay);
  } else {
    throw ModelError("/mul", "expected a table or a {generators, table} object");
  }

  spec.omega = int_list(j["omega"], "/omega");

  if (j.contains("locals")) {
    const auto& loc = j["locals"];
    require_keys(loc, "/locals", {"ell0", "ell1", "p"}, {});
    for (const auto& [key, value] : loc.items()) {
      const auto tag = *parse_local_tag(key);
      const std::string base = "/locals/" + key;
      require_keys(value, base, {"decomposition", "inertia", "gamma"}, {"decomposition", "inertia"});
      ModelSpec::Local l;
      l.decomposition = index_list(value["decomposition"], base + "/decomposition");
      l.inertia = index_list(value["inertia"], base + "/inertia");
      if (value.contains("gamma")) l.gamma = as_index(value["gamma"], base + "/gamma");
      spec.locals[static_cast<std::size_t>(tag)] = std::move(l);
    }
  }

  if (j.contains("flat")) {
    const auto& fl = j["flat"];
    require_keys(fl, "/flat", {"weight_1", "weight_0"}, {});
    ModelSpec::Flat flat;
    if (fl.contains("weight_1")) flat.weight_1 = int_table(fl["weight_1"], "/flat/weight_1");
    if (fl.contains("weight_0")) flat.weight_0 = int_table(fl["weight_0"], "/flat/weight_0");
    spec.flat = std::move(flat);
  }

  if (j.contains("pinned")) {
    const auto& pn = j["pinned"];
    require_keys(pn, "/pinned", {"b1", "b0", "a0", "ap"}, {});
    ModelSpec::Pinned pinned;
    if (pn.contains("b1")) pinned.b1 = int_list(pn["b1"], "/pinned/b1");
    if (pn.contains("b0")) pinned.b0 = int_list(pn["b0"], "/pinned/b0");
    if (pn.contains("a0")) pinned.a0 = int_list(pn["a0"], "/pinned/a0");
    if (pn.contains("ap")) pinned.ap = int_list(pn["ap"], "/pinned/ap");
    spec.pinned = std::move(pinned);
  }
  return spec;
}

json to_json(const ModelSpec& spec) {
  json j;
  j["p"] = spec.p;
  j["elements"] = spec.elements;
  if (spec.cayley) {
    j["mul"] = {{"generators", spec.cayley->generators}, {"table", spec.cayley->table}};
  } else {
    j["mul"] = spec.dense;
  }
  j["omega"] = spec.omega;
  json locals = json::object();
  for (auto tag : kAllLocalTags) {
    const auto& l = spec.locals[static_cast<std::size_t>(tag)];
    if (!l) continue;
    json lj = {{"decomposition", l->decomposition}, {"inertia", l->inertia}};
    if (l->gamma) lj["gamma"] = *l->gamma;
    locals[std::string(to_string(tag))] = std::move(lj);
  }
  if (!locals.empty()) j["locals"] = std::move(locals);
  if (spec.flat) j["flat"] = {{"weight_1", spec.flat->weight_1}, {"weight_0", spec.flat->weight_0}};
  if (spec.pinned) {
    json pj = json::object();
    if (spec.pinned->b1) pj["b1"] = *spec.pinned->b1;
    if (spec.pinned->b0) pj["b0"] = *spec.pinned->b0;
    if (spec.pinned->a0) pj["a0"] = *spec.pinned->a0;
    if (spec.pinned->ap) pj["ap"] = *spec.pinned->ap;
    j["pinned"] = std::move(pj);
  }
  return j;
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("(file)", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("(file)", std::string("invalid JSON: ") + e.what());
  }
  return parse_model_spec(j);
}

ModelPtr load_model(const std::filesystem::path& path) { return GroupModel::build(load_model_spec(path)); }

}  // namespace psd
