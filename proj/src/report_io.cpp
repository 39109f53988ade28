#include "psd/report_io.hpp"

#include "psd/errors.hpp"

namespace psd {

using nlohmann::json;

namespace {

json scalar(const WeightedScalar& x) { return {{"value", x.residue()}, {"weight", x.weight()}}; }

json optional_scalar(const std::optional<WeightedScalar>& x) { return x ? scalar(*x) : json(nullptr); }

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ModelError(where + "/" + key, "missing");
  return j.at(key);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ModelError(where + "/" + key, e.what());
  }
}

WeightedScalar parse_scalar(const json& j, std::uint32_t p, const std::string& where) {
  return {FpElement(p, get<std::int64_t>(j, "value", where)), get<int>(j, "weight", where)};
}

std::optional<WeightedScalar> parse_optional(const json& j, const std::string& key, std::uint32_t p) {
  const auto& v = field(j, key, "");
  if (v.is_null()) return std::nullopt;
  return parse_scalar(v, p, "/" + key);
}

}  // namespace

json to_json(const CriterionReport& report) {
  json log = json::array();
  for (const auto& e : report.stage_log) log.push_back({{"stage", e.stage}, {"ok", e.ok}, {"detail", e.detail}});
  return {{"p", report.alpha.value().prime()},
          {"a1_at_ell1", report.a1_at_ell1.value()},
          {"alpha", scalar(report.alpha)},
          {"beta", optional_scalar(report.beta)},
          {"alpha_sq_plus_beta", optional_scalar(report.alpha_sq_plus_beta)},
          {"dim_exceeds_three", report.dim_exceeds_three},
          {"stage_log", std::move(log)}};
}

CriterionReport parse_report(const json& j) {
  const auto p = get<std::uint32_t>(j, "p", "");
  if (!is_prime(p) || p == 2) throw ModelError("/p", "not an odd prime");
  CriterionReport out{FpElement(p, get<std::int64_t>(j, "a1_at_ell1", "")),
                      parse_scalar(field(j, "alpha", ""), p, "/alpha"),
                      parse_optional(j, "beta", p),
                      parse_optional(j, "alpha_sq_plus_beta", p),
                      get<bool>(j, "dim_exceeds_three", ""),
                      {}};
  const auto& log = field(j, "stage_log", "");
  if (!log.is_array()) throw ModelError("/stage_log", "expected an array");
  for (std::size_t i = 0; i < log.size(); ++i) {
    const std::string where = "/stage_log/" + std::to_string(i);
    out.stage_log.push_back(
        {get<std::string>(log[i], "stage", where), get<bool>(log[i], "ok", where), get<std::string>(log[i], "detail", where)});
  }
  return out;
}

}  // namespace psd
