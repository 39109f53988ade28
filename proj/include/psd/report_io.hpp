#pragma once

#include <json.hpp>

#include "psd/deform.hpp"

namespace psd {

// {"p", "a1_at_ell1", "alpha", "beta", "alpha_sq_plus_beta",
//  "dim_exceeds_three", "stage_log"}. Weighted scalars are {"value", "weight"}
// and absent ones are null. parse_report throws ModelError on bad input.
nlohmann::json to_json(const CriterionReport& report);
CriterionReport parse_report(const nlohmann::json& j);

}  // namespace psd
