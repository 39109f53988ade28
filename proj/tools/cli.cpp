#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>

#include "psd/arith.hpp"
#include "psd/errors.hpp"
#include "psd/model_io.hpp"
#include "psd/mutation.hpp"
#include "psd/report_io.hpp"
#include "selfcheck.hpp"

namespace psd::cli {

namespace {

using nlohmann::json;

json candidate_json(const LevelCandidate& c) {
  return {{"p", c.p},
          {"ell0", c.ell0},
          {"ell1", c.ell1},
          {"cond1", c.cond1},
          {"cond2", c.cond2},
          {"merel_nonzero", c.merel_nonzero},
          {"merel_value", c.merel_value.value()},
          {"tame_at_p", c.tame_at_p},
          {"log_base", c.log_base}};
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string convention(std::uint64_t base) {
  return base == 0 ? "no discrete log (ell0 != 1 mod p)" : fmt::format("log base {} (least primitive root) has log 1", base);
}

void require_prime(std::uint64_t n, const char* what, std::uint64_t minimum = 2) {
  if (n < minimum || !is_prime(n)) {
    throw std::invalid_argument(fmt::format("{} = {} must be a prime >= {}", what, n, minimum));
  }
}

int cmd_scan(std::uint32_t p, std::uint64_t ell0, std::uint64_t max_ell1, unsigned threads, bool as_json,
             std::ostream& out) {
  require_prime(p, "p", 5);
  require_prime(ell0, "l0");
  if (ell0 % p != 1) throw std::invalid_argument(fmt::format("condition (1) fails: {} is not 1 mod {}", ell0, p));
  const auto scan = scan_levels(p, ell0, max_ell1, threads);
  const DiscreteLog log(p, ell0);
  const auto merel = merel_number(log);
  if (as_json) {
    json rows = json::array();
    for (const auto& c : scan) rows.push_back(candidate_json(c));
    out << json{{"p", p},
                {"ell0", ell0},
                {"max_ell1", max_ell1},
                {"log_base", log.base()},
                {"merel_value", merel.value()},
                {"merel_nonzero", !merel.is_zero()},
                {"candidates", std::move(rows)}}
               .dump(2)
        << '\n';
    return kOk;
  }
  fmt::print(out, "p = {}, ell0 = {}, ell1 <= {}\n", p, ell0, max_ell1);
  fmt::print(out, "{}; Merel's number = {} ({})\n", convention(log.base()), merel.value(),
             merel.is_zero() ? "zero" : "nonzero");
  fmt::print(out, "{:>10}  {:>5}  {:>5}  {:>5}  {:>9}\n", "ell1", "cond1", "cond2", "merel", "tame_at_p");
  for (const auto& c : scan) {
    fmt::print(out, "{:>10}  {:>5}  {:>5}  {:>5}  {:>9}\n", c.ell1, yes_no(c.cond1), yes_no(c.cond2),
               yes_no(c.merel_nonzero), yes_no(c.tame_at_p));
  }
  fmt::print(out, "{} candidates\n", scan.size());
  return kOk;
}

int cmd_check(std::uint32_t p, std::uint64_t ell0, std::uint64_t ell1, bool as_json, std::ostream& out) {
  require_prime(p, "p", 5);
  require_prime(ell0, "l0");
  require_prime(ell1, "l1");
  const auto c = check_level(p, ell0, ell1);
  if (as_json) {
    auto j = candidate_json(c);
    j["holds"] = c.holds();
    out << j.dump(2) << '\n';
  } else {
    fmt::print(out, "p = {}, ell0 = {}, ell1 = {}\n", p, ell0, ell1);
    auto row = [&](const char* label, bool value, const std::string& note = {}) {
      fmt::print(out, "  {:<40} {}{}\n", label, yes_no(value), note);
    };
    row("(1) ell0 = 1 mod p", c.cond1);
    row("(2) ell1 != 0, +-1 mod p, p-th power", c.cond2);
    row("(3) Merel's number nonzero", c.merel_nonzero,
        fmt::format(" (value {}; {})", c.merel_value.value(), convention(c.log_base)));
    row("tame at p: ell1^(p-1) = 1 mod p^2", c.tame_at_p);
    fmt::print(out, "all conditions hold: {}\n", yes_no(c.holds()));
  }
  return c.holds() ? kOk : kConditionFailed;
}

int cmd_deform(const std::string& path, bool as_json, std::ostream& out) {
  const auto model = load_model(path);
  const auto ctx = [&] {
    try {
      return make_context(model);
    } catch (const PipelineError& e) {
      throw e.in_stage("make_context");
    }
  }();
  const auto report = main_criterion(ctx);
  if (as_json) {
    out << to_json(report).dump(2) << '\n';
    return kOk;
  }
  auto optional = [](const std::optional<WeightedScalar>& x) { return x ? x->to_string() : std::string("absent"); };
  fmt::print(out, "model: {} ({} elements, p = {})\n", path, model->size(), model->prime());
  fmt::print(out, "a1(Frob_ell1)   = {}\n", WeightedScalar(report.a1_at_ell1, 0).to_string());
  fmt::print(out, "alpha           = {}\n", report.alpha.to_string());
  fmt::print(out, "beta            = {}\n", optional(report.beta));
  fmt::print(out, "alpha^2 + beta  = {}\n", optional(report.alpha_sq_plus_beta));
  fmt::print(out, "dim R/pR > 3    = {}\n", yes_no(report.dim_exceeds_three));
  fmt::print(out, "stage log:\n");
  for (const auto& e : report.stage_log) {
    fmt::print(out, "  [{}] {:<26} {}\n", e.ok ? " ok " : "FAIL", e.stage, e.detail);
  }
  return kOk;
}

int cmd_selfcheck(const std::string& mutation, std::ostream& out) {
  MutationGuard guard(parse_mutation(mutation));
  for (const auto& r : selfcheck::run()) {
    fmt::print(out, "{} {}{}\n", r.passed ? "pass" : "FAIL", r.name, r.detail.empty() ? "" : ": " + r.detail);
    if (!r.passed) {
      fmt::print(out, "selfcheck failed: {}\n", r.name);
      return kConditionFailed;
    }
  }
  fmt::print(out, "selfcheck passed\n");
  return kOk;
}

}  // namespace

int run(std::span<const char* const> argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Second-order pseudodeformation checks for Eisenstein congruences at level ell0 ell1", "pseudodef"};
  app.require_subcommand(1);

  std::uint32_t p = 0;
  std::uint64_t ell0 = 0, ell1 = 0, max_ell1 = 0;
  unsigned threads = 0;
  bool as_json = false;
  std::string model_path, mutation = "none";
  std::function<int()> action;

  auto* scan = app.add_subcommand("scan", "list ell1 <= bound satisfying the level conditions");
  scan->add_option("--p", p, "residue characteristic (prime >= 5)")->required();
  scan->add_option("--l0", ell0, "prime ell0 = 1 mod p")->required();
  scan->add_option("--max-l1", max_ell1, "largest ell1 to test")->required();
  scan->add_option("--threads", threads, "worker threads (0: all cores)");
  scan->add_flag("--json", as_json, "machine-readable output");
  scan->callback([&] { action = [&] { return cmd_scan(p, ell0, max_ell1, threads, as_json, out); }; });

  auto* check = app.add_subcommand("check", "evaluate the level conditions for one ell1");
  check->add_option("--p", p, "residue characteristic (prime >= 5)")->required();
  check->add_option("--l0", ell0, "prime ell0")->required();
  check->add_option("--l1", ell1, "prime ell1")->required();
  check->add_flag("--json", as_json, "machine-readable output");
  check->callback([&] { action = [&] { return cmd_check(p, ell0, ell1, as_json, out); }; });

  auto* deform = app.add_subcommand("deform", "run the deformation pipeline on a model file");
  deform->add_option("--model", model_path, "group-model JSON file")->required();
  deform->add_flag("--json", as_json, "machine-readable output");
  deform->callback([&] { action = [&] { return cmd_deform(model_path, as_json, out); }; });

  auto* self = app.add_subcommand("selfcheck", "run the convention and oracle suites");
  self->add_option("--mutate", mutation)->group("");
  self->callback([&] { action = [&] { return cmd_selfcheck(mutation, out); }; });

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kInputError;
  }

  try {
    return action();
  } catch (const ModelError& e) {
    fmt::print(err, "error: malformed model at {}\n", e.what());
    return kInputError;
  } catch (const PipelineError& e) {
    fmt::print(err, "error: precondition [{}] failed{}: {}\n", e.tag(), e.stage().empty() ? "" : " in " + e.stage(),
               e.message());
    return kPreconditionError;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kInputError;
  }
}

}  // namespace psd::cli
