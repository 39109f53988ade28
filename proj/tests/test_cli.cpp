#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixture_gen.hpp"
#include "psd/deform.hpp"
#include "psd/model_io.hpp"
#include "psd/report_io.hpp"

using namespace psd;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pseudodef");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(argv, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(PSD_FIXTURE_DIR) + "/" + name + ".json"; }

std::filesystem::path scratch_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST_CASE("scan lists every level of both published lists") {
  const auto start = std::chrono::steady_clock::now();
  const auto r = invoke({"scan", "--p", "5", "--l0", "11", "--max-l1", "1024", "--json"});
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["merel_value"] == 4);
  CHECK(j["log_base"] == 2);
  std::set<std::uint64_t> found;
  for (const auto& c : j["candidates"]) {
    CHECK(c["cond1"] == true);
    CHECK(c["cond2"] == true);
    CHECK(c["merel_nonzero"] == true);
    found.insert(c["ell1"].get<std::uint64_t>());
  }
  for (std::uint64_t ell1 : {23, 67, 263, 307, 373, 397, 593, 857, 967, 1013, 43, 197, 683, 727}) {
    CAPTURE(ell1);
    CHECK(found.count(ell1) == 1);
  }
  CHECK(found.count(19) == 0);

  const auto human = invoke({"scan", "--p", "5", "--l0", "11", "--max-l1", "1024"});
  CHECK(human.code == cli::kOk);
  CHECK(human.out.find("1013") != std::string::npos);
  CHECK(human.out.find("least primitive root") != std::string::npos);
}

TEST_CASE("scan arguments") {
  const auto bad = invoke({"scan", "--p", "5", "--l0", "13", "--max-l1", "100"});
  CHECK(bad.code == cli::kInputError);
  CHECK(bad.err.find("13") != std::string::npos);
  CHECK(invoke({"scan", "--p", "4", "--l0", "11", "--max-l1", "100"}).code == cli::kInputError);
  CHECK(invoke({"scan", "--p", "5", "--l0", "11"}).code == cli::kInputError);
  CHECK(invoke({"scan", "--p", "five", "--l0", "11", "--max-l1", "9"}).code == cli::kInputError);

  const auto short_scan = invoke({"scan", "--p", "5", "--l0", "11", "--max-l1", "22", "--json"});
  REQUIRE(short_scan.code == cli::kOk);
  const auto short_json = json::parse(short_scan.out);
  CHECK(short_json["candidates"].empty());
  const auto with_23 = json::parse(invoke({"scan", "--p", "5", "--l0", "11", "--max-l1", "23", "--json"}).out);
  REQUIRE(with_23["candidates"].size() == 1);
  CHECK(with_23["candidates"][0]["ell1"] == 23);
}

TEST_CASE("check reports each condition") {
  const auto ok = invoke({"check", "--p", "5", "--l0", "11", "--l1", "23", "--json"});
  CHECK(ok.code == cli::kOk);
  const auto j = json::parse(ok.out);
  CHECK(j["cond1"] == true);
  CHECK(j["cond2"] == true);
  CHECK(j["merel_nonzero"] == true);
  CHECK(j["holds"] == true);

  const auto nineteen = invoke({"check", "--p", "5", "--l0", "11", "--l1", "19", "--json"});
  CHECK(nineteen.code == cli::kConditionFailed);
  CHECK(json::parse(nineteen.out)["cond2"] == false);

  const auto seven = invoke({"check", "--p", "5", "--l0", "11", "--l1", "7", "--json"});
  CHECK(seven.code == cli::kConditionFailed);
  CHECK(json::parse(seven.out)["cond2"] == false);
  CHECK(json::parse(seven.out)["tame_at_p"] == true);

  CHECK(invoke({"check", "--p", "5", "--l0", "13", "--l1", "23"}).code == cli::kConditionFailed);
  CHECK(invoke({"check", "--p", "5", "--l0", "11", "--l1", "21"}).code == cli::kInputError);
  CHECK(invoke({"check", "--p", "5", "--l0", "11", "--l1", "11"}).code == cli::kInputError);
  CHECK(invoke({"check", "--p", "5", "--l0", "11"}).code == cli::kInputError);

  const auto human = invoke({"check", "--p", "5", "--l0", "11", "--l1", "23"});
  CHECK(human.out.find("all conditions hold: yes") != std::string::npos);
}

TEST_CASE("bundled fixtures match the generator") {
  using V = fixtures::FirstOrderVariant;
  CHECK(to_json(load_model_spec(fixture("alpha2_beta_zero"))) == to_json(fixtures::second_order_fixture(5, 2, 1)));
  CHECK(to_json(load_model_spec(fixture("alpha2_beta3"))) == to_json(fixtures::second_order_fixture(5, 2, 3)));
  CHECK(to_json(load_model_spec(fixture("a1_nonzero_at_l1"))) ==
        to_json(fixtures::first_order_fixture(5, 2, V::a1_nonzero_at_ell1)));
  CHECK(to_json(load_model_spec(fixture("no_such_class"))) == to_json(fixtures::first_order_fixture(5, 2, V::no_such_class)));
  CHECK(to_json(load_model_spec(fixture("b1_nonzero_at_ell0"))) ==
        to_json(fixtures::first_order_fixture(5, 2, V::b1_nonzero_at_ell0)));
}

TEST_CASE("deform on the bundled fixtures") {
  const auto zero = invoke({"deform", "--model", fixture("alpha2_beta_zero"), "--json"});
  REQUIRE(zero.code == cli::kOk);
  const auto report = parse_report(json::parse(zero.out));
  CHECK(report.dim_exceeds_three);
  CHECK(report.alpha.residue() == 2);
  REQUIRE(report.alpha_sq_plus_beta);
  CHECK(report.alpha_sq_plus_beta->is_zero());
  // Emitted JSON parses back to the same report the library computes.
  CHECK(report == main_criterion(make_context(load_model(fixture("alpha2_beta_zero")))));
  CHECK(to_json(report).dump(2) + "\n" == zero.out);

  const auto nonzero = invoke({"deform", "--model", fixture("alpha2_beta3"), "--json"});
  REQUIRE(nonzero.code == cli::kOk);
  CHECK(json::parse(nonzero.out)["dim_exceeds_three"] == false);
  CHECK(json::parse(nonzero.out)["beta"]["value"] == 3);

  const auto a1 = invoke({"deform", "--model", fixture("a1_nonzero_at_l1"), "--json"});
  REQUIRE(a1.code == cli::kOk);
  const auto j = json::parse(a1.out);
  CHECK(j["beta"].is_null());
  CHECK(j["dim_exceeds_three"] == false);
  CHECK(j["a1_at_ell1"] != 0);

  const auto human = invoke({"deform", "--model", fixture("a1_nonzero_at_l1")});
  CHECK(human.code == cli::kOk);
  CHECK(human.out.find("alpha           = 2 (weight 1)") != std::string::npos);
  CHECK(human.out.find("beta            = absent") != std::string::npos);
}

TEST_CASE("deform error contract") {
  const auto no_class = invoke({"deform", "--model", fixture("no_such_class")});
  CHECK(no_class.code == cli::kPreconditionError);
  CHECK(no_class.err.find("[no such class]") != std::string::npos);
  const auto b1 = invoke({"deform", "--model", fixture("b1_nonzero_at_ell0")});
  CHECK(b1.code == cli::kPreconditionError);
  CHECK(b1.err.find("[ell1-pth-power]") != std::string::npos);
  CHECK(b1.err.find("build_a1") != std::string::npos);

  std::ifstream in(fixture("a1_nonzero_at_l1"));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto truncated = scratch_file("psd_truncated.json", text.substr(0, text.size() / 2));
  CHECK(invoke({"deform", "--model", truncated.string()}).code == cli::kInputError);

  auto j = json::parse(text);
  j["colour"] = "blue";
  const auto unknown = scratch_file("psd_unknown_field.json", j.dump());
  const auto r = invoke({"deform", "--model", unknown.string()});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("colour") != std::string::npos);

  j = json::parse(text);
  j["omega"][3] = 0;
  const auto bad_omega = scratch_file("psd_bad_omega.json", j.dump());
  CHECK(invoke({"deform", "--model", bad_omega.string()}).code == cli::kInputError);

  CHECK(invoke({"deform", "--model", "/nonexistent/model.json"}).code == cli::kInputError);
  CHECK(invoke({"deform"}).code == cli::kInputError);
  for (const auto& f : {truncated, unknown, bad_omega}) std::filesystem::remove(f);
}

TEST_CASE("selfcheck and its mutations") {
  const auto start = std::chrono::steady_clock::now();
  const auto clean = invoke({"selfcheck"});
  CHECK(clean.code == cli::kOk);
  CHECK(clean.out.find("selfcheck passed") != std::string::npos);

  const auto eps = invoke({"selfcheck", "--mutate", "drop-eps-shift"});
  CHECK(eps.code == cli::kConditionFailed);
  CHECK(eps.out.find("selfcheck failed: cayley-hamilton") != std::string::npos);

  const auto cup = invoke({"selfcheck", "--mutate", "flip-cup-sign"});
  CHECK(cup.code == cli::kConditionFailed);
  CHECK(cup.out.find("selfcheck failed: D1-homomorphism") != std::string::npos);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));

  CHECK(invoke({"selfcheck", "--mutate", "bogus"}).code == cli::kInputError);
  // The mutation is scoped to one invocation.
  CHECK(invoke({"selfcheck"}).code == cli::kOk);
}

TEST_CASE("usage") {
  CHECK(invoke({}).code == cli::kInputError);
  CHECK(invoke({"frobnicate"}).code == cli::kInputError);
  const auto help = invoke({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("selfcheck") != std::string::npos);
  CHECK(help.out.find("mutate") == std::string::npos);
}
