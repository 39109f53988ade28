// Writes the bundled model files under the given directory (default: fixtures).

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fixture_gen.hpp"
#include "psd/model_io.hpp"

namespace {

void write(const std::filesystem::path& dir, const std::string& name, const psd::ModelSpec& spec) {
  const auto path = dir / (name + ".json");
  std::ofstream out(path);
  out << psd::to_json(spec).dump() << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using psd::fixtures::FirstOrderVariant;
  using psd::fixtures::first_order_fixture;
  using psd::fixtures::second_order_fixture;
  try {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
    std::filesystem::create_directories(dir);
    // alpha = 2, beta = 1: alpha^2 + beta vanishes mod 5.
    write(dir, "alpha2_beta_zero", second_order_fixture(5, 2, 1));
    write(dir, "alpha2_beta3", second_order_fixture(5, 2, 3));
    write(dir, "a1_nonzero_at_l1", first_order_fixture(5, 2, FirstOrderVariant::a1_nonzero_at_ell1));
    write(dir, "no_such_class", first_order_fixture(5, 2, FirstOrderVariant::no_such_class));
    write(dir, "b1_nonzero_at_ell0", first_order_fixture(5, 2, FirstOrderVariant::b1_nonzero_at_ell0));
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
