#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "ssr/errors.hpp"
#include "ssr/io.hpp"

namespace {

int exit_code(ssr::ErrorKind k) {
  using ssr::ErrorKind;
  switch (k) {
    case ErrorKind::Validation:
    case ErrorKind::NonPrime:
    case ErrorKind::ZeroPolynomial:
    case ErrorKind::CharacteristicDividesExponent:
      return 2;
    case ErrorKind::CatalogExhausted:
      return 3;
    case ErrorKind::PrecisionExhausted:
    case ErrorKind::PrecisionTooLow:
      return 4;
    default:
      return 5;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semistable reduction, local L-factor and conductor exponent of y^n = f(x) at p"};
  std::string input, tower;
  std::int64_t precision = 0;
  int max_cyclotomic = ssr::CatalogBounds{}.max_cyclotomic;
  int max_degree = ssr::CatalogBounds{}.max_degree;
  bool json = false, trace = false;
  app.add_option("input", input, "curve input (JSON: {\"n\", \"f\", \"p\"})")->required()->check(CLI::ExistingFile);
  app.add_option("--precision", precision, "pi-adic working precision (default 50 e, at least 8)");
  app.add_option("--max-cyclotomic", max_cyclotomic, "largest m with zeta_m tried by the catalog search")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-degree", max_degree, "largest catalog field degree")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--field-tower", tower, "explicit field tower (JSON) instead of the catalog search")
      ->check(CLI::ExistingFile);
  app.add_flag("--json", json, "print the JSON report");
  app.add_flag("--trace", trace, "print timing to stderr");
  CLI11_PARSE(app, argc, argv);

  auto t0 = std::chrono::steady_clock::now();
  try {
    ssr::PipelineOptions opt;
    if (app.count("--precision")) {
      if (precision < 8) ssr::fail(ssr::ErrorKind::Validation, "cli", "precision must be at least 8");
      opt.precision = precision;
    }
    opt.bounds.max_cyclotomic = max_cyclotomic;
    opt.bounds.max_degree = max_degree;
    if (!tower.empty()) opt.tower = ssr::load_tower(tower);
    auto curve = ssr::load_curve(input);
    auto R = ssr::run_pipeline(curve, opt);
    if (json)
      std::cout << ssr::json_report(R).dump(2) << "\n";
    else
      std::cout << ssr::text_report(R);
    if (trace) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << "field " << R.field << ", " << ms << " ms\n";
    }
    return 0;
  } catch (const ssr::Error& e) {
    if (json) {
      nlohmann::ordered_json err{{"error", ssr::error_kind_name(e.kind())}, {"module", e.module()}, {"message", e.what()}};
      std::cout << err.dump(2) << "\n";
    }
    std::cerr << "error [" << e.module() << "] " << ssr::error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [internal] " << e.what() << "\n";
    return 5;
  }
}
