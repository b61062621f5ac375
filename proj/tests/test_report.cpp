#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "qfi/errors.hpp"
#include "qfi/report.hpp"

using namespace qfi;

TEST_CASE("doubles print in shortest round-trip form") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(report::format_double(x)) == x);
  }
  CHECK(report::format_double(0.1) == "0.1");
}

TEST_CASE("report documents round-trip through JSON text") {
  const auto r = bounds::one_parameter_report(builtin("amplitude-damping"), {0.3}, {});
  ChannelSpec spec;
  spec.name = "ad";
  spec.family = "amplitude-damping";
  const auto doc = report::document("report", spec, report::to_json(r));
  const std::string text = report::dump(doc);
  const auto parsed = report::Json::parse(text);
  CHECK(parsed == doc);
  CHECK(report::dump(parsed) == text);
  CHECK(parsed["version"] == report::kToolVersion);
  CHECK(parsed["result"]["sld"].get<double>() == r.sld);
}

TEST_CASE("non-finite numbers are refused") {
  report::Json doc{{"a", {1.0, std::numeric_limits<double>::quiet_NaN()}}};
  CHECK_THROWS_AS(report::require_finite(doc), NumericError);
  CHECK_NOTHROW(report::require_finite(report::Json{{"a", 1.0}}));
}

TEST_CASE("sweeps keep going past failing points") {
  const ParametricChannel ch = builtin("dephasing");
  // theta = 0 leaves no room for the stencil
  const auto rows = report::sweep(ch, {0.0, 0.25}, {}, {}, 1e-6);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].sld.has_value());
  CHECK_FALSE(rows[0].warnings.empty());
  CHECK(*rows[1].sld == doctest::Approx(1.0 / (0.25 * 0.75)));
  CHECK_THROWS_AS(report::sweep(ch, {0.5, 2.0}, {}, {}, 1e-6), ValidationError);
}

TEST_CASE("sweep CSV has a header and one line per point") {
  const auto rows = report::sweep(builtin("dephasing"), {0.2, 0.4, 0.6}, {}, {}, 1e-6);
  const std::string csv = report::sweep_csv(rows);
  CHECK(csv.rfind("theta,fisher,sld,sm,gap,residual,attainable,warnings\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
