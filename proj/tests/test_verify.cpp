#include "doctest.h"
#include "qfi/errors.hpp"
#include "qfi/verify.hpp"

using namespace qfi;

namespace {

verify::SuiteConfig small() {
  verify::SuiteConfig cfg;
  cfg.channels = 30;
  cfg.multi_channels = 6;
  cfg.directions = 4;
  cfg.seed = 1234;
  return cfg;
}

}  // namespace

TEST_CASE("all suites pass on a small configuration") {
  for (const auto& r : verify::run_suites(verify::Suite::All, small())) {
    CAPTURE(r.name);
    CHECK(r.passed());
    CHECK(r.checks > 0);
  }
}

TEST_CASE("suite results do not depend on execution mode") {
  auto cfg = small();
  cfg.execution = estimation::Execution::Serial;
  const auto serial = verify::run_ordering_suite(cfg);
  cfg.execution = estimation::Execution::Parallel;
  const auto parallel = verify::run_ordering_suite(cfg);
  CHECK(serial.checks == parallel.checks);
  CHECK(serial.worst_ratio == parallel.worst_ratio);
  CHECK(serial.skipped == parallel.skipped);
}

TEST_CASE("suite names") {
  CHECK(verify::parse_suite("directional") == verify::Suite::Directional);
  CHECK(std::string(verify::to_string(verify::Suite::Gap)) == "gap");
  CHECK_THROWS_AS(verify::parse_suite("nonsense"), ValidationError);
}
