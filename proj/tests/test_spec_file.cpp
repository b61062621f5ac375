#include <filesystem>
#include <string>

#include "doctest.h"
#include "qfi/errors.hpp"
#include "qfi/spec_file.hpp"

using namespace qfi;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_channel_spec(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a full Kraus spec parses") {
  const auto spec = parse_channel_spec(
      "# comment\n"
      "name = tilted dephasing\n"
      "family = dephasing\n"
      "theta_domain = [0.1, 0.9]\n"
      "input_state = [0.6, 0.8i]   # trailing comment\n");
  CHECK(spec.name == "tilted dephasing");
  CHECK(spec.family == "dephasing");
  REQUIRE(spec.domain);
  CHECK(spec.domain->lo[0] == 0.1);
  CHECK(spec.domain->hi[0] == 0.9);
  REQUIRE(spec.input);
  CHECK((*spec.input)(1) == Complex(0.0, 0.8));
  const ParametricChannel ch = build_channel(spec);
  CHECK(ch.domain().hi[0] == 0.9);
}

TEST_CASE("syntax errors carry line and column") {
  const std::string msg = error_of("family = dephasing\ntheta_domain = [0, 1\n");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_FALSE(error_of("family = dephasing\nbogus = 1\n").empty());
  CHECK_FALSE(error_of("family = dephasing\nfamily = rotation\n").empty());
  CHECK_FALSE(error_of("name = missing family\n").empty());
  CHECK_FALSE(error_of("family = dephasing\naxis = x\n").empty());
  CHECK_FALSE(error_of("family = example1\ninput_state = [1, 0, 0]\n").empty());
  CHECK_FALSE(error_of("family = rotation\naxis = w\n").empty());
  CHECK_THROWS_AS(build_channel(parse_channel_spec("family = dephasing\ninput_state = [1, 0, 0]\n")),
                  ValidationError);
  CHECK_THROWS_AS(build_channel(parse_channel_spec("family = dephasing\ntheta_domain = [0, 1] x [0, 1]\n")),
                  ValidationError);
}

TEST_CASE("complex literals") {
  CHECK(*parse_complex("1.5") == Complex(1.5, 0.0));
  CHECK(*parse_complex("-2i") == Complex(0.0, -2.0));
  CHECK(*parse_complex("i") == Complex(0.0, 1.0));
  CHECK(*parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(*parse_complex("0.5-0.25i") == Complex(0.5, -0.25));
  CHECK(*parse_complex("1e-3+2e2i") == Complex(1e-3, 200.0));
  CHECK_FALSE(parse_complex("1+").has_value());
  CHECK_FALSE(parse_complex("inf").has_value());
  CHECK_FALSE(parse_complex("abc").has_value());
}

TEST_CASE("format and parse round-trip") {
  const char* texts[] = {
      "name = a\nfamily = rotation\naxis = y\ninput_state = [0.1, 0.99498743710662i]\n",
      "name = b\nfamily = example2\nf = [0.1, 0.5, 0.25]\ng = [0, 0.3, 0.6]\n",
      "name = c\nfamily = custom-spectral\ndim = 2\nparams = 1\np0 = [0.6, 0.4]\nslope1 = [0.1, -0.1]\n"
      "basis = [[1, 0], [0, 1]]\ngenerator1 = [[0, 0.3-0.1i], [0.3+0.1i, 0]]\ntheta_domain = [0, 1]\n",
  };
  for (const char* text : texts) {
    CAPTURE(text);
    const auto first = parse_channel_spec(text);
    const std::string formatted = format_channel_spec(first);
    const auto second = parse_channel_spec(formatted);
    CHECK(format_channel_spec(second) == formatted);
    CHECK(second.name == first.name);
    CHECK(second.family == first.family);
    CHECK(second.options.f == first.options.f);
    CHECK(second.options.g == first.options.g);
    CHECK(second.options.axis == first.options.axis);
    CHECK(second.input.has_value() == first.input.has_value());
    if (first.input) CHECK((*second.input - *first.input).norm() == 0.0);
    CHECK_NOTHROW(build_channel(second));
  }
}

TEST_CASE("shipped spec files load") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(QFI_SPEC_DIR)) {
    if (entry.path().extension() != ".spec") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(build_channel(load_channel_spec(entry.path().string())));
    ++seen;
  }
  CHECK(seen >= 6);
}
