#pragma once

// JSON and CSV serialization of reports, sweeps, estimation runs and suite
// results.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfi/estimation.hpp"
#include "qfi/multi.hpp"
#include "qfi/spec_file.hpp"
#include "qfi/verify.hpp"

namespace qfi::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

struct SweepRow {
  double theta = 0.0;
  std::optional<double> fisher;
  std::optional<double> sld;
  std::optional<double> sm;
  std::optional<double> gap;
  std::optional<double> residual;
  std::optional<bool> attainable;
  std::vector<std::string> warnings;
};

/// One-parameter report at every grid point. Per-point numeric failures
/// become row warnings and the sweep continues.
std::vector<SweepRow> sweep(const ParametricChannel& ch, const std::vector<double>& grid,
                            const bounds::PovmChoice& povm, const linalg::DiffConfig& cfg, double tol);

Json complex_json(const Complex& z);
Json matrix_json(const ComplexMatrix& m);
Json real_matrix_json(const RealMatrix& m);

Json to_json(const bounds::BoundReport& r);
Json to_json(const bounds::InfoMatrix& m);
Json to_json(const bounds::MatrixReport& r);
Json to_json(const estimation::EstimationRun& run);
Json to_json(const verify::SuiteResult& s);
Json to_json(const SweepRow& row);
Json spec_json(const ChannelSpec& spec);

/// Top-level document with tool version, command name and channel echo.
Json document(const std::string& command, const std::optional<ChannelSpec>& spec, Json body);

/// Throws NumericError when any number in the document is not finite.
void require_finite(const Json& doc);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& doc);

std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Flat `key,value` rows for a one-parameter report.
std::string report_csv(const bounds::BoundReport& r);

/// Shortest text that parses back to the same double.
std::string format_double(double x);

}  // namespace qfi::report
