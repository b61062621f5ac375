#include "qfi/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi::report {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json verdict_json(const linalg::LoewnerVerdict& v) {
  return Json{{"holds", v.holds}, {"min_eigenvalue", v.min_eigenvalue}};
}

Json theta_json(const ParamPoint& theta) {
  if (theta.size() == 1) return Json(theta.front());
  return Json(theta);
}

std::string csv_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<SweepRow> sweep(const ParametricChannel& ch, const std::vector<double>& grid,
                            const bounds::PovmChoice& povm, const linalg::DiffConfig& cfg, double tol) {
  if (ch.param_count() != 1) throw ValidationError("sweep needs a one-parameter channel");
  for (double t : grid)
    if (!ch.domain().contains(ParamPoint{t})) {
      std::ostringstream msg;
      msg << "sweep point " << t << " lies outside the channel domain [" << ch.domain().lo[0] << ", "
          << ch.domain().hi[0] << "]";
      throw ValidationError(msg.str());
    }
  std::vector<SweepRow> rows;
  for (double t : grid) {
    SweepRow row;
    row.theta = t;
    try {
      const bounds::BoundReport r = bounds::one_parameter_report(ch, ParamPoint{t}, povm, cfg, tol);
      row.fisher = r.fisher;
      row.sld = r.sld;
      row.sm = r.sm;
      row.gap = r.gap;
      row.residual = r.attainability.residual;
      row.attainable = r.attainability.attainable;
      row.warnings = r.warnings;
    } catch (const NumericError& e) {
      row.warnings.push_back(std::string("numeric failure: ") + e.what());
    } catch (const ValidationError& e) {
      row.warnings.push_back(std::string("not evaluable: ") + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json matrix_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Json real_matrix_json(const RealMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const bounds::BoundReport& r) {
  Json j;
  j["theta"] = theta_json(r.theta);
  j["fisher"] = optional_json(r.fisher);
  j["fisher_singular"] = r.fisher_singular;
  j["sld"] = r.sld;
  j["sm"] = r.sm;
  j["sm_representation"] = optional_json(r.sm_representation);
  j["gap"] = r.gap;
  j["attainability"] = {{"attainable", r.attainability.attainable}, {"residual", r.attainability.residual}};
  j["method_cross_check"] = optional_json(r.method_cross_check);
  if (r.unitary)
    j["unitary_condition"] = {{"value", complex_json(r.unitary->value)}, {"attainable", r.unitary->attainable}};
  if (r.sld_condition) {
    Json elements = Json::array();
    for (const auto& e : r.sld_condition->elements)
      elements.push_back({{"xi", e.xi}, {"residual", e.residual}, {"vacuous", e.vacuous}});
    j["sld_condition"] = {{"satisfied", r.sld_condition->satisfied},
                          {"max_residual", r.sld_condition->max_residual},
                          {"elements", std::move(elements)}};
  }
  if (r.sm_condition) {
    j["sm_condition"] = {{"satisfied", r.sm_condition->satisfied},
                         {"max_residual", r.sm_condition->max_residual},
                         {"xi", r.sm_condition->xi},
                         {"residuals", real_matrix_json(r.sm_condition->residuals)},
                         {"caveat", r.sm_condition->caveat}};
  }
  j["gauge_source"] = bounds::to_string(r.gauge_source);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const bounds::InfoMatrix& m) {
  return Json{{"kind", bounds::to_string(m.kind)},
              {"entries", real_matrix_json(m.entries)},
              {"singular", m.singular},
              {"dropped_terms", m.dropped_terms}};
}

Json to_json(const bounds::MatrixReport& r) {
  Json j;
  j["theta"] = theta_json(r.theta);
  j["fisher"] = r.fisher ? to_json(*r.fisher) : Json(nullptr);
  j["sld"] = to_json(r.sld);
  j["sm"] = to_json(r.sm);
  j["attainability"] = {{"attainable", r.attainability.attainable},
                        {"residual", r.attainability.residual},
                        {"quasi_classical", r.attainability.quasi_classical},
                        {"unitary", r.attainability.unitary}};
  Json loewner;
  loewner["tol"] = r.loewner.tol;
  loewner["sld_le_sm"] = verdict_json(r.loewner.sld_le_sm);
  loewner["fisher_le_sld"] = r.loewner.fisher_le_sld ? verdict_json(*r.loewner.fisher_le_sld) : Json(nullptr);
  loewner["fisher_le_sm"] = r.loewner.fisher_le_sm ? verdict_json(*r.loewner.fisher_le_sm) : Json(nullptr);
  j["loewner"] = std::move(loewner);
  j["cramer_rao_floor"] = {{"covariance_per_shot", real_matrix_json(r.sld_floor.covariance)},
                           {"rank", r.sld_floor.rank},
                           {"pseudo_inverse", !r.sld_floor.full_rank}};
  j["gauge_source"] = bounds::to_string(r.gauge_source);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const estimation::EstimationRun& run) {
  Json j;
  j["channel"] = run.channel;
  j["theta_true"] = run.theta_true;
  j["povm"] = run.povm_label;
  j["shots"] = run.shots;
  j["replications"] = run.replications;
  j["seed"] = run.seed;
  j["first_counts"] = run.first_counts;
  j["mean"] = run.mean;
  j["bias"] = run.bias;
  j["variance"] = run.variance;
  j["boundary_hits"] = run.boundary_hits;
  j["information"] = {{"fisher", optional_json(run.fisher)}, {"sld", run.sld}, {"sm", run.sm}};
  j["effective_shots"] = run.effective_shots;
  j["bounds"] = {{"fisher", optional_json(run.bound_fisher)},
                 {"sld", optional_json(run.bound_sld)},
                 {"sm", optional_json(run.bound_sm)}};
  j["variance_ratios"] = {{"fisher", optional_json(run.ratio_fisher)},
                          {"sld", optional_json(run.ratio_sld)},
                          {"sm", optional_json(run.ratio_sm)}};
  if (run.adaptive) {
    Json pilot = Json::array();
    for (const auto& m : run.adaptive->pilot_povm) pilot.push_back(matrix_json(m));
    Json povm = Json::array();
    for (const auto& m : run.adaptive->first_stage2_povm) povm.push_back(matrix_json(m));
    j["adaptive"] = {{"n_pilot", run.adaptive->n_pilot},
                     {"pilot_povm", run.adaptive->pilot_povm_label},
                     {"pilot_povm_elements", std::move(pilot)},
                     {"pilot_estimates", run.adaptive->pilot_estimates},
                     {"stage2_povm_first_replication", std::move(povm)}};
  }
  j["estimates"] = run.estimates;
  j["warnings"] = run.warnings;
  return j;
}

Json to_json(const verify::SuiteResult& s) {
  Json failures = Json::array();
  for (const auto& f : s.failures)
    failures.push_back({{"check", f.check},
                        {"channel", f.channel},
                        {"theta", f.theta},
                        {"value", f.value},
                        {"limit", f.limit},
                        {"detail", f.detail}});
  return Json{{"suite", s.name},       {"passed", s.passed()},    {"cases", s.cases},
              {"checks", s.checks},    {"skipped", s.skipped},    {"worst_ratio", s.worst_ratio},
              {"failures", failures},  {"notes", s.notes}};
}

Json to_json(const SweepRow& row) {
  return Json{{"theta", row.theta},
              {"fisher", optional_json(row.fisher)},
              {"sld", optional_json(row.sld)},
              {"sm", optional_json(row.sm)},
              {"gap", optional_json(row.gap)},
              {"residual", optional_json(row.residual)},
              {"attainable", optional_json(row.attainable)},
              {"warnings", row.warnings}};
}

Json spec_json(const ChannelSpec& spec) {
  return Json{{"name", spec.name}, {"family", spec.family}, {"text", format_channel_spec(spec)}};
}

Json document(const std::string& command, const std::optional<ChannelSpec>& spec, Json body) {
  Json doc;
  doc["tool"] = "qfi";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["channel"] = spec ? spec_json(*spec) : Json(nullptr);
  doc["result"] = std::move(body);
  require_finite(doc);
  return doc;
}

void require_finite(const Json& doc) {
  if (doc.is_number_float() && !std::isfinite(doc.get<double>()))
    throw NumericError("report contains a non-finite number");
  if (doc.is_structured())
    for (const auto& item : doc) require_finite(item);
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "theta,fisher,sld,sm,gap,residual,attainable,warnings\n";
  for (const auto& r : rows) {
    std::string warnings;
    for (std::size_t i = 0; i < r.warnings.size(); ++i) warnings += (i ? "; " : "") + r.warnings[i];
    out += format_double(r.theta) + "," + csv_field(r.fisher) + "," + csv_field(r.sld) + "," + csv_field(r.sm) + "," +
           csv_field(r.gap) + "," + csv_field(r.residual) + "," +
           (r.attainable ? (*r.attainable ? "true" : "false") : "") + "," + csv_escape(warnings) + "\n";
  }
  return out;
}

std::string report_csv(const bounds::BoundReport& r) {
  std::string out = "key,value\n";
  auto add = [&out](const std::string& k, const std::string& v) { out += k + "," + v + "\n"; };
  add("theta", format_double(r.theta.front()));
  add("fisher", csv_field(r.fisher));
  add("sld", format_double(r.sld));
  add("sm", format_double(r.sm));
  add("sm_representation", csv_field(r.sm_representation));
  add("gap", format_double(r.gap));
  add("attainable", r.attainability.attainable ? "true" : "false");
  add("residual", format_double(r.attainability.residual));
  add("method_cross_check", csv_field(r.method_cross_check));
  if (r.sld_condition) add("sld_condition", r.sld_condition->satisfied ? "true" : "false");
  if (r.sm_condition) add("sm_condition", r.sm_condition->satisfied ? "true" : "false");
  add("gauge_source", bounds::to_string(r.gauge_source));
  for (const auto& w : r.warnings) add("warning", csv_escape(w));
  return out;
}

}  // namespace qfi::report
