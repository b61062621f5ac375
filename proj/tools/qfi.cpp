// qfi: information bounds, attainability reports, estimation experiments and
// verification suites for parametric quantum channels.
//
//   qfi report   SPEC [--theta T] [--povm none|sld|computational|x|y]
//   qfi sweep    SPEC --theta-grid start:stop:count | t1,t2,...
//   qfi estimate SPEC --theta-true T [--N n] [--reps r] [--seed s] [--adaptive]
//   qfi optimize-input SPEC --theta T [--objective sld|sm] [--restarts k]
//   qfi verify   [--suite gap|ordering|routes|directional|all]
//
// SPEC is a channel file or a built-in family name. Exit codes: 0 success,
// 2 validation error, 3 numeric failure, 4 verification failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfi/errors.hpp"
#include "qfi/report.hpp"

namespace {

using namespace qfi;
using report::Json;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct CommonOptions {
  double fd_step = 1e-4;
  std::string scheme = "central4";
  bool richardson = false;
  double tol = 1e-6;
  std::string format = "json";
};

linalg::DiffConfig diff_config(const CommonOptions& o) {
  if (!(o.fd_step > 0.0)) throw ValidationError("--fd-step must be positive");
  linalg::DiffConfig cfg;
  cfg.step = o.fd_step;
  cfg.scheme = o.scheme == "central2" ? linalg::DiffScheme::Central2 : linalg::DiffScheme::Central4;
  cfg.richardson = o.richardson;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_format) {
  cmd->add_option("--fd-step", o.fd_step, "finite-difference step")->capture_default_str();
  cmd->add_option("--scheme", o.scheme, "difference scheme")
      ->check(CLI::IsMember({"central2", "central4"}))
      ->capture_default_str();
  cmd->add_flag("--richardson", o.richardson, "Richardson extrapolation of the difference");
  cmd->add_option("--tol", o.tol, "attainability and condition tolerance")->capture_default_str();
  if (with_format)
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
}

ChannelSpec resolve_spec(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_channel_spec(arg);
  for (const auto& family : builtin_families())
    if (family == arg) {
      ChannelSpec spec;
      spec.name = arg;
      spec.family = arg;
      return spec;
    }
  throw ValidationError("'" + arg + "' is neither a channel file nor a built-in family");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size() || !std::isfinite(v))
      throw ValidationError(what + ": '" + item + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(what + " is empty");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_number_list(text, "--theta-grid");
  std::string spec = text;
  for (char& c : spec)
    if (c == ':') c = ',';
  const auto parts = parse_number_list(spec, "--theta-grid");
  if (parts.size() != 3) throw ValidationError("--theta-grid expects start:stop:count");
  const double count = parts[2];
  if (count < 1 || count != std::floor(count)) throw ValidationError("--theta-grid count must be a positive integer");
  const int n = static_cast<int>(count);
  std::vector<double> grid;
  // Rounded to 15 digits so that 0.1:0.9:9 yields 0.3 rather than 0.30000000000000004.
  char buf[32];
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * i / (n - 1);
    std::snprintf(buf, sizeof buf, "%.15g", t);
    grid.push_back(std::stod(buf));
  }
  return grid;
}

ParamPoint resolve_theta(const ParametricChannel& ch, const std::optional<std::string>& text) {
  ParamPoint theta = text ? parse_number_list(*text, "--theta") : ch.domain().midpoint();
  if (static_cast<int>(theta.size()) != ch.param_count())
    throw ValidationError("--theta has " + std::to_string(theta.size()) + " value(s); the channel has " +
                          std::to_string(ch.param_count()) + " parameter(s)");
  if (!ch.domain().contains(theta)) throw ValidationError("--theta lies outside the channel domain");
  return theta;
}

/// Named fixed POVMs; "x" and "y" are the Pauli eigenbases of a qubit.
POVM named_povm(const std::string& name, int dim) {
  if (name == "computational") return POVM::computational(dim);
  if (name == "x" || name == "y") {
    if (dim != 2) throw ValidationError("POVM '" + name + "' needs a qubit channel");
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix u(2, 2);
    if (name == "x")
      u << s, s, s, -s;
    else
      u << s, s, Complex(0.0, s), Complex(0.0, -s);
    return POVM::from_basis(u);
  }
  throw ValidationError("unknown POVM '" + name + "'");
}

bounds::PovmChoice povm_choice(const std::string& name, int dim) {
  bounds::PovmChoice choice;
  if (name == "none") return choice;
  if (name == "sld") {
    choice.kind = bounds::PovmChoice::Kind::SldOptimal;
    return choice;
  }
  choice.kind = bounds::PovmChoice::Kind::Fixed;
  choice.povm = named_povm(name, dim);
  return choice;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("QFI_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("QFI_SEED is not an unsigned integer: '") + env + "'");
  }
  return 42;
}

void emit(const std::string& text) { std::cout << text << std::flush; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum channel information bounds"};
  app.set_version_flag("--version", std::string(report::kToolVersion));
  app.require_subcommand(1);

  CommonOptions common;
  std::string spec_arg;
  std::optional<std::string> theta_text;
  std::string povm_name = "none";

  auto* rep = app.add_subcommand("report", "bounds and attainability at one parameter point");
  rep->add_option("spec", spec_arg, "channel file or built-in family")->required();
  rep->add_option("--theta", theta_text, "parameter point, comma separated; defaults to the domain midpoint");
  rep->add_option("--povm", povm_name, "none, sld, computational, x or y")->capture_default_str();
  add_common(rep, common, true);

  std::string grid_text;
  auto* swp = app.add_subcommand("sweep", "one-parameter report over a grid");
  swp->add_option("spec", spec_arg, "channel file or built-in family")->required();
  swp->add_option("--theta-grid", grid_text, "start:stop:count or t1,t2,...")->required();
  swp->add_option("--povm", povm_name, "none, sld, computational, x or y")->capture_default_str();
  add_common(swp, common, true);

  double theta_true = 0.0;
  long shots = 10000;
  int reps = 200;
  std::optional<std::uint64_t> seed_flag;
  std::string est_povm = "sld";
  bool adaptive = false;
  long n_pilot = 500;
  std::string pilot_povm = "computational";
  std::optional<double> window;
  bool serial = false;
  auto* est = app.add_subcommand("estimate", "replicated maximum-likelihood experiment");
  est->add_option("spec", spec_arg, "channel file or built-in family")->required();
  est->add_option("--theta-true", theta_true, "true parameter")->required();
  est->add_option("--N", shots, "shots per replication")->capture_default_str()->check(CLI::PositiveNumber);
  est->add_option("--reps", reps, "replications")->capture_default_str()->check(CLI::PositiveNumber);
  est->add_option("--seed", seed_flag, "base seed; falls back to QFI_SEED, then 42");
  est->add_option("--povm", est_povm, "sld, computational, x or y")->capture_default_str();
  est->add_flag("--adaptive", adaptive, "two-stage scheme with an SLD-basis second stage");
  est->add_option("--n-pilot", n_pilot, "pilot shots for --adaptive")->capture_default_str();
  est->add_option("--pilot-povm", pilot_povm, "pilot POVM for --adaptive")->capture_default_str();
  est->add_option("--window", window, "restrict the stage-2 search to theta0 +- window");
  est->add_flag("--serial", serial, "run replications on one thread");
  add_common(est, common, false);

  double opt_theta = 0.0;
  std::string objective = "sld";
  int restarts = 8;
  auto* opt = app.add_subcommand("optimize-input", "search for the input state maximizing H or C");
  opt->add_option("spec", spec_arg, "channel file or built-in family")->required();
  opt->add_option("--theta", opt_theta, "parameter")->required();
  opt->add_option("--objective", objective, "sld or sm")
      ->check(CLI::IsMember({"sld", "sm"}))
      ->capture_default_str();
  opt->add_option("--restarts", restarts, "random starting points")->capture_default_str()->check(CLI::PositiveNumber);
  opt->add_option("--seed", seed_flag, "seed; falls back to QFI_SEED, then 42");
  add_common(opt, common, false);

  std::string suite_name = "all";
  verify::SuiteConfig suite_cfg;
  auto* ver = app.add_subcommand("verify", "randomized property suites");
  ver->add_option("--suite", suite_name, "gap, ordering, routes, directional or all")->capture_default_str();
  ver->add_option("--seed", seed_flag, "seed; falls back to QFI_SEED, then 42");
  ver->add_option("--channels", suite_cfg.channels, "one-parameter channels")->capture_default_str();
  ver->add_option("--multi-channels", suite_cfg.multi_channels, "two-parameter channels")->capture_default_str();
  ver->add_flag("--serial", serial, "run cases on one thread");
  add_common(ver, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const linalg::DiffConfig diff = diff_config(common);

    if (rep->parsed()) {
      const ChannelSpec spec = resolve_spec(spec_arg);
      const ParametricChannel ch = build_channel(spec);
      const ParamPoint theta = resolve_theta(ch, theta_text);
      const bounds::PovmChoice choice = povm_choice(povm_name, ch.dim());
      if (ch.param_count() >= 2) {
        if (common.format == "csv") throw ValidationError("CSV output is available for one-parameter reports only");
        const auto r = bounds::multi_parameter_report(ch, theta, choice, diff, common.tol);
        emit(report::dump(report::document("report", spec, report::to_json(r))));
      } else {
        const auto r = bounds::one_parameter_report(ch, theta, choice, diff, common.tol);
        if (common.format == "csv")
          emit(report::report_csv(r));
        else
          emit(report::dump(report::document("report", spec, report::to_json(r))));
      }
      return 0;
    }

    if (swp->parsed()) {
      const ChannelSpec spec = resolve_spec(spec_arg);
      const ParametricChannel ch = build_channel(spec);
      const auto grid = parse_grid(grid_text);
      const auto rows = report::sweep(ch, grid, povm_choice(povm_name, ch.dim()), diff, common.tol);
      if (common.format == "csv") {
        emit(report::sweep_csv(rows));
      } else {
        Json body = Json::array();
        for (const auto& row : rows) body.push_back(report::to_json(row));
        emit(report::dump(report::document("sweep", spec, std::move(body))));
      }
      return 0;
    }

    if (est->parsed()) {
      const ChannelSpec spec = resolve_spec(spec_arg);
      const ParametricChannel ch = build_channel(spec);
      if (ch.param_count() != 1) throw ValidationError("estimate needs a one-parameter channel");
      if (!ch.domain().contains(ParamPoint{theta_true}))
        throw ValidationError("--theta-true lies outside the channel domain");
      estimation::ExperimentConfig cfg;
      cfg.shots = shots;
      cfg.replications = reps;
      cfg.seed = resolve_seed(seed_flag);
      cfg.execution = serial ? estimation::Execution::Serial : estimation::Execution::Parallel;
      cfg.diff = diff;
      estimation::EstimationRun run;
      if (adaptive) {
        estimation::AdaptiveConfig acfg;
        acfg.n_pilot = n_pilot;
        acfg.pilot_povm = named_povm(pilot_povm, ch.dim());
        acfg.window = window;
        run = estimation::adaptive_two_stage(ch, theta_true, acfg, cfg);
        run.adaptive->pilot_povm_label = pilot_povm;
      } else {
        POVM povm = est_povm == "sld"
                        ? bounds::optimal_povm_from_sld(
                              bounds::sld_score(bounds::spectral_curve(ch, ParamPoint{theta_true}, {1.0}, diff)))
                        : named_povm(est_povm, ch.dim());
        run = estimation::cr_experiment(ch, theta_true, povm, est_povm, cfg);
      }
      emit(report::dump(report::document("estimate", spec, report::to_json(run))));
      return 0;
    }

    if (opt->parsed()) {
      const ChannelSpec spec = resolve_spec(spec_arg);
      const ParametricChannel ch = build_channel(spec);
      if (ch.form() != ChannelForm::KrausCurve) throw ValidationError("optimize-input needs a Kraus channel");
      if (ch.param_count() != 1) throw ValidationError("optimize-input needs a one-parameter channel");
      if (!ch.domain().contains(ParamPoint{opt_theta})) throw ValidationError("--theta lies outside the channel domain");
      const auto obj = objective == "sm" ? estimation::Objective::Sm : estimation::Objective::Sld;
      const auto best = estimation::optimize_input_state(ch, opt_theta, obj, restarts, resolve_seed(seed_flag), diff);
      Json amplitudes = Json::array();
      for (Eigen::Index i = 0; i < best.state.amplitudes().size(); ++i)
        amplitudes.push_back(report::complex_json(best.state.amplitudes()(i)));
      Json body{{"theta", opt_theta},
                {"objective", objective},
                {"value", best.value},
                {"state", std::move(amplitudes)},
                {"evaluations", best.evaluations},
                {"rejected", best.rejected}};
      if (ch.has_input()) {
        try {
          body["value_for_spec_input"] = estimation::input_objective(ch, ch.input_state(), opt_theta, obj, diff);
        } catch (const NumericError& e) {
          body["value_for_spec_input"] = nullptr;
        }
      }
      emit(report::dump(report::document("optimize-input", spec, std::move(body))));
      return 0;
    }

    if (ver->parsed()) {
      const verify::Suite suite = verify::parse_suite(suite_name);
      suite_cfg.seed = resolve_seed(seed_flag);
      suite_cfg.execution = serial ? estimation::Execution::Serial : estimation::Execution::Parallel;
      suite_cfg.diff = diff;
      const auto results = verify::run_suites(suite, suite_cfg);
      bool all = true;
      Json body = Json::array();
      for (const auto& r : results) {
        all = all && r.passed();
        body.push_back(report::to_json(r));
        std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.checks << " checks over " << r.cases
                  << " cases, " << r.failures.size() << " failure(s), " << r.skipped << " skipped\n";
      }
      emit(report::dump(report::document("verify", std::nullopt, Json{{"passed", all}, {"suites", body}})));
      return all ? 0 : kExitVerify;
    }
  } catch (const ValidationError& e) {
    std::cerr << "qfi: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "qfi: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "qfi: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
