// agdlab: batch front door for asynchronous gradient descent experiments.
// Subcommands run configured experiments, emit trace CSVs and monitor JSON
// reports, and verify recorded traces. No interactive mode; every output is
// an artifact for offline inspection.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "agdlab/engine.hpp"
#include "agdlab/linear_systems.hpp"
#include "agdlab/logging.hpp"
#include "agdlab/markets.hpp"
#include "agdlab/matrix_market.hpp"
#include "agdlab/monitor.hpp"
#include "agdlab/validate.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace agdlab;

namespace {

// Exit codes shared by all subcommands.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNoConvergence = 3;
constexpr int kMonitorViolations = 4;
constexpr int kWarehouseBreach = 5;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& key : allowed) ok = ok || key == it.key();
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_number_integer() ||
      doc["schema"].get<int>() != 1)
    throw ConfigError("config must carry \"schema\": 1");
  return doc;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

SchedulePolicy parse_schedule_section(const json& sec) {
  check_keys(sec, {"policy", "g_min", "target", "burst"}, "schedule");
  if (!sec.contains("policy")) throw ConfigError("schedule: missing policy");
  const std::string policy = sec["policy"].get<std::string>();
  if (policy == "synchronous_jitter") return SchedulePolicy::synchronous_jitter();
  if (policy == "round_robin") return SchedulePolicy::round_robin();
  if (policy == "random_gap")
    return SchedulePolicy::random_gap(sec.value("g_min", 0.25));
  if (policy == "bursty_adversarial")
    return SchedulePolicy::bursty_adversarial(sec.value("target", 0), sec.value("burst", 8));
  throw ConfigError("schedule: unknown policy '" + policy + "'");
}

StalenessPolicy parse_staleness_section(const json& sec, std::uint64_t seed) {
  check_keys(sec, {"policy"}, "staleness");
  if (!sec.contains("policy")) throw ConfigError("staleness: missing policy");
  try {
    return parse_staleness_policy(sec["policy"].get<std::string>(), seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Univariate> parse_univariates(const json& sec, int n) {
  std::vector<Univariate> fs;
  if (sec.is_object()) {
    check_keys(sec, {"kind", "c", "center"}, "problem.f");
    const std::string kind = sec.value("kind", "zero");
    for (int j = 0; j < n; ++j) {
      if (kind == "zero") fs.push_back(Univariate::zero());
      else if (kind == "quadratic") fs.push_back(Univariate::quadratic(sec.value("c", 1.0), sec.value("center", 0.0)));
      else throw ConfigError("problem.f: unknown kind '" + kind + "'");
    }
    return fs;
  }
  if (!sec.is_array() || static_cast<int>(sec.size()) != n)
    throw ConfigError("problem.f: expected one entry per column");
  for (const auto& f : sec) {
    check_keys(f, {"kind", "c", "center"}, "problem.f[]");
    const std::string kind = f.value("kind", "zero");
    if (kind == "zero") fs.push_back(Univariate::zero());
    else if (kind == "quadratic") fs.push_back(Univariate::quadratic(f.value("c", 1.0), f.value("center", 0.0)));
    else throw ConfigError("problem.f: unknown kind '" + kind + "'");
  }
  return fs;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  bool json_out = false;
  bool override_bounds = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config (JSON, schema 1)");
  if (needs_config) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory for artifacts");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--horizon", args.horizon, "override the config horizon");
  cmd->add_flag("--json", args.json_out, "print the machine-readable summary to stdout");
  cmd->add_flag("--override-bounds", args.override_bounds, "allow step-size constants above the safe bounds");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit_summary(const json& summary, const CommonArgs& args) {
  if (args.json_out) {
    std::cout << summary.dump(2) << "\n";
  } else {
    for (auto it = summary.begin(); it != summary.end(); ++it)
      std::cout << it.key() << ": " << it.value().dump() << "\n";
  }
}

// ---------------------------------------------------------------- solve --

int cmd_solve(const CommonArgs& args, bool composite) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {"schema", "problem", "schedule", "staleness", "step", "horizon", "seed", "tolerance"},
             "config");
  const fs::path base = fs::path(args.config_path).parent_path();

  if (!cfg.contains("problem")) throw ConfigError("config: missing problem");
  const json& prob = cfg["problem"];
  check_keys(prob, {"matrix", "rhs", "p0", "f"}, "problem");
  if (!prob.contains("matrix") || !prob.contains("rhs")) throw ConfigError("problem: needs matrix and rhs");
  const fs::path mtx_path = resolve(base, prob["matrix"].get<std::string>());
  const fs::path rhs_path = resolve(base, prob["rhs"].get<std::string>());
  if (!fs::exists(mtx_path)) throw ConfigError("missing matrix file: " + mtx_path.string());
  if (!fs::exists(rhs_path)) throw ConfigError("missing rhs file: " + rhs_path.string());

  Eigen::MatrixXd a = read_matrix_market_file(mtx_path.string());
  const auto rhs = read_vector_file(rhs_path.string());
  Eigen::VectorXd b(static_cast<long>(rhs.size()));
  for (std::size_t i = 0; i < rhs.size(); ++i) b(static_cast<long>(i)) = rhs[i];

  SolveOptions opts;
  opts.horizon = args.horizon.value_or(cfg.value("horizon", 200.0));
  opts.tolerance = cfg.value("tolerance", 1e-8);
  const std::uint64_t seed = args.seed.value_or(cfg.value("seed", 1ull));
  opts.schedule_seed = seed;
  if (cfg.contains("schedule")) opts.schedule = parse_schedule_section(cfg["schedule"]);
  opts.staleness = cfg.contains("staleness")
                       ? parse_staleness_section(cfg["staleness"], Rng::mix(seed, 0x57a1eull))
                       : StalenessPolicy{StalenessKind::kFresh, 0};
  if (prob.contains("p0")) {
    const fs::path p0_path = resolve(base, prob["p0"].get<std::string>());
    if (!fs::exists(p0_path)) throw ConfigError("missing p0 file: " + p0_path.string());
    opts.p0 = read_vector_file(p0_path.string());
  }

  double scale = 1.0;
  if (cfg.contains("step")) {
    const json& step = cfg["step"];
    check_keys(step, {"rule", "gamma", "factor"}, "step");
    const std::string rule = step.value("rule", "auto");
    if (rule == "constant") {
      if (!step.contains("gamma")) throw ConfigError("step: constant rule needs gamma[]");
      opts.gamma_override = step["gamma"].get<std::vector<double>>();
    } else if (rule == "scaled") {
      scale = step.value("factor", 1.0);
      if (!(scale > 0.0)) throw ConfigError("step: factor must be positive");
      if (scale < 1.0 && !args.override_bounds)
        throw ConfigError("step: factor below 1 shrinks gamma under the safe bound (use --override-bounds)");
    } else if (rule != "auto") {
      throw ConfigError("step: unknown rule '" + rule + "'");
    }
  }

  SolveResult res;
  try {
    if (composite) {
      CompositeProblem cp{std::move(a), std::move(b), {}};
      cp.fs = prob.contains("f") ? parse_univariates(prob["f"], cp.dim())
                                 : std::vector<Univariate>(static_cast<std::size_t>(cp.dim()), Univariate::zero());
      if (scale != 1.0) {
        CompositeObjective obj(cp);
        Eigen::MatrixXd cap = obj.gram().cwiseAbs();
        for (int j = 0; j < cp.dim(); ++j) cap(j, j) += cp.fs[static_cast<std::size_t>(j)].curvature_bound;
        opts.gamma_override.resize(static_cast<std::size_t>(cp.dim()));
        std::vector<double> curvature;
        for (const auto& f : cp.fs) curvature.push_back(f.curvature_bound);
        for (int j = 0; j < cp.dim(); ++j)
          opts.gamma_override[static_cast<std::size_t>(j)] = scale * composite_gamma_bound(obj.gram(), curvature, j);
      }
      res = solve_composite(cp, opts);
    } else {
      SpdProblem sp = SpdProblem::from(std::move(a), std::move(b));
      if (scale != 1.0) {
        opts.gamma_override = spd_gamma_bounds(sp.A);
        for (auto& g : opts.gamma_override) g *= scale;
      }
      res = solve_spd(sp, opts);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  {
    std::ostringstream sol;
    write_vector(sol, res.solution);
    write_text(out / "solution.txt", sol.str());
  }
  write_trace_csv_file((out / "trace.csv").string(), res.trace);
  write_text(out / "monitor.json", monitor_report_json(res.monitor));

  const std::size_t violations = res.monitor.update_violations.size() + res.monitor.gap_violations.size() +
                                 res.monitor.conditions.a1_failures + res.monitor.conditions.a3_failures +
                                 res.monitor.conditions.a4_failures;
  json summary;
  summary["command"] = composite ? "solve-composite" : "solve-spd";
  summary["converged"] = res.converged;
  summary["residual_inf"] = res.residual_inf;
  summary["time_to_tolerance"] = res.time_to_tolerance;
  summary["events"] = res.trace.size();
  summary["monitor_violations"] = violations;
  summary["out"] = out.string();
  emit_summary(summary, args);

  if (!res.converged) return kNoConvergence;
  if (violations > 0) return kMonitorViolations;
  return kOk;
}

// --------------------------------------------------------------- market --

int cmd_market(const CommonArgs& args, MarketMode mode) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"schema", "market", "lambda", "p0", "schedule", "staleness", "horizon", "seed", "z_tolerance",
              "compare_equilibrium"},
             "config");
  const fs::path base = fs::path(args.config_path).parent_path();
  if (!cfg.contains("market")) throw ConfigError("config: missing market");

  MarketDocument doc;
  try {
    if (cfg["market"].is_string()) {
      const fs::path mpath = resolve(base, cfg["market"].get<std::string>());
      if (!fs::exists(mpath)) throw ConfigError("missing market file: " + mpath.string());
      doc = load_market_json_file(mpath.string());
    } else {
      std::istringstream inline_doc(cfg["market"].dump());
      doc = load_market_json(inline_doc, "inline market");
    }
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }

  const char* want = mode == MarketMode::kLeontief ? "leontief" : "ces";
  if (doc.kind != want)
    throw ConfigError(std::string("market kind '") + doc.kind + "' does not match the subcommand");

  auto market = doc.instantiate();
  const int n = market->goods();

  TatonnementOptions opts;
  const std::uint64_t seed = args.seed.value_or(cfg.value("seed", 1ull));
  opts.schedule_seed = seed;
  if (cfg.contains("schedule")) opts.schedule = parse_schedule_section(cfg["schedule"]);
  opts.staleness = cfg.contains("staleness")
                       ? parse_staleness_section(cfg["staleness"], Rng::mix(seed, 0x57a1eull))
                       : StalenessPolicy{StalenessKind::kRandomInBox, Rng::mix(seed, 0x57a1eull)};
  opts.horizon = args.horizon.value_or(cfg.value("horizon", 2000.0));
  opts.lambda = cfg.value("lambda", kMaxTatonnementLambda);
  opts.override_lambda_bound = args.override_bounds;
  opts.compare_equilibrium = cfg.value("compare_equilibrium", false);
  if (mode == MarketMode::kOngoing) {
    if (!doc.ongoing.has_value())
      throw ConfigError("market-ongoing: the market document lacks chi/v0/lambda/kappa");
    opts.ongoing = *doc.ongoing;
  }

  Point p0(static_cast<std::size_t>(n), 1.0);
  if (cfg.contains("p0")) {
    if (cfg["p0"].is_array()) p0 = cfg["p0"].get<std::vector<double>>();
    else if (cfg["p0"].get<std::string>() != "ones") throw ConfigError("p0: expected an array or \"ones\"");
  }

  TatonnementResult res;
  try {
    res = run_tatonnement(market, mode, p0, opts);
  } catch (const RunAborted& abort) {
    std::cerr << "run aborted: " << abort.what() << "\n";
    return abort.reason == RunAborted::Reason::kWarehouseBound ? kWarehouseBreach : kNoConvergence;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  write_trace_csv_file((out / "trace.csv").string(), res.trace);
  if (res.monitored) write_text(out / "monitor.json", monitor_report_json(res.monitor));

  const double z_tol = cfg.value("z_tolerance", 1e-6);
  const std::size_t violations =
      !res.monitored ? 0
                     : res.monitor.update_violations.size() + res.monitor.gap_violations.size() +
                           res.monitor.conditions.a1_failures + res.monitor.conditions.a3_failures +
                           res.monitor.conditions.a4_failures;

  json summary;
  summary["command"] = mode == MarketMode::kCes        ? "market-ces"
                       : mode == MarketMode::kLeontief ? "market-leontief"
                                                       : "market-ongoing";
  summary["final_prices"] = res.final_state.p;
  summary["max_abs_z"] = res.max_abs_z;
  summary["max_abs_v"] = res.max_abs_v;
  summary["events"] = res.trace.size();
  summary["price_upper_bound"] = res.price_upper_bound;
  summary["monitor_violations"] = violations;
  if (res.oracle.has_value()) {
    summary["equilibrium_prices"] = res.oracle->p_star;
    summary["oracle_converged"] = res.oracle->converged;
    double drift = 0.0;
    for (std::size_t j = 0; j < p0.size(); ++j) {
      const double rel = std::abs(res.final_state.p[j] - res.oracle->p_star[j]) /
                         std::max(1e-30, std::abs(res.oracle->p_star[j]));
      drift = std::max(drift, rel);
    }
    summary["max_rel_price_error"] = drift;
  }
  // Fitted decay: shifted potential when the oracle is available, otherwise
  // the trailing |z| trend is left to offline analysis.
  if (res.oracle.has_value() && res.oracle->converged && res.trace.horizon >= 10.0) {
    MarketPotential phi(market);
    const double offset = market_potential(*market, res.oracle->p_star);
    try {
      const auto samples = phi_at_integer_times(res.trace, phi, offset);
      const FitResult fit = fit_rate(samples, FitMode::kLinear);
      summary["fitted_decay"] = fit.delta;
    } catch (const std::invalid_argument&) {
      summary["fitted_decay"] = nullptr;
    }
  }
  if (!res.lyapunov_series.empty()) {
    summary["lyapunov_final"] = res.lyapunov_series.back();
    summary["lyapunov_initial"] = res.lyapunov_series.front();
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  emit_summary(summary, args);

  if (res.max_abs_z > z_tol) return kNoConvergence;
  if (violations > 0) return kMonitorViolations;
  return kOk;
}

// --------------------------------------------------------------- verify --

int cmd_verify(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {"schema", "trace", "objective", "params"}, "config");
  const fs::path base = fs::path(args.config_path).parent_path();
  if (!cfg.contains("trace") || !cfg.contains("objective")) throw ConfigError("config: needs trace and objective");

  const fs::path trace_path = resolve(base, cfg["trace"].get<std::string>());
  if (!fs::exists(trace_path)) throw ConfigError("missing trace file: " + trace_path.string());

  Trace trace;
  try {
    trace = read_trace_csv_file(trace_path.string());
  } catch (const std::runtime_error& e) {
    std::cerr << "trace parse failed: " << e.what() << "\n";
    return kConfigError;
  }

  const json& osec = cfg["objective"];
  check_keys(osec, {"type", "matrix", "rhs", "f", "market"}, "objective");
  const std::string type = osec.value("type", "");

  std::unique_ptr<Objective> objective;
  std::shared_ptr<const FisherMarket> market;
  double phi_offset = 0.0;
  bool quadratic = false;
  if (type == "spd") {
    const Eigen::MatrixXd a = read_matrix_market_file(resolve(base, osec["matrix"].get<std::string>()).string());
    const auto rhs = read_vector_file(resolve(base, osec["rhs"].get<std::string>()).string());
    Eigen::VectorXd b(static_cast<long>(rhs.size()));
    for (std::size_t i = 0; i < rhs.size(); ++i) b(static_cast<long>(i)) = rhs[i];
    SpdProblem sp = SpdProblem::from(a, b);
    phi_offset = sp.minimum_value();
    objective = std::make_unique<SpdObjective>(std::move(sp));
    quadratic = true;
  } else if (type == "composite") {
    const Eigen::MatrixXd a = read_matrix_market_file(resolve(base, osec["matrix"].get<std::string>()).string());
    const auto rhs = read_vector_file(resolve(base, osec["rhs"].get<std::string>()).string());
    Eigen::VectorXd b(static_cast<long>(rhs.size()));
    for (std::size_t i = 0; i < rhs.size(); ++i) b(static_cast<long>(i)) = rhs[i];
    CompositeProblem cp{a, b, {}};
    cp.fs = osec.contains("f") ? parse_univariates(osec["f"], cp.dim())
                               : std::vector<Univariate>(static_cast<std::size_t>(cp.dim()), Univariate::zero());
    objective = std::make_unique<CompositeObjective>(std::move(cp));
    quadratic = true;
  } else if (type == "ces" || type == "leontief") {
    const MarketDocument doc = load_market_json_file(resolve(base, osec["market"].get<std::string>()).string());
    if (doc.kind != type) throw ConfigError("objective: market kind mismatch");
    market = doc.instantiate();
    objective = std::make_unique<MarketPotential>(market);
  } else {
    throw ConfigError("objective: unknown type '" + type + "'");
  }

  // Structural validation first; replay mismatches are parse-grade errors.
  const ViolationReport structural = validate_trace(trace);
  if (structural.count(ViolationKind::kReplay) > 0) {
    std::cerr << "replay mismatch:\n" << structural.summary() << "\n";
    return kConfigError;
  }

  ControlParams params;
  const json psec = cfg.value("params", json("auto"));
  if (psec.is_string() && psec.get<std::string>() == "auto") {
    if (quadratic) {
      // gamma_bar realized from the trace
      std::vector<double> gbar(static_cast<std::size_t>(objective->dim()), 0.0);
      for (const auto& ev : trace.events())
        gbar[static_cast<std::size_t>(ev.coord)] = std::max(gbar[static_cast<std::size_t>(ev.coord)], ev.gamma);
      Eigen::MatrixXd cap(objective->dim(), objective->dim());
      const CoordBox degen = CoordBox::degenerate(trace.initial_point, 0);
      for (int j = 0; j < objective->dim(); ++j)
        for (int k = 0; k < objective->dim(); ++k) cap(j, k) = objective->hessian_bound(j, k, degen);
      params = quadratic_control_params(cap, gbar);
    } else {
      params = market_control_params();
    }
  } else {
    check_keys(psec, {"alpha", "eps_f", "eps_b", "xi"}, "params");
    const XiPolicy xi = psec.value("xi", "one") == std::string("price_ratio") ? XiPolicy::kPriceRatio
                                                                              : XiPolicy::kConstantOne;
    params = default_constants(psec.value("alpha", 2.0), psec.value("eps_f", 0.01), psec.value("eps_b", 0.01), xi);
  }

  MonitorResult monitor;
  try {
    monitor = run_monitor(trace, *objective, params, phi_offset);
  } catch (const std::runtime_error& e) {
    std::cerr << "monitor replay failed: " << e.what() << "\n";
    return kConfigError;
  }

  json summary;
  summary["command"] = "verify";
  summary["events"] = trace.size();
  summary["structural_violations"] = structural.violations.size();
  summary["update_violations"] = monitor.update_violations.size();
  summary["gap_violations"] = monitor.gap_violations.size();
  summary["a1_failures"] = monitor.conditions.a1_failures;
  summary["a3_failures"] = monitor.conditions.a3_failures;
  summary["a4_failures"] = monitor.conditions.a4_failures;
  // Decay fit against the objective's minimum: exact for the quadratic
  // families, the reference-equilibrium level for markets.
  double fit_offset = phi_offset;
  bool have_offset = quadratic;
  if (market) {
    const EquilibriumResult eq = equilibrium_oracle(*market, trace.initial_point);
    if (eq.converged) {
      fit_offset = market_potential(*market, eq.p_star);
      have_offset = true;
    }
  }
  if (have_offset) {
    try {
      const FitResult fit = fit_rate(phi_at_integer_times(trace, *objective, fit_offset), FitMode::kLinear);
      summary["fitted_decay"] = fit.delta;
    } catch (const std::invalid_argument&) {
      summary["fitted_decay"] = nullptr;
    }
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  write_text(out / "monitor.json", monitor_report_json(monitor));
  emit_summary(summary, args);

  const bool clean = structural.empty() && monitor.clean();
  return clean ? kOk : kMonitorViolations;
}

// --------------------------------------------------------------- report --

int cmd_report(const std::string& monitor_path, bool json_out) {
  std::ifstream in(monitor_path);
  if (!in) throw ConfigError("cannot open monitor report: " + monitor_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("monitor report parse error: ") + e.what());
  }
  if (!doc.contains("summary")) throw ConfigError("monitor report lacks a summary");
  if (json_out) {
    std::cout << doc["summary"].dump(2) << "\n";
    return kOk;
  }
  const json& s = doc["summary"];
  std::cout << "events:             " << s.value("events", 0) << "\n";
  std::cout << "update violations:  " << s.value("update_violations", 0) << "\n";
  std::cout << "gap violations:     " << s.value("gap_violations", 0) << "\n";
  std::cout << "A1/A3/A4 failures:  " << s.value("a1_failures", 0) << "/" << s.value("a3_failures", 0) << "/"
            << s.value("a4_failures", 0) << "\n";
  std::cout << "truncated events:   " << s.value("truncated_events", 0) << "\n";
  if (s.contains("phi_final")) std::cout << "phi final:          " << s["phi_final"].dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous gradient descent simulator and potential monitor"};
  app.require_subcommand(1);

  CommonArgs solve_args, composite_args, ces_args, leo_args, ongoing_args, verify_args;
  std::string report_path;
  bool report_json = false;

  add_common(app.add_subcommand("solve-spd", "solve A p = b by asynchronous gradient descent"), solve_args);
  add_common(app.add_subcommand("solve-composite", "minimize sum f_i(p_i) + 1/2 ||Ap-b||^2"), composite_args);
  add_common(app.add_subcommand("market-ces", "asynchronous tatonnement in a complementary-CES market"), ces_args);
  add_common(app.add_subcommand("market-leontief", "asynchronous tatonnement in a Leontief market"), leo_args);
  add_common(app.add_subcommand("market-ongoing", "warehouse-steered tatonnement (ongoing market)"), ongoing_args);
  add_common(app.add_subcommand("verify", "replay a trace and run the potential monitor"), verify_args);
  auto* report_cmd = app.add_subcommand("report", "summarize a monitor JSON report");
  report_cmd->add_option("monitor", report_path, "monitor.json path")->required();
  report_cmd->add_flag("--json", report_json, "print the summary as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve-spd")) return cmd_solve(solve_args, false);
    if (app.got_subcommand("solve-composite")) return cmd_solve(composite_args, true);
    if (app.got_subcommand("market-ces")) return cmd_market(ces_args, MarketMode::kCes);
    if (app.got_subcommand("market-leontief")) return cmd_market(leo_args, MarketMode::kLeontief);
    if (app.got_subcommand("market-ongoing")) return cmd_market(ongoing_args, MarketMode::kOngoing);
    if (app.got_subcommand("verify")) return cmd_verify(verify_args);
    if (app.got_subcommand("report")) return cmd_report(report_path, report_json);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
