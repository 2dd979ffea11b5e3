#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "agdlab/objective.hpp"
#include "agdlab/trace.hpp"

namespace agdlab {

/// Weights attached to cross-coordinate Hessian terms. Quadratic problems
/// use constant 1; markets use the price ratio p_k/p_j at the update.
enum class XiPolicy { kConstantOne, kPriceRatio };

/// alpha, eps_F, eps_B and the derived amortization constants c1, c2
/// governing the potential.
struct ControlParams {
  double alpha = 2.0;
  double eps_f = 0.0;
  double eps_b = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  XiPolicy xi = XiPolicy::kConstantOne;

  /// 1/alpha + 2 eps_B + 2 eps_F < 1, alpha >= 2, eps > 0.
  void validate() const;
};

/// c1 = (1+4 eps_B)^-1 min{1 - 1/alpha - 2 eps_B - 2 eps_F, 1/4},
/// c2 = 1 - c1 (2 + 8 eps_B). Rejects parameters violating the constraint.
ControlParams default_constants(double alpha, double eps_f, double eps_b,
                                XiPolicy xi = XiPolicy::kConstantOne);

/// Per-matrix constants for a constant-Hessian objective: alpha is set so
/// the per-coordinate quadratic bound is tight, eps_F = eps_B fill the
/// cross-coupling slack. `hess_cap(j,k)` holds |H_jk| (diagonal includes any
/// separable curvature bound).
ControlParams quadratic_control_params(const Eigen::MatrixXd& hess_cap, const std::vector<double>& gamma);

/// alpha = 6, eps_F = 1/6, eps_B = 1/5, price-ratio xi.
ControlParams market_control_params();

struct SeriesEvent {
  std::int64_t seq = 0;
  double time = 0.0;
  int coord = 0;
  double phi_before = 0.0;
  double phi_after = 0.0;
  double potential_before = 0.0;
  double potential_after = 0.0;
  double integral_term = 0.0;    // c1-weighted integral sum right after the event
  double double_sum_term = 0.0;  // bracketed double sum right after the event
  bool truncated = false;        // a new window term runs past the horizon
  double min_bracket = 2.0;      // min of 2 - c2 (t - beta) over live full windows
};

/// Amortized potential evaluated just before and just after every event of a
/// finished trace. phi values are shifted by `phi_offset` (the minimum of
/// phi, when known) so the decay laws read against zero.
struct PotentialSeries {
  ControlParams params;
  double phi_offset = 0.0;
  double phi0 = 0.0;  // shifted phi(p0)
  std::vector<double> gamma_bar;
  std::vector<SeriesEvent> events;
};

struct MonotonicViolation {
  std::int64_t seq = 0;
  double before = 0.0;
  double after = 0.0;
};

/// Empty iff potential_before >= potential_after - tol at every event,
/// tol = 1e-9 max(1, |potential_before|).
std::vector<MonotonicViolation> check_update_monotonic(const PotentialSeries& series);

/// Empty iff the potential did not grow across any inter-event gap.
std::vector<MonotonicViolation> check_gap_monotonic(const PotentialSeries& series);

/// Floor factor relating the potential to the objective:
/// Phi >= factor * phi at event boundaries whenever
/// 2 - c2 >= c1 (2 + 8 eps_B).
double potential_floor_factor(const ControlParams& params);

struct ConditionRow {
  std::int64_t seq = 0;
  double time = 0.0;
  int coord = 0;
  bool a1_ok = true;
  double a1_margin = 0.0;  // max over sampled segment of lhs - (gamma/alpha) d^2
  double a3_lhs = 0.0;
  double a3_rhs = 0.0;
  double a4_lhs = 0.0;
  double a4_rhs = 0.0;
};

struct ConditionReport {
  std::vector<ConditionRow> rows;
  std::size_t a1_failures = 0;
  std::size_t a3_failures = 0;
  std::size_t a4_failures = 0;

  bool all_ok() const { return a1_failures + a3_failures + a4_failures == 0; }
};

struct MonitorResult {
  PotentialSeries series;
  ConditionReport conditions;
  std::vector<MonotonicViolation> update_violations;
  std::vector<MonotonicViolation> gap_violations;

  bool clean() const {
    return update_violations.empty() && gap_violations.empty() && conditions.all_ok();
  }
};

/// One offline pass over a finished trace computing the potential series and
/// the per-event condition checks (they share the window boxes).
MonitorResult run_monitor(const Trace& trace, const Objective& obj, const ControlParams& params,
                          double phi_offset = 0.0);

PotentialSeries potential_series(const Trace& trace, const Objective& obj, const ControlParams& params,
                                 double phi_offset = 0.0);

ConditionReport check_conditions(const Trace& trace, const Objective& obj, const ControlParams& params);

struct GradientErrorCheck {
  double lhs2 = 0.0;
  double rhs2 = 0.0;
  bool ok2 = true;
  double lhs3 = 0.0;
  double rhs3 = 0.0;
  bool ok3 = true;
  int interleaved = 0;       // m
  bool exact_extremes = true; // corner rule vs sampled search (advisory)
  double g_max = 0.0;
  double g_min = 0.0;
};

/// Checks the two gradient-error inequalities over an inter-update window
/// (t1, t2) of coordinate j. `eta` holds one positive weight per interleaved
/// update (a single value broadcasts).
GradientErrorCheck check_gradient_error_bound(const Trace& trace, const Objective& obj, int j, double t1,
                                              double t2, const std::vector<double>& eta, double mu,
                                              std::uint64_t sample_seed = 1);

/// Exact for affine gradients; otherwise corner enumeration (n <= 12) or
/// 1e3 box samples, flagged non-exact.
GradRange box_gradient_extremes(const Objective& obj, int j, const CoordBox& box,
                                std::uint64_t sample_seed = 1, bool* exact = nullptr);

enum class FitMode { kSublinear, kLinear };

struct FitResult {
  FitMode mode = FitMode::kLinear;
  double delta = 0.0;     // linear: phi(t) <= (1-delta)^t phi(0) holds
  double constant = 0.0;  // sublinear: phi(t) <= C / t holds
  double residual = 0.0;
  int samples_used = 0;
};

/// Envelope-respecting rate fit over phi values at integer times. The series
/// is truncated at the first value <= 1e-14; at least 10 samples required.
FitResult fit_rate(const std::vector<double>& phi_values, FitMode mode);

/// phi(p(t)) - offset sampled at t = 0, 1, ..., floor(horizon).
std::vector<double> phi_at_integer_times(const Trace& trace, const Objective& obj, double phi_offset = 0.0);

/// JSON document with per-event records and the summary; schema documented
/// in the repository README.
std::string monitor_report_json(const MonitorResult& result, bool include_events = true);

}  // namespace agdlab
