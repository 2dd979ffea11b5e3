#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agdlab/objective.hpp"
#include "agdlab/point.hpp"
#include "agdlab/schedule.hpp"
#include "agdlab/staleness.hpp"
#include "agdlab/trace.hpp"

namespace agdlab {

/// The reciprocal step size gamma_j^t: either one constant per coordinate or
/// a callback evaluated at the update. `alpha` is the declared curvature
/// multiplier (>= 2) the rule was derived for.
struct StepSizeRule {
  using Callback = std::function<double(int j, double t, const Point& view, double g_tilde)>;

  std::vector<double> constant_per_coord;  // empty when callback is used
  Callback callback;
  double alpha = 2.0;

  static StepSizeRule constant(std::vector<double> gammas, double alpha = 2.0);
  static StepSizeRule from_callback(Callback cb, double alpha);

  double gamma(int j, double t, const Point& view, double g_tilde) const;
};

/// Raised when a run cannot continue (domain violation, model breach).
class RunAborted : public std::runtime_error {
 public:
  enum class Reason { kDomain, kWarehouseBound, kCapacity, kPriceBound };

  RunAborted(Reason reason, std::int64_t event_index, const std::string& what)
      : std::runtime_error(what), reason(reason), event_index(event_index) {}

  Reason reason;
  std::int64_t event_index;
};

/// Extension points for layered state (warehouses, gradient caches).
struct EngineHooks {
  /// Called before each event with the span of constant state [t_prev, t].
  std::function<void(double t_prev, double t, const Point& p)> on_advance;
  /// Called after each event is recorded; may decorate the event in place.
  std::function<void(UpdateEvent& ev, const Point& p)> on_event;
};

struct RunConfig {
  const Objective* objective = nullptr;
  SchedulePolicy schedule;
  std::uint64_t schedule_seed = 0;
  StalenessPolicy staleness;
  StepSizeRule step;
  Point p0;
  double horizon = 0.0;
  std::string problem_tag;

  /// Optional gradient source consulted before objective->grad_coord
  /// (used by the composite solver's incremental cache).
  std::function<std::optional<double>(const Point& view, int j)> gradient_source;
  EngineHooks hooks;
};

/// The update increment -g_tilde / gamma * delta_t. Throws when the
/// preconditions (gamma > 0, 0 < delta_t <= 1) fail.
double compute_update(double g_tilde, double gamma, double delta_t);

/// Same arithmetic without precondition checks (trace validation path).
inline double compute_update_unchecked(double g_tilde, double gamma, double delta_t) {
  return -g_tilde / gamma * delta_t;
}

/// Executes asynchronous gradient descent over the generated schedule:
/// at each event, builds the stale view, evaluates the gradient there and
/// applies p_j <- p_j - (g_tilde/gamma) * dt. Deterministic in the seeds.
Trace run(const RunConfig& config);

/// All coordinates updated with fresh gradients once per unit time (jittered
/// ordering); trace format identical to run().
Trace run_synchronous_baseline(const Objective& obj, const Point& p0, const std::vector<double>& gamma_sync,
                               int rounds, std::string problem_tag = "");

}  // namespace agdlab
