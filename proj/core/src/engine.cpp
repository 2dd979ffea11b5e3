#include "agdlab/engine.hpp"

#include <cmath>
#include <sstream>

#include "agdlab/logging.hpp"
#include "agdlab/rng.hpp"

namespace agdlab {

StepSizeRule StepSizeRule::constant(std::vector<double> gammas, double alpha) {
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g))
      throw std::invalid_argument("StepSizeRule: gamma values must be positive and finite");
  }
  StepSizeRule rule;
  rule.constant_per_coord = std::move(gammas);
  rule.alpha = alpha;
  return rule;
}

StepSizeRule StepSizeRule::from_callback(Callback cb, double alpha) {
  if (!cb) throw std::invalid_argument("StepSizeRule: empty callback");
  StepSizeRule rule;
  rule.callback = std::move(cb);
  rule.alpha = alpha;
  return rule;
}

double StepSizeRule::gamma(int j, double t, const Point& view, double g_tilde) const {
  double g;
  if (callback) {
    g = callback(j, t, view, g_tilde);
  } else {
    if (j < 0 || j >= static_cast<int>(constant_per_coord.size()))
      throw std::invalid_argument("StepSizeRule: coordinate out of range");
    g = constant_per_coord[static_cast<std::size_t>(j)];
  }
  if (!(g > 0.0) || !std::isfinite(g)) throw std::runtime_error("StepSizeRule: nonpositive gamma");
  return g;
}

double compute_update(double g_tilde, double gamma, double delta_t) {
  if (!(gamma > 0.0)) throw std::invalid_argument("compute_update: gamma must be positive");
  // 1e-9 absorbs rounding of times like r - u; anything larger is a
  // schedule violation.
  if (!(delta_t > 0.0) || delta_t > 1.0 + 1e-9)
    throw std::invalid_argument("compute_update: delta_t outside (0, 1] is a schedule violation");
  return compute_update_unchecked(g_tilde, gamma, delta_t);
}

Trace run(const RunConfig& config) {
  if (config.objective == nullptr) throw std::invalid_argument("run: missing objective");
  const Objective& obj = *config.objective;
  const int n = obj.dim();
  if (static_cast<int>(config.p0.size()) != n) throw std::invalid_argument("run: p0 dimension mismatch");
  if (!obj.in_domain(config.p0)) throw std::invalid_argument("run: p0 outside objective domain");

  Schedule sched = generate_schedule(config.schedule, n, config.horizon, config.schedule_seed);
  const auto events = sched.merged();

  Trace trace;
  trace.initial_point = config.p0;
  trace.horizon = config.horizon;
  trace.seed = config.schedule_seed;
  trace.problem_tag = config.problem_tag.empty() ? obj.name() : config.problem_tag;
  trace.schedule_tag = sched.policy_tag;
  trace.staleness_tag = config.staleness.tag();

  Rng view_rng(Rng::mix(config.staleness.seed, 0x5741u));

  Point p = config.p0;
  std::vector<double> tau(static_cast<std::size_t>(n), 0.0);
  double t_prev = 0.0;
  std::int64_t seq = 0;

  for (const auto& [t, j] : events) {
    const auto js = static_cast<std::size_t>(j);
    if (config.hooks.on_advance) config.hooks.on_advance(t_prev, t, p);

    CoordBox box = window_box(trace, j, tau[js], t, p[js]);
    Point at_tau(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      at_tau[static_cast<std::size_t>(k)] = trace.value_before_time(k, tau[js]);
    at_tau[js] = p[js];

    Point view = stale_view(config.staleness, box, p, at_tau, obj, j, view_rng);

    double g_tilde;
    if (config.gradient_source) {
      auto cached = config.gradient_source(view, j);
      g_tilde = cached.has_value() ? *cached : obj.grad_coord(view, j);
    } else {
      g_tilde = obj.grad_coord(view, j);
    }
    const double g_fresh = obj.grad_coord(p, j);
    const double gamma = config.step.gamma(j, t, view, g_tilde);
    const double dt = t - tau[js];
    const double dp = compute_update(g_tilde, gamma, dt);

    UpdateEvent ev;
    ev.seq = seq;
    ev.time = t;
    ev.coord = j;
    ev.tau = tau[js];
    ev.view = std::move(view);
    ev.g_tilde = g_tilde;
    ev.g_fresh = g_fresh;
    ev.gamma = gamma;
    ev.delta_p = dp;
    ev.value_before = p[js];
    p[js] += dp;
    ev.value_after = p[js];

    if (!obj.in_domain(p)) {
      std::ostringstream msg;
      msg << "run aborted at event " << seq << ": point left objective domain (coordinate " << j << ")";
      throw RunAborted(RunAborted::Reason::kDomain, seq, msg.str());
    }
    ev.phi_after = obj.value(p);

    if (config.hooks.on_event) config.hooks.on_event(ev, p);
    trace.push(std::move(ev));

    tau[js] = t;
    t_prev = t;
    ++seq;
    if ((seq & 0xfff) == 0) log_debug("run: %lld events, t=%.3f", static_cast<long long>(seq), t);
  }
  return trace;
}

Trace run_synchronous_baseline(const Objective& obj, const Point& p0, const std::vector<double>& gamma_sync,
                               int rounds, std::string problem_tag) {
  const int n = obj.dim();
  if (static_cast<int>(gamma_sync.size()) != n)
    throw std::invalid_argument("run_synchronous_baseline: gamma dimension mismatch");
  for (double g : gamma_sync)
    if (!(g > 0.0)) throw std::invalid_argument("run_synchronous_baseline: gamma must be positive");
  if (rounds < 0) throw std::invalid_argument("run_synchronous_baseline: negative rounds");
  if (!obj.in_domain(p0)) throw std::invalid_argument("run_synchronous_baseline: p0 outside domain");

  Trace trace;
  trace.initial_point = p0;
  trace.horizon = static_cast<double>(rounds);
  trace.problem_tag = problem_tag.empty() ? obj.name() : std::move(problem_tag);
  trace.schedule_tag = "synchronous_baseline";
  trace.staleness_tag = "fresh";

  Point p = p0;
  std::vector<double> tau(static_cast<std::size_t>(n), 0.0);
  std::int64_t seq = 0;

  for (int r = 1; r <= rounds; ++r) {
    for (int j = 0; j < n; ++j) {
      const auto js = static_cast<std::size_t>(j);
      // Jittered ordering inside the round; gaps stay exactly one unit.
      const double t = static_cast<double>(r) - 1e-9 * static_cast<double>(n - j);
      const double g = obj.grad_coord(p, j);
      const double dt = t - tau[js];
      const double dp = compute_update(g, gamma_sync[js], dt);

      UpdateEvent ev;
      ev.seq = seq++;
      ev.time = t;
      ev.coord = j;
      ev.tau = tau[js];
      ev.view = p;
      ev.g_tilde = g;
      ev.g_fresh = g;
      ev.gamma = gamma_sync[js];
      ev.delta_p = dp;
      ev.value_before = p[js];
      p[js] += dp;
      ev.value_after = p[js];
      if (!obj.in_domain(p)) {
        throw RunAborted(RunAborted::Reason::kDomain, ev.seq,
                         "synchronous baseline left objective domain");
      }
      ev.phi_after = obj.value(p);
      trace.push(std::move(ev));
      tau[js] = t;
    }
  }
  return trace;
}

}  // namespace agdlab
