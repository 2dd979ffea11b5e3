#include "agdlab/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "agdlab/rng.hpp"
#include "json.hpp"

namespace agdlab {

void ControlParams::validate() const {
  if (!(alpha >= 2.0)) throw std::invalid_argument("ControlParams: alpha must be >= 2");
  if (!(eps_f > 0.0) || !(eps_b > 0.0))
    throw std::invalid_argument("ControlParams: eps_F and eps_B must be positive");
  if (!(1.0 / alpha + 2.0 * eps_b + 2.0 * eps_f < 1.0))
    throw std::invalid_argument("ControlParams: 1/alpha + 2 eps_B + 2 eps_F must be < 1");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("ControlParams: c1, c2 must be positive");
}

ControlParams default_constants(double alpha, double eps_f, double eps_b, XiPolicy xi) {
  ControlParams p;
  p.alpha = alpha;
  p.eps_f = eps_f;
  p.eps_b = eps_b;
  p.xi = xi;
  const double slack = 1.0 - 1.0 / alpha - 2.0 * eps_b - 2.0 * eps_f;
  p.c1 = std::min(slack, 0.25) / (1.0 + 4.0 * eps_b);
  p.c2 = 1.0 - p.c1 * (2.0 + 8.0 * eps_b);
  p.validate();
  return p;
}

ControlParams quadratic_control_params(const Eigen::MatrixXd& hess_cap, const std::vector<double>& gamma) {
  const auto n = hess_cap.rows();
  if (hess_cap.cols() != n) throw std::invalid_argument("quadratic_control_params: matrix not square");
  if (static_cast<long>(gamma.size()) != n)
    throw std::invalid_argument("quadratic_control_params: gamma dimension mismatch");
  double inv_alpha = 0.0;
  double eps = 0.0;
  for (long j = 0; j < n; ++j) {
    const double g = gamma[static_cast<std::size_t>(j)];
    if (!(g > 0.0)) throw std::invalid_argument("quadratic_control_params: gamma must be positive");
    if (!(hess_cap(j, j) > 0.0))
      throw std::invalid_argument("quadratic_control_params: diagonal curvature must be positive");
    inv_alpha = std::max(inv_alpha, hess_cap(j, j) / (2.0 * g));
    double off = 0.0;
    for (long k = 0; k < n; ++k)
      if (k != j) off += std::abs(hess_cap(j, k));
    eps = std::max(eps, off / g);
  }
  eps = std::max(eps, 1e-12);
  return default_constants(1.0 / inv_alpha, eps, eps, XiPolicy::kConstantOne);
}

ControlParams market_control_params() {
  return default_constants(6.0, 1.0 / 6.0, 1.0 / 5.0, XiPolicy::kPriceRatio);
}

double potential_floor_factor(const ControlParams& params) {
  return 1.0 - 2.0 * params.c1 * (1.0 + 4.0 * params.eps_b);
}

namespace {

struct WindowEntry {
  double w = 0.0;      // xi * H * dp^2/dt
  double beta = 0.0;   // event time
  int k = 0;           // coordinate updated by the event
  double inv_xi = 1.0; // 1/xi for the A4 max
  bool truncated = false;
};

struct BoxSnapshot {
  CoordBox box;
  bool truncated = false;
};

// Shared-left-endpoint sweep: boxes P_m(t, sigma_m; p_m) for all m != c with
// one forward walk over the event list.
std::vector<BoxSnapshot> future_boxes(const Trace& trace, std::size_t event_index, const Point& p_before,
                                      const Point& p_after, int c) {
  const int n = trace.dim();
  const auto& evs = trace.events();
  std::vector<BoxSnapshot> out(static_cast<std::size_t>(n));
  std::vector<double> lo = p_after;
  std::vector<double> hi = p_after;
  // Both the pre- and post-update values of c occur at the window start.
  lo[static_cast<std::size_t>(c)] = std::min(p_before[static_cast<std::size_t>(c)], p_after[static_cast<std::size_t>(c)]);
  hi[static_cast<std::size_t>(c)] = std::max(p_before[static_cast<std::size_t>(c)], p_after[static_cast<std::size_t>(c)]);

  std::vector<char> done(static_cast<std::size_t>(n), 0);
  done[static_cast<std::size_t>(c)] = 1;
  int remaining = n - 1;

  auto snapshot = [&](int m, bool truncated) {
    BoxSnapshot snap;
    snap.box.lo = lo;
    snap.box.hi = hi;
    snap.box.pinned_coord = m;
    snap.box.pinned_value = p_after[static_cast<std::size_t>(m)];
    snap.box.lo[static_cast<std::size_t>(m)] = snap.box.pinned_value;
    snap.box.hi[static_cast<std::size_t>(m)] = snap.box.pinned_value;
    snap.truncated = truncated;
    out[static_cast<std::size_t>(m)] = std::move(snap);
    done[static_cast<std::size_t>(m)] = 1;
    --remaining;
  };

  for (std::size_t e = event_index + 1; e < evs.size() && remaining > 0; ++e) {
    const auto& fut = evs[e];
    const auto ms = static_cast<std::size_t>(fut.coord);
    if (!done[ms]) snapshot(fut.coord, false);
    lo[ms] = std::min(lo[ms], fut.value_after);
    hi[ms] = std::max(hi[ms], fut.value_after);
  }
  for (int m = 0; m < n && remaining > 0; ++m) {
    if (!done[static_cast<std::size_t>(m)]) snapshot(m, true);
  }
  return out;
}

struct PassConfig {
  bool want_conditions = true;
};

void monitor_pass(const Trace& trace, const Objective& obj, const ControlParams& params, double phi_offset,
                  const PassConfig& cfg, PotentialSeries* series, ConditionReport* conds) {
  params.validate();
  const int n = trace.dim();
  const auto& evs = trace.events();
  if (evs.empty()) throw std::invalid_argument("monitor: empty trace");
  if (trace.horizon < evs.back().time) throw std::invalid_argument("monitor: unfinished trace");
  if (obj.dim() != n) throw std::invalid_argument("monitor: objective dimension mismatch");

  std::vector<double> gbar(static_cast<std::size_t>(n), 0.0);
  for (const auto& ev : evs)
    gbar[static_cast<std::size_t>(ev.coord)] = std::max(gbar[static_cast<std::size_t>(ev.coord)], ev.gamma);
  for (int j = 0; j < n; ++j) {
    if (!(gbar[static_cast<std::size_t>(j)] > 0.0))
      throw std::invalid_argument("monitor: a coordinate is never updated in the trace");
  }

  if (series != nullptr) {
    series->params = params;
    series->phi_offset = phi_offset;
    series->gamma_bar = gbar;
    series->phi0 = obj.value(trace.initial_point) - phi_offset;
    series->events.clear();
    series->events.reserve(evs.size());
  }

  Point p = trace.initial_point;
  std::vector<double> integral(static_cast<std::size_t>(n), 0.0);
  std::vector<std::vector<WindowEntry>> windows(static_cast<std::size_t>(n));
  std::vector<double> win_w(static_cast<std::size_t>(n), 0.0);
  std::vector<double> win_wb(static_cast<std::size_t>(n), 0.0);
  double s1 = 0.0;
  double s2 = 0.0;
  double t_prev = 0.0;

  const bool const_hessian = obj.constant_hessian();

  for (std::size_t idx = 0; idx < evs.size(); ++idx) {
    const UpdateEvent& ev = evs[idx];
    const int c = ev.coord;
    const auto cs = static_cast<std::size_t>(c);
    const double t = ev.time;
    const double dt = ev.delta_t();

    // Advance the integral terms across the constant stretch [t_prev, t].
    const Point grad = obj.gradient(p);
    for (int j = 0; j < n; ++j) {
      const auto js = static_cast<std::size_t>(j);
      integral[js] += grad[js] * grad[js] / gbar[js] * (t - t_prev);
    }

    if (std::abs(p[cs] - ev.value_before) > 1e-12 * std::max(1.0, std::abs(ev.value_before))) {
      std::ostringstream msg;
      msg << "monitor: replay mismatch at event " << ev.seq;
      throw std::runtime_error(msg.str());
    }

    const double phi_raw_before = obj.value(p);
    const double phi_before = phi_raw_before - phi_offset;
    const double sum_i_before = std::accumulate(integral.begin(), integral.end(), 0.0);
    const double ds_before = 2.0 * s1 - params.c2 * (t * s1 - s2);
    const double pot_before = phi_before - params.c1 * sum_i_before + ds_before;

    ConditionRow row;
    if (cfg.want_conditions && conds != nullptr) {
      row.seq = ev.seq;
      row.time = t;
      row.coord = c;
      // A1 along the update segment, 11 evenly spaced points.
      const double tol = 1e-9 * std::max(1.0, std::abs(phi_raw_before));
      Point probe = p;
      double margin = -std::numeric_limits<double>::infinity();
      for (int q = 0; q <= 10; ++q) {
        const double x = ev.value_before + (ev.value_after - ev.value_before) * q / 10.0;
        probe[cs] = x;
        const double d = x - ev.value_before;
        const double lhs = obj.value(probe) - phi_raw_before - grad[cs] * d;
        margin = std::max(margin, lhs - ev.gamma / params.alpha * d * d);
      }
      row.a1_margin = margin;
      row.a1_ok = margin <= tol;

      // A4 over the past window (tau_c, t): entries currently live for c.
      row.a4_rhs = params.eps_b * ev.gamma;
      if (!windows[cs].empty()) {
        const CoordBox past_box = window_box(trace, c, ev.tau, t, ev.value_before);
        std::vector<double> max_inv(static_cast<std::size_t>(n), 0.0);
        for (const auto& w : windows[cs])
          max_inv[static_cast<std::size_t>(w.k)] = std::max(max_inv[static_cast<std::size_t>(w.k)], w.inv_xi);
        double lhs = 0.0;
        for (int k = 0; k < n; ++k) {
          const auto ks = static_cast<std::size_t>(k);
          if (max_inv[ks] > 0.0) lhs += max_inv[ks] * obj.hessian_bound(k, c, past_box);
        }
        row.a4_lhs = lhs;
      }
    }

    // Flush c's open windows; their credit was spent by this update.
    s1 -= win_w[cs];
    s2 -= win_wb[cs];
    win_w[cs] = 0.0;
    win_wb[cs] = 0.0;
    windows[cs].clear();

    const double p_c_before = p[cs];
    p[cs] = ev.value_after;
    integral[cs] = 0.0;

    // New window terms: this event enters the open window of every other
    // coordinate; the same boxes feed the A3 sum.
    bool truncated_here = false;
    double a3_lhs = 0.0;
    if (n > 1) {
      std::vector<BoxSnapshot> boxes;
      if (!const_hessian) {
        Point before_pt = p;
        before_pt[cs] = p_c_before;
        boxes = future_boxes(trace, idx, before_pt, p, c);
      }
      const double dp2dt = ev.delta_p * ev.delta_p / dt;
      for (int m = 0; m < n; ++m) {
        if (m == c) continue;
        const auto ms = static_cast<std::size_t>(m);
        double h;
        bool trunc;
        if (const_hessian) {
          h = obj.hessian_bound(c, m, CoordBox::degenerate(p, m));
          trunc = trace.next_event_after(m, t) < 0;
        } else {
          h = obj.hessian_bound(c, m, boxes[ms].box);
          trunc = boxes[ms].truncated;
        }
        const double xi = params.xi == XiPolicy::kPriceRatio ? p[ms] / p_c_before : 1.0;
        a3_lhs += xi * h;
        const double w = xi * h * dp2dt;
        windows[ms].push_back({w, t, c, 1.0 / xi, trunc});
        win_w[ms] += w;
        win_wb[ms] += w * t;
        s1 += w;
        s2 += w * t;
        truncated_here = truncated_here || trunc;
      }
    }

    if (cfg.want_conditions && conds != nullptr) {
      row.a3_lhs = a3_lhs;
      row.a3_rhs = params.eps_f * ev.gamma;
      const double tol3 = 1e-9 * std::max(1.0, row.a3_rhs);
      const double tol4 = 1e-9 * std::max(1.0, row.a4_rhs);
      if (!row.a1_ok) ++conds->a1_failures;
      if (row.a3_lhs > row.a3_rhs + tol3) ++conds->a3_failures;
      if (row.a4_lhs > row.a4_rhs + tol4) ++conds->a4_failures;
      conds->rows.push_back(row);
    }

    if (series != nullptr) {
      const double phi_after = obj.value(p) - phi_offset;
      const double sum_i_after = std::accumulate(integral.begin(), integral.end(), 0.0);
      const double ds_after = 2.0 * s1 - params.c2 * (t * s1 - s2);

      SeriesEvent se;
      se.seq = ev.seq;
      se.time = t;
      se.coord = c;
      se.phi_before = phi_before;
      se.phi_after = phi_after;
      se.potential_before = pot_before;
      se.potential_after = phi_after - params.c1 * sum_i_after + ds_after;
      se.integral_term = params.c1 * sum_i_after;
      se.double_sum_term = ds_after;
      se.truncated = truncated_here;
      double min_bracket = 2.0;
      for (int j = 0; j < n; ++j) {
        const auto& ws = windows[static_cast<std::size_t>(j)];
        if (ws.empty() || ws.front().truncated) continue;
        min_bracket = std::min(min_bracket, 2.0 - params.c2 * (t - ws.front().beta));
      }
      se.min_bracket = min_bracket;
      series->events.push_back(se);
    }

    t_prev = t;
  }
}

}  // namespace

MonitorResult run_monitor(const Trace& trace, const Objective& obj, const ControlParams& params,
                          double phi_offset) {
  MonitorResult result;
  PassConfig cfg;
  cfg.want_conditions = true;
  monitor_pass(trace, obj, params, phi_offset, cfg, &result.series, &result.conditions);
  result.update_violations = check_update_monotonic(result.series);
  result.gap_violations = check_gap_monotonic(result.series);
  return result;
}

PotentialSeries potential_series(const Trace& trace, const Objective& obj, const ControlParams& params,
                                 double phi_offset) {
  PotentialSeries series;
  PassConfig cfg;
  cfg.want_conditions = false;
  monitor_pass(trace, obj, params, phi_offset, cfg, &series, nullptr);
  return series;
}

ConditionReport check_conditions(const Trace& trace, const Objective& obj, const ControlParams& params) {
  ConditionReport report;
  PassConfig cfg;
  cfg.want_conditions = true;
  monitor_pass(trace, obj, params, 0.0, cfg, nullptr, &report);
  return report;
}

std::vector<MonotonicViolation> check_update_monotonic(const PotentialSeries& series) {
  std::vector<MonotonicViolation> out;
  for (const auto& se : series.events) {
    const double tol = 1e-9 * std::max(1.0, std::abs(se.potential_before));
    if (se.potential_after > se.potential_before + tol)
      out.push_back({se.seq, se.potential_before, se.potential_after});
  }
  return out;
}

std::vector<MonotonicViolation> check_gap_monotonic(const PotentialSeries& series) {
  std::vector<MonotonicViolation> out;
  double prev = series.phi0;  // potential at t = 0 equals phi(p0)
  std::int64_t prev_seq = -1;
  for (const auto& se : series.events) {
    const double tol = 1e-9 * std::max(1.0, std::abs(prev));
    if (se.potential_before > prev + tol) out.push_back({prev_seq, prev, se.potential_before});
    prev = se.potential_after;
    prev_seq = se.seq;
  }
  return out;
}

GradRange box_gradient_extremes(const Objective& obj, int j, const CoordBox& box, std::uint64_t sample_seed,
                                bool* exact) {
  if (auto r = obj.grad_extremes(j, box)) {
    if (exact != nullptr) *exact = true;
    return *r;
  }
  if (exact != nullptr) *exact = false;
  std::vector<int> free_coords;
  for (int k = 0; k < box.dim(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (box.lo[ks] < box.hi[ks]) free_coords.push_back(k);
  }
  GradRange range;
  Point probe = box.midpoint();
  range.lo = range.hi = obj.grad_coord(probe, j);
  auto consider = [&](const Point& q) {
    const double g = obj.grad_coord(q, j);
    range.lo = std::min(range.lo, g);
    range.hi = std::max(range.hi, g);
  };
  if (free_coords.size() <= 12) {
    const std::size_t corners = std::size_t{1} << free_coords.size();
    for (std::size_t mask = 0; mask < corners; ++mask) {
      Point q = box.midpoint();
      for (std::size_t b = 0; b < free_coords.size(); ++b) {
        const auto ks = static_cast<std::size_t>(free_coords[b]);
        q[ks] = (mask >> b) & 1 ? box.hi[ks] : box.lo[ks];
      }
      consider(q);
    }
  } else {
    Rng rng(Rng::mix(sample_seed, 0xb0c5u));
    for (int s = 0; s < 1000; ++s) {
      Point q(box.lo.size());
      for (std::size_t k = 0; k < q.size(); ++k)
        q[k] = box.lo[k] == box.hi[k] ? box.lo[k] : rng.uniform(box.lo[k], box.hi[k]);
      q[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
      consider(q);
    }
  }
  return range;
}

GradientErrorCheck check_gradient_error_bound(const Trace& trace, const Objective& obj, int j, double t1,
                                              double t2, const std::vector<double>& eta, double mu,
                                              std::uint64_t sample_seed) {
  if (!(t1 < t2)) throw std::invalid_argument("check_gradient_error_bound: empty interval");
  struct Interleaved {
    int k;
    double beta, dp, dt;
  };
  std::vector<Interleaved> mids;
  for (const auto& ev : trace.events()) {
    if (ev.time <= t1) continue;
    if (ev.time >= t2) break;
    if (ev.coord == j)
      throw std::invalid_argument("check_gradient_error_bound: interval contains an update to j");
    mids.push_back({ev.coord, ev.time, ev.delta_p, ev.delta_t()});
  }
  const int m = static_cast<int>(mids.size());
  std::vector<double> etas;
  if (eta.size() == 1) {
    etas.assign(static_cast<std::size_t>(m), eta[0]);
  } else if (static_cast<int>(eta.size()) == m) {
    etas = eta;
  } else {
    throw std::invalid_argument("check_gradient_error_bound: eta must have one value or one per update");
  }
  for (double e : etas)
    if (!(e > 0.0)) throw std::invalid_argument("check_gradient_error_bound: eta values must be positive");

  const double s_j = trace.value_before_time(j, t2);
  const CoordBox box = window_box(trace, j, t1, t2, s_j);

  GradientErrorCheck out;
  out.interleaved = m;
  const GradRange range = box_gradient_extremes(obj, j, box, sample_seed, &out.exact_extremes);
  out.g_max = range.hi;
  out.g_min = range.lo;

  const int n = trace.dim();
  std::vector<double> bar_eta(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    const auto ks = static_cast<std::size_t>(mids[static_cast<std::size_t>(i)].k);
    const double e = etas[static_cast<std::size_t>(i)];
    bar_eta[ks] = bar_eta[ks] == 0.0 ? e : std::min(bar_eta[ks], e);
  }
  double v1 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (bar_eta[ks] > 0.0) v1 += obj.hessian_bound(k, j, box) / bar_eta[ks];
  }
  double v2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto& mid = mids[static_cast<std::size_t>(i)];
    const CoordBox sub = window_box(trace, j, mid.beta, t2, s_j);
    v2 += etas[static_cast<std::size_t>(i)] * obj.hessian_bound(mid.k, j, sub) * mid.dp * mid.dp / mid.dt;
  }

  const double spread = out.g_max - out.g_min;
  out.lhs2 = std::abs(mu) * spread;
  out.rhs2 = 2.0 * mu * mu * v1 + v2;
  out.lhs3 = spread * spread;
  out.rhs3 = 8.0 * v2 * v1;
  out.ok2 = out.lhs2 <= out.rhs2 + 1e-9 * std::max(1.0, out.rhs2);
  out.ok3 = out.lhs3 <= out.rhs3 + 1e-9 * std::max(1.0, out.rhs3);
  return out;
}

FitResult fit_rate(const std::vector<double>& phi_values, FitMode mode) {
  if (phi_values.size() < 10) throw std::invalid_argument("fit_rate: need at least 10 samples");
  std::size_t used = phi_values.size();
  for (std::size_t t = 0; t < phi_values.size(); ++t) {
    if (phi_values[t] <= 1e-14) {
      used = t;
      break;
    }
  }
  if (used < 2) throw std::invalid_argument("fit_rate: series collapses immediately");

  FitResult out;
  out.mode = mode;
  out.samples_used = static_cast<int>(used);

  if (mode == FitMode::kLinear) {
    // Least squares on log phi, then pull the decay back until the envelope
    // phi(t) <= (1-delta)^t phi(0) holds at every sample.
    double sum_t = 0.0, sum_y = 0.0;
    for (std::size_t t = 0; t < used; ++t) {
      sum_t += static_cast<double>(t);
      sum_y += std::log(phi_values[t]);
    }
    const double mean_t = sum_t / static_cast<double>(used);
    const double mean_y = sum_y / static_cast<double>(used);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < used; ++t) {
      const double dt = static_cast<double>(t) - mean_t;
      num += dt * (std::log(phi_values[t]) - mean_y);
      den += dt * dt;
    }
    const double slope = num / den;
    double delta = 1.0 - std::exp(slope);
    for (std::size_t t = 1; t < used; ++t) {
      const double ratio = std::pow(phi_values[t] / phi_values[0], 1.0 / static_cast<double>(t));
      delta = std::min(delta, 1.0 - ratio);
    }
    out.delta = delta;
    double rss = 0.0;
    for (std::size_t t = 0; t < used; ++t) {
      const double fit = mean_y + slope * (static_cast<double>(t) - mean_t);
      const double r = std::log(phi_values[t]) - fit;
      rss += r * r;
    }
    out.residual = std::sqrt(rss / static_cast<double>(used));
  } else {
    // Envelope-respecting C with phi(t) <= C/t.
    double num = 0.0, den = 0.0, env = 0.0;
    for (std::size_t t = 1; t < used; ++t) {
      const double ft = static_cast<double>(t);
      num += phi_values[t] / ft;
      den += 1.0 / (ft * ft);
      env = std::max(env, ft * phi_values[t]);
    }
    const double c_fit = num / den;
    out.constant = std::max(c_fit, env);
    double rss = 0.0;
    for (std::size_t t = 1; t < used; ++t) {
      const double r = phi_values[t] - out.constant / static_cast<double>(t);
      rss += r * r;
    }
    out.residual = std::sqrt(rss / static_cast<double>(used - 1));
  }
  return out;
}

std::vector<double> phi_at_integer_times(const Trace& trace, const Objective& obj, double phi_offset) {
  const auto t_max = static_cast<long>(std::floor(trace.horizon));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(t_max) + 1);
  Point p = trace.initial_point;
  std::size_t e = 0;
  const auto& evs = trace.events();
  for (long t = 0; t <= t_max; ++t) {
    while (e < evs.size() && evs[e].time <= static_cast<double>(t)) {
      p[static_cast<std::size_t>(evs[e].coord)] = evs[e].value_after;
      ++e;
    }
    out.push_back(obj.value(p) - phi_offset);
  }
  return out;
}

std::string monitor_report_json(const MonitorResult& result, bool include_events) {
  using nlohmann::json;
  const auto& s = result.series;
  json doc;
  doc["schema"] = "agdlab-monitor-v1";
  doc["params"] = {
      {"alpha", s.params.alpha},       {"eps_f", s.params.eps_f}, {"eps_b", s.params.eps_b},
      {"c1", s.params.c1},             {"c2", s.params.c2},
      {"xi", s.params.xi == XiPolicy::kPriceRatio ? "price_ratio" : "one"},
  };
  doc["phi_offset"] = s.phi_offset;
  doc["phi0"] = s.phi0;
  doc["gamma_bar"] = s.gamma_bar;

  json summary;
  summary["events"] = s.events.size();
  summary["update_violations"] = result.update_violations.size();
  summary["gap_violations"] = result.gap_violations.size();
  summary["a1_failures"] = result.conditions.a1_failures;
  summary["a3_failures"] = result.conditions.a3_failures;
  summary["a4_failures"] = result.conditions.a4_failures;
  std::size_t truncated = 0;
  double min_bracket = 2.0;
  for (const auto& se : s.events) {
    if (se.truncated) ++truncated;
    min_bracket = std::min(min_bracket, se.min_bracket);
  }
  summary["truncated_events"] = truncated;
  summary["min_bracket"] = min_bracket;
  if (!s.events.empty()) {
    summary["phi_final"] = s.events.back().phi_after;
    summary["potential_final"] = s.events.back().potential_after;
  }
  doc["summary"] = summary;

  if (include_events) {
    json rows = json::array();
    const bool have_conditions = result.conditions.rows.size() == s.events.size();
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      const auto& se = s.events[i];
      json r;
      r["seq"] = se.seq;
      r["time"] = se.time;
      r["coord"] = se.coord;
      r["phi_before"] = se.phi_before;
      r["phi_after"] = se.phi_after;
      r["potential_before"] = se.potential_before;
      r["potential_after"] = se.potential_after;
      r["integral_term"] = se.integral_term;
      r["double_sum_term"] = se.double_sum_term;
      r["truncated"] = se.truncated;
      if (have_conditions) {
        const auto& cr = result.conditions.rows[i];
        r["a1_ok"] = cr.a1_ok;
        r["a3_lhs"] = cr.a3_lhs;
        r["a3_rhs"] = cr.a3_rhs;
        r["a4_lhs"] = cr.a4_lhs;
        r["a4_rhs"] = cr.a4_rhs;
      }
      rows.push_back(std::move(r));
    }
    doc["events"] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

}  // namespace agdlab
