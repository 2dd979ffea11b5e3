#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "agdlab/point.hpp"

namespace agdlab {

/// One asynchronous update: who updated when, from which stale view, by how
/// much. `view` is kept in memory only; CSV serialization drops it.
struct UpdateEvent {
  std::int64_t seq = 0;
  double time = 0.0;
  int coord = 0;
  double tau = 0.0;  // previous update time of this coordinate (0 for the first)
  Point view;        // the stale point the gradient was evaluated at
  double g_tilde = 0.0;
  double g_fresh = 0.0;  // gradient at the current point, for diagnostics
  double gamma = 0.0;
  double delta_p = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
  double phi_after = 0.0;

  // Market columns (NaN when not a market trace).
  double z_tilde = std::numeric_limits<double>::quiet_NaN();
  double z_fresh = std::numeric_limits<double>::quiet_NaN();
  double warehouse = std::numeric_limits<double>::quiet_NaN();

  double delta_t() const { return time - tau; }
};

/// Full timestamped record of one asynchronous run. Events are stored in
/// strict time order; the per-coordinate index supports range queries over
/// the piecewise-constant coordinate paths.
class Trace {
 public:
  Point initial_point;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::string problem_tag;
  std::string schedule_tag;
  std::string staleness_tag;
  bool market_columns = false;

  int dim() const { return static_cast<int>(initial_point.size()); }
  const std::vector<UpdateEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  /// Appends an event; must be strictly later than everything recorded.
  void push(UpdateEvent ev);

  /// Event indices touching coordinate k, in time order.
  const std::vector<std::int32_t>& coord_events(int k) const;

  /// Value of p_k after all events with time <= t.
  double value_at(int k, double t) const;

  /// Value of p_k just before time t (events with time < t).
  double value_before_time(int k, double t) const;

  /// [min, max] of values attained by p_k over [t1, t2]: the value entering
  /// the window plus every post-update value inside it.
  std::pair<double, double> attained_range(int k, double t1, double t2) const;

  /// Index of the first event of coordinate k with time > t, or -1.
  std::int32_t next_event_after(int k, double t) const;

  /// Final point after replaying every event.
  Point final_point() const;

  /// Point after all events with time <= t.
  Point point_at(double t) const;

 private:
  std::vector<UpdateEvent> events_;
  std::vector<std::vector<std::int32_t>> by_coord_;
};

/// Definition-1 box: coordinate j pinned at s_j, every other coordinate
/// spanning its attained range over [t1, t2]. Throws when t2 exceeds the
/// recorded horizon.
CoordBox window_box(const Trace& trace, int j, double t1, double t2, double s_j);

/// CSV with '#' metadata lines, a mandatory header row, and one row per
/// event; floats printed with 17 significant digits for lossless round-trip.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv_file(const std::string& path, const Trace& trace);
Trace read_trace_csv(std::istream& in, const std::string& context = "<stream>");
Trace read_trace_csv_file(const std::string& path);

std::string format_double(double x);  // %.17g

}  // namespace agdlab
