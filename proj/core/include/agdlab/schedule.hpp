#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agdlab {

/// Update-time generation policies. Gaps between consecutive updates to the
/// same coordinate always lie in (0, 1] and the first update of each
/// coordinate lands at time <= 1.
enum class SchedulePolicyKind {
  kSynchronousJitter,   // all coordinates near integer times, jitter < 1e-6
  kRoundRobin,          // coordinate j at r + (j+1)/n
  kRandomGap,           // per-coordinate gaps uniform in [g_min, 1]
  kBurstyAdversarial,   // others squeeze >= burst updates into target's gaps
};

struct SchedulePolicy {
  SchedulePolicyKind kind = SchedulePolicyKind::kRoundRobin;
  double g_min = 0.25;  // random_gap
  int target = 0;       // bursty_adversarial
  int burst = 8;        // bursty_adversarial

  static SchedulePolicy synchronous_jitter() { return {SchedulePolicyKind::kSynchronousJitter, 0, 0, 0}; }
  static SchedulePolicy round_robin() { return {SchedulePolicyKind::kRoundRobin, 0, 0, 0}; }
  static SchedulePolicy random_gap(double g_min) { return {SchedulePolicyKind::kRandomGap, g_min, 0, 0}; }
  static SchedulePolicy bursty_adversarial(int target, int burst) {
    return {SchedulePolicyKind::kBurstyAdversarial, 0, target, burst};
  }

  std::string tag() const;
};

SchedulePolicy parse_schedule_policy(const std::string& tag);

struct Schedule {
  std::vector<std::vector<double>> times;  // per coordinate, sorted ascending
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::string policy_tag;

  int dim() const { return static_cast<int>(times.size()); }
  std::size_t total_events() const;

  /// All (time, coordinate) pairs merged in strict time order.
  std::vector<std::pair<double, int>> merged() const;

  /// Throws if any invariant fails: gaps in (0,1], first update <= 1,
  /// globally distinct times.
  void validate() const;
};

/// Deterministic in (policy, n, horizon, seed). Horizon capped at 1e4 and
/// total events capped at 1e6.
Schedule generate_schedule(const SchedulePolicy& policy, int n, double horizon, std::uint64_t seed);

}  // namespace agdlab
