#include "agdlab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "agdlab/rng.hpp"

namespace agdlab {

namespace {

constexpr double kMaxHorizon = 1e4;
constexpr std::size_t kMaxEvents = 1000000;

}  // namespace

std::string SchedulePolicy::tag() const {
  std::ostringstream s;
  switch (kind) {
    case SchedulePolicyKind::kSynchronousJitter:
      s << "synchronous_jitter";
      break;
    case SchedulePolicyKind::kRoundRobin:
      s << "round_robin";
      break;
    case SchedulePolicyKind::kRandomGap:
      s << "random_gap(" << g_min << ")";
      break;
    case SchedulePolicyKind::kBurstyAdversarial:
      s << "bursty_adversarial(" << target << "," << burst << ")";
      break;
  }
  return s.str();
}

SchedulePolicy parse_schedule_policy(const std::string& tag) {
  auto args_of = [&](const std::string& name) -> std::vector<double> {
    std::vector<double> args;
    auto open = tag.find('(');
    if (open == std::string::npos) return args;
    if (tag.substr(0, open) != name) return args;
    auto close = tag.find(')', open);
    std::string body = tag.substr(open + 1, close - open - 1);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream ss(body);
    double x = 0.0;
    while (ss >> x) args.push_back(x);
    return args;
  };
  if (tag == "synchronous_jitter") return SchedulePolicy::synchronous_jitter();
  if (tag == "round_robin") return SchedulePolicy::round_robin();
  if (tag.rfind("random_gap", 0) == 0) {
    auto args = args_of("random_gap");
    if (args.size() != 1) throw std::invalid_argument("random_gap needs (g_min)");
    return SchedulePolicy::random_gap(args[0]);
  }
  if (tag.rfind("bursty_adversarial", 0) == 0) {
    auto args = args_of("bursty_adversarial");
    if (args.size() != 2) throw std::invalid_argument("bursty_adversarial needs (target,burst)");
    return SchedulePolicy::bursty_adversarial(static_cast<int>(args[0]), static_cast<int>(args[1]));
  }
  throw std::invalid_argument("unknown schedule policy: " + tag);
}

std::size_t Schedule::total_events() const {
  std::size_t n = 0;
  for (const auto& t : times) n += t.size();
  return n;
}

std::vector<std::pair<double, int>> Schedule::merged() const {
  std::vector<std::pair<double, int>> all;
  all.reserve(total_events());
  for (int j = 0; j < dim(); ++j)
    for (double t : times[static_cast<std::size_t>(j)]) all.emplace_back(t, j);
  std::sort(all.begin(), all.end());
  return all;
}

void Schedule::validate() const {
  for (int j = 0; j < dim(); ++j) {
    const auto& ts = times[static_cast<std::size_t>(j)];
    if (ts.empty()) throw std::runtime_error("schedule: coordinate with no updates");
    double prev = 0.0;
    for (double t : ts) {
      const double gap = t - prev;
      if (!(gap > 0.0)) throw std::runtime_error("schedule: nonpositive gap");
      // 1e-9 absorbs the rounding of times like r - u
      if (gap > 1.0 + 1e-9) throw std::runtime_error("schedule: gap exceeds one time unit");
      if (t > horizon) throw std::runtime_error("schedule: update beyond horizon");
      prev = t;
    }
  }
  auto all = merged();
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].first == all[i - 1].first) throw std::runtime_error("schedule: duplicate update times");
  }
}

Schedule generate_schedule(const SchedulePolicy& policy, int n, double horizon, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_schedule: n must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("generate_schedule: horizon must be positive");
  if (horizon > kMaxHorizon) throw std::invalid_argument("generate_schedule: horizon above 1e4 cap");

  Schedule sched;
  sched.times.assign(static_cast<std::size_t>(n), {});
  sched.horizon = horizon;
  sched.seed = seed;
  sched.policy_tag = policy.tag();

  const long rounds = static_cast<long>(std::floor(horizon));

  switch (policy.kind) {
    case SchedulePolicyKind::kSynchronousJitter: {
      // Constant downward jitter per coordinate keeps gaps exactly one unit.
      for (int j = 0; j < n; ++j) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(j)));
        const double u = 1e-9 * (j + 1) + 1e-7 * rng.uniform01();
        auto& ts = sched.times[static_cast<std::size_t>(j)];
        for (long r = 1; r <= rounds; ++r) ts.push_back(static_cast<double>(r) - u);
      }
      break;
    }
    case SchedulePolicyKind::kRoundRobin: {
      for (int j = 0; j < n; ++j) {
        auto& ts = sched.times[static_cast<std::size_t>(j)];
        const double frac = static_cast<double>(j + 1) / static_cast<double>(n);
        for (long r = 0;; ++r) {
          const double t = static_cast<double>(r) + frac;
          if (t > horizon) break;
          ts.push_back(t);
        }
      }
      break;
    }
    case SchedulePolicyKind::kRandomGap: {
      if (!(policy.g_min > 0.0) || policy.g_min > 1.0)
        throw std::invalid_argument("random_gap: g_min must lie in (0, 1]");
      for (int j = 0; j < n; ++j) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(j)));
        auto& ts = sched.times[static_cast<std::size_t>(j)];
        double t = 0.0;
        for (;;) {
          t += rng.uniform(policy.g_min, 1.0);
          if (t > horizon) break;
          ts.push_back(t);
          if (ts.size() > kMaxEvents) throw std::runtime_error("generate_schedule: event cap exceeded");
        }
        if (ts.empty()) ts.push_back(horizon * 0.5);
      }
      break;
    }
    case SchedulePolicyKind::kBurstyAdversarial: {
      if (n < 2) throw std::invalid_argument("bursty_adversarial: needs n >= 2");
      if (policy.burst < 2) throw std::invalid_argument("bursty_adversarial: burst must be >= 2");
      if (policy.target < 0 || policy.target >= n)
        throw std::invalid_argument("bursty_adversarial: target out of range");
      Rng rng(Rng::mix(seed, 0x7a6be57));
      const double u_target = 1e-9 * (policy.target + 1) + 1e-7 * rng.uniform01();
      for (int j = 0; j < n; ++j) {
        auto& ts = sched.times[static_cast<std::size_t>(j)];
        if (j == policy.target) {
          for (long r = 1; r <= rounds; ++r) ts.push_back(static_cast<double>(r) - u_target);
        } else {
          // burst updates strictly inside each of the target's unit gaps
          const double off = 1e-9 * (j + 1);
          for (long r = 1; r <= rounds; ++r) {
            for (int q = 1; q <= policy.burst; ++q) {
              const double t = static_cast<double>(r - 1) +
                               static_cast<double>(q) / static_cast<double>(policy.burst + 1) + off;
              ts.push_back(t);
            }
          }
        }
      }
      break;
    }
  }

  if (sched.total_events() > kMaxEvents)
    throw std::runtime_error("generate_schedule: event cap (1e6) exceeded");
  if (sched.total_events() == 0) throw std::runtime_error("generate_schedule: horizon too short");
  sched.validate();
  return sched;
}

}  // namespace agdlab
