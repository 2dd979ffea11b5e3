#include "agdlab/validate.hpp"

#include <cmath>
#include <sstream>

#include "agdlab/engine.hpp"

namespace agdlab {

std::size_t ViolationReport::count(ViolationKind kind) const {
  std::size_t c = 0;
  for (const auto& v : violations)
    if (v.kind == kind) ++c;
  return c;
}

namespace {

const char* kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::kGap: return "gap";
    case ViolationKind::kDuplicate: return "duplicate";
    case ViolationKind::kStaleness: return "staleness";
    case ViolationKind::kUpdateRule: return "update_rule";
    case ViolationKind::kReplay: return "replay";
  }
  return "?";
}

}  // namespace

std::string ViolationReport::summary() const {
  std::ostringstream s;
  s << violations.size() << " violation(s)";
  for (const auto& v : violations) s << "\n  [" << kind_name(v.kind) << "] seq=" << v.seq << " " << v.detail;
  return s.str();
}

ViolationReport validate_trace(const Trace& trace) {
  ViolationReport report;
  auto add = [&](ViolationKind kind, std::int64_t seq, const std::string& detail) {
    report.violations.push_back({kind, seq, detail});
  };

  Point replay = trace.initial_point;
  std::vector<double> tau(replay.size(), 0.0);
  double prev_time = -1.0;

  for (const auto& ev : trace.events()) {
    const auto jc = static_cast<std::size_t>(ev.coord);

    if (ev.time == prev_time) add(ViolationKind::kDuplicate, ev.seq, "same time as previous event");
    prev_time = ev.time;

    const double dt = ev.time - ev.tau;
    if (!(dt > 0.0) || dt > 1.0 + 1e-9) {
      std::ostringstream d;
      d << "coordinate " << ev.coord << " gap " << dt;
      add(ViolationKind::kGap, ev.seq, d.str());
    }
    if (ev.tau != tau[jc]) {
      std::ostringstream d;
      d << "tau " << ev.tau << " vs recorded previous update " << tau[jc];
      add(ViolationKind::kReplay, ev.seq, d.str());
    }

    const double expect_dp = compute_update_unchecked(ev.g_tilde, ev.gamma, dt);
    if (std::abs(ev.delta_p - expect_dp) > 1e-12 * std::max(1.0, std::abs(expect_dp))) {
      std::ostringstream d;
      d << "delta_p " << ev.delta_p << " vs rule " << expect_dp;
      add(ViolationKind::kUpdateRule, ev.seq, d.str());
    }

    if (ev.value_before != replay[jc]) {
      std::ostringstream d;
      d << "value_before " << ev.value_before << " vs replay " << replay[jc];
      add(ViolationKind::kReplay, ev.seq, d.str());
    }
    const double after = replay[jc] + ev.delta_p;
    if (std::abs(ev.value_after - after) > 1e-12 * std::max(1.0, std::abs(after))) {
      std::ostringstream d;
      d << "value_after " << ev.value_after << " vs replay " << after;
      add(ViolationKind::kReplay, ev.seq, d.str());
    }

    if (!ev.view.empty()) {
      // The admissible box is built from the trace itself.
      CoordBox box = window_box(trace, ev.coord, ev.tau, ev.time, ev.value_before);
      if (!box.contains(ev.view, 1e-12)) {
        add(ViolationKind::kStaleness, ev.seq, "view outside admissible box");
      }
    }

    replay[jc] = ev.value_after;
    tau[jc] = ev.time;
  }

  return report;
}

}  // namespace agdlab
