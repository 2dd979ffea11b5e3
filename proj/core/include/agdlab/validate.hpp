#pragma once

#include <string>
#include <vector>

#include "agdlab/trace.hpp"

namespace agdlab {

enum class ViolationKind {
  kGap,         // two consecutive updates to one coordinate more than 1 apart
  kDuplicate,   // two events at the same time
  kStaleness,   // recorded view outside the admissible box
  kUpdateRule,  // delta_p does not match -g_tilde/gamma * dt
  kReplay,      // value_before/value_after inconsistent with replay from p0
};

struct Violation {
  ViolationKind kind;
  std::int64_t seq = -1;
  std::string detail;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
  std::string summary() const;
};

/// Checks every recorded invariant of a trace: per-coordinate gaps, global
/// time distinctness, staleness boxes (when views are present), the
/// update rule, and replay consistency. Reporting only; never throws on a
/// nonconforming trace.
ViolationReport validate_trace(const Trace& trace);

}  // namespace agdlab
