#pragma once

#include <cstdint>
#include <string>

#include "agdlab/objective.hpp"
#include "agdlab/point.hpp"
#include "agdlab/rng.hpp"

namespace agdlab {

/// How the updating coordinate's view of the others is chosen inside the
/// admissible box.
enum class StalenessKind {
  kFresh,            // current point
  kStalest,          // values attained at tau_j
  kRandomInBox,      // uniform in the box
  kAdversarialInBox, // endpoints amplifying the gradient error
};

struct StalenessPolicy {
  StalenessKind kind = StalenessKind::kFresh;
  std::uint64_t seed = 0;

  std::string tag() const;
};

StalenessPolicy parse_staleness_policy(const std::string& tag, std::uint64_t seed);

/// Produces a view inside `box`. `current` is the up-to-date point,
/// `at_tau` the point as of the coordinate's previous update time.
/// The result always lies inside the box, with coordinate j pinned.
Point stale_view(const StalenessPolicy& policy, const CoordBox& box, const Point& current,
                 const Point& at_tau, const Objective& obj, int j, Rng& rng);

}  // namespace agdlab
