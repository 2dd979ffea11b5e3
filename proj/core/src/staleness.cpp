#include "agdlab/staleness.hpp"

#include <cmath>
#include <stdexcept>

namespace agdlab {

std::string StalenessPolicy::tag() const {
  switch (kind) {
    case StalenessKind::kFresh: return "fresh";
    case StalenessKind::kStalest: return "stalest";
    case StalenessKind::kRandomInBox: return "random_in_box";
    case StalenessKind::kAdversarialInBox: return "adversarial_in_box";
  }
  return "fresh";
}

StalenessPolicy parse_staleness_policy(const std::string& tag, std::uint64_t seed) {
  StalenessPolicy p;
  p.seed = seed;
  if (tag == "fresh") p.kind = StalenessKind::kFresh;
  else if (tag == "stalest") p.kind = StalenessKind::kStalest;
  else if (tag == "random_in_box") p.kind = StalenessKind::kRandomInBox;
  else if (tag == "adversarial_in_box") p.kind = StalenessKind::kAdversarialInBox;
  else throw std::invalid_argument("unknown staleness policy: " + tag);
  return p;
}

namespace {

Point clamp_to_box(Point p, const CoordBox& box) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::min(std::max(p[k], box.lo[k]), box.hi[k]);
  }
  p[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
  return p;
}

/// Endpoint pattern pushing g_tilde as far as possible in direction `dir`.
/// Coordinate influence signs come from central differences at the box
/// midpoint, which is exact for affine gradients and for the monotone
/// market Hessians.
Point adversarial_candidate(const CoordBox& box, const Point& current, const Objective& obj, int j,
                            double dir) {
  const Point mid = box.midpoint();
  Point view = clamp_to_box(current, box);
  for (int k = 0; k < box.dim(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (k == j || box.lo[ks] == box.hi[ks]) continue;
    const double h = 0.5 * (box.hi[ks] - box.lo[ks]);
    Point up = mid;
    Point dn = mid;
    up[ks] = box.hi[ks];
    dn[ks] = box.lo[ks];
    double slope = 0.0;
    try {
      slope = (obj.grad_coord(up, j) - obj.grad_coord(dn, j)) / (2.0 * h);
    } catch (const std::domain_error&) {
      slope = 0.0;
    }
    if (slope * dir > 0.0) view[ks] = box.hi[ks];
    else if (slope * dir < 0.0) view[ks] = box.lo[ks];
  }
  return view;
}

}  // namespace

Point stale_view(const StalenessPolicy& policy, const CoordBox& box, const Point& current,
                 const Point& at_tau, const Objective& obj, int j, Rng& rng) {
  box.validate();
  switch (policy.kind) {
    case StalenessKind::kFresh: {
      return clamp_to_box(current, box);
    }
    case StalenessKind::kStalest: {
      return clamp_to_box(at_tau, box);
    }
    case StalenessKind::kRandomInBox: {
      Point view(box.lo.size());
      for (std::size_t k = 0; k < view.size(); ++k) {
        view[k] = box.lo[k] == box.hi[k] ? box.lo[k] : rng.uniform(box.lo[k], box.hi[k]);
      }
      view[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
      return view;
    }
    case StalenessKind::kAdversarialInBox: {
      // Maximize the gradient error |g_tilde - g_fresh| over the box: both
      // endpoint patterns are evaluated and the larger error wins.
      double g = 0.0;
      try {
        g = obj.grad_coord(clamp_to_box(current, box), j);
      } catch (const std::domain_error&) {
        g = 0.0;
      }
      Point best = clamp_to_box(current, box);
      double best_score = -1.0;
      auto consider = [&](Point cand) {
        double score = 0.0;
        try {
          score = std::abs(obj.grad_coord(cand, j) - g);
        } catch (const std::domain_error&) {
          return;
        }
        if (score > best_score) {
          best_score = score;
          best = std::move(cand);
        }
      };
      consider(adversarial_candidate(box, current, obj, j, +1.0));
      consider(adversarial_candidate(box, current, obj, j, -1.0));
      // Sampled search backs up the endpoint rule on non-monotone objectives.
      for (int trial = 0; trial < 8; ++trial) {
        Point cand(box.lo.size());
        for (std::size_t k = 0; k < cand.size(); ++k) {
          cand[k] = box.lo[k] == box.hi[k] ? box.lo[k] : rng.uniform(box.lo[k], box.hi[k]);
        }
        cand[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
        consider(std::move(cand));
      }
      return best;
    }
  }
  throw std::logic_error("stale_view: unreachable");
}

}  // namespace agdlab
