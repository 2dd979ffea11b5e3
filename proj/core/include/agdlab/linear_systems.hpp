#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agdlab/engine.hpp"
#include "agdlab/monitor.hpp"
#include "agdlab/objective.hpp"

namespace agdlab {

/// Symmetric positive definite system A p = b. Symmetry is enforced at load
/// (symmetrize within 1e-12, reject otherwise); definiteness is verified by
/// a Cholesky factorization attempt.
struct SpdProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int dim() const { return static_cast<int>(A.rows()); }
  void validate() const;

  /// Symmetrizes near-symmetric input; throws beyond 1e-12 relative skew.
  static SpdProblem from(Eigen::MatrixXd A, Eigen::VectorXd b);

  Point solution() const;       // A^{-1} b via LLT
  double minimum_value() const; // f(A^{-1} b)
  double residual_inf(const Point& p) const;
};

/// f_{A,b}(p) = 1/2 p^T A p - p^T b, gradient A p - b, constant Hessian A.
class SpdObjective final : public Objective {
 public:
  explicit SpdObjective(SpdProblem problem);

  int dim() const override { return problem_.dim(); }
  double value(const Point& p) const override;
  double grad_coord(const Point& p, int j) const override;
  Point gradient(const Point& p) const override;
  double hessian_bound(int j, int k, const CoordBox& box) const override;
  bool constant_hessian() const override { return true; }
  std::optional<double> strong_convexity() const override { return strong_convexity_; }
  std::optional<GradRange> grad_extremes(int j, const CoordBox& box) const override;
  std::string name() const override { return "spd"; }

  const SpdProblem& problem() const { return problem_; }

 private:
  SpdProblem problem_;
  double strong_convexity_ = 0.0;
};

/// Minimal controlled step-size denominators from the closed-form rule:
/// gamma_j = (1 + 1e-3) max{(A_jj + 8 sum_{k != j} |A_kj|)/2, A_jj, alpha A_jj / 2}.
double spd_gamma_bound(const Eigen::MatrixXd& A, int j, double alpha = 2.0);
std::vector<double> spd_gamma_bounds(const Eigen::MatrixXd& A, double alpha = 2.0);

/// Convex univariate component with derivative and curvature bound L_j.
struct Univariate {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  double curvature_bound = 0.0;  // L_j >= sup f''
  std::string tag = "zero";

  static Univariate zero();
  static Univariate quadratic(double c, double center);  // c/2 (x - center)^2
};

/// F(p) = sum_i f_i(p_i) + 1/2 ||A p - b||^2 with A an r x n matrix.
struct CompositeProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<Univariate> fs;

  int dim() const { return static_cast<int>(A.cols()); }
  void validate() const;
};

class CompositeObjective final : public Objective {
 public:
  explicit CompositeObjective(CompositeProblem problem);

  int dim() const override { return problem_.dim(); }
  double value(const Point& p) const override;
  double grad_coord(const Point& p, int j) const override;
  Point gradient(const Point& p) const override;
  double hessian_bound(int j, int k, const CoordBox& box) const override;
  bool constant_hessian() const override { return true; }
  std::optional<GradRange> grad_extremes(int j, const CoordBox& box) const override;
  std::string name() const override { return "composite"; }

  const CompositeProblem& problem() const { return problem_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& atb() const { return atb_; }

 private:
  CompositeProblem problem_;
  Eigen::MatrixXd gram_;  // A^T A
  Eigen::VectorXd atb_;   // A^T b
};

double composite_gamma_bound(const Eigen::MatrixXd& gram, const std::vector<double>& curvature_bounds,
                             int j, double alpha = 2.0);
std::vector<double> composite_gamma_bounds(const Eigen::MatrixXd& gram,
                                           const std::vector<double>& curvature_bounds, double alpha = 2.0);

/// Incremental gradient state: precomputed (A_j)^T A_k pairs, cached
/// (A_j)^T G(p) and f_j'(p_j). A change dp_k shifts every cached inner
/// product by dp_k * gram(j, k); f_k' is recomputed only for k. An exact
/// recomputation runs every `reanchor_period` updates to bound float drift.
class GramCache {
 public:
  GramCache(const CompositeObjective& obj, Point p0, std::int64_t reanchor_period = 10000);

  void apply(int k, double delta_pk);
  double grad(int j) const;
  Point cached_gradient() const;
  Point direct_gradient() const;  // recomputed from scratch at the cached point
  double max_rel_drift() const;
  const Point& point() const { return p_; }
  std::int64_t updates() const { return updates_; }

  /// True when `view` equals the cached point exactly.
  bool matches(const Point& view) const;

 private:
  void anchor();

  const CompositeObjective* obj_;
  Point p_;
  Eigen::VectorXd atg_;     // (A_j)^T G(p) per j
  std::vector<double> fprime_;
  std::int64_t reanchor_period_;
  std::int64_t since_anchor_ = 0;
  std::int64_t updates_ = 0;
};

struct SolveOptions {
  SchedulePolicy schedule = SchedulePolicy::random_gap(0.25);
  std::uint64_t schedule_seed = 1;
  StalenessPolicy staleness;
  double horizon = 200.0;
  double tolerance = 1e-8;
  double alpha = 2.0;
  std::vector<double> gamma_override;  // empty: closed-form rule
  Point p0;                            // empty: zeros
  bool monitor = true;
};

struct SolveResult {
  Point solution;
  double residual_inf = 0.0;  // ||Ap - b||_inf (SPD) or ||grad F||_inf (composite)
  bool converged = false;
  double time_to_tolerance = -1.0;  // first event time below tolerance, -1 if never
  Trace trace;
  MonitorResult monitor;
  ControlParams params;
  std::vector<double> gamma;
};

SolveResult solve_spd(const SpdProblem& problem, const SolveOptions& options);
SolveResult solve_composite(const CompositeProblem& problem, const SolveOptions& options);

/// First event time at which ||A p - b||_inf drops below tol, or -1.
double first_time_residual_below(const Trace& trace, const SpdProblem& problem, double tol);

}  // namespace agdlab
