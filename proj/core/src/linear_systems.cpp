#include "agdlab/linear_systems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace agdlab {

namespace {

Eigen::VectorXd to_eigen(const Point& p) {
  return Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<long>(p.size()));
}

Point to_point(const Eigen::VectorXd& v) {
  return Point(v.data(), v.data() + v.size());
}

constexpr double kGammaMargin = 1e-3;  // the closed-form bound is strict

}  // namespace

void SpdProblem::validate() const {
  if (A.rows() != A.cols()) throw std::invalid_argument("SpdProblem: matrix not square");
  if (b.size() != A.rows()) throw std::invalid_argument("SpdProblem: rhs dimension mismatch");
  if (!A.isApprox(A.transpose(), 0.0)) throw std::invalid_argument("SpdProblem: matrix not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("SpdProblem: matrix not positive definite");
}

SpdProblem SpdProblem::from(Eigen::MatrixXd A, Eigen::VectorXd b) {
  if (A.rows() != A.cols()) throw std::invalid_argument("SpdProblem: matrix not square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double skew = (A - A.transpose().eval()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * scale) throw std::invalid_argument("SpdProblem: matrix not symmetric within 1e-12");
  Eigen::MatrixXd sym = 0.5 * (A + A.transpose().eval());
  SpdProblem p{std::move(sym), std::move(b)};
  p.validate();
  return p;
}

Point SpdProblem::solution() const {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  return to_point(llt.solve(b));
}

double SpdProblem::minimum_value() const {
  const Eigen::VectorXd p = Eigen::LLT<Eigen::MatrixXd>(A).solve(b);
  return 0.5 * p.dot(A * p) - p.dot(b);
}

double SpdProblem::residual_inf(const Point& p) const {
  return (A * to_eigen(p) - b).cwiseAbs().maxCoeff();
}

SpdObjective::SpdObjective(SpdProblem problem) : problem_(std::move(problem)) {
  problem_.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(problem_.A, Eigen::EigenvaluesOnly);
  strong_convexity_ = es.eigenvalues().minCoeff();
}

double SpdObjective::value(const Point& p) const {
  const Eigen::VectorXd v = to_eigen(p);
  return 0.5 * v.dot(problem_.A * v) - v.dot(problem_.b);
}

double SpdObjective::grad_coord(const Point& p, int j) const {
  return problem_.A.row(j).dot(to_eigen(p)) - problem_.b(j);
}

Point SpdObjective::gradient(const Point& p) const {
  return to_point(problem_.A * to_eigen(p) - problem_.b);
}

double SpdObjective::hessian_bound(int j, int k, const CoordBox&) const {
  return std::abs(problem_.A(j, k));
}

std::optional<GradRange> SpdObjective::grad_extremes(int j, const CoordBox& box) const {
  // Affine gradient: extremes at the box corners selected by coefficient sign.
  GradRange r;
  double base = problem_.A(j, j) * box.pinned_value - problem_.b(j);
  r.lo = r.hi = base;
  for (int k = 0; k < dim(); ++k) {
    if (k == j) continue;
    const double a = problem_.A(j, k);
    const auto ks = static_cast<std::size_t>(k);
    r.lo += a * (a >= 0.0 ? box.lo[ks] : box.hi[ks]);
    r.hi += a * (a >= 0.0 ? box.hi[ks] : box.lo[ks]);
  }
  return r;
}

double spd_gamma_bound(const Eigen::MatrixXd& A, int j, double alpha) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spd_gamma_bound: matrix not square");
  if (!A.isApprox(A.transpose(), 1e-12)) throw std::invalid_argument("spd_gamma_bound: matrix not symmetric");
  if (!(alpha >= 2.0)) throw std::invalid_argument("spd_gamma_bound: alpha must be >= 2");
  double off = 0.0;
  for (long k = 0; k < A.cols(); ++k)
    if (k != j) off += std::abs(A(k, j));
  const double diag = A(j, j);
  const double base = std::max({0.5 * (diag + 8.0 * off), diag, 0.5 * diag * alpha});
  return (1.0 + kGammaMargin) * base;
}

std::vector<double> spd_gamma_bounds(const Eigen::MatrixXd& A, double alpha) {
  std::vector<double> g(static_cast<std::size_t>(A.rows()));
  for (long j = 0; j < A.rows(); ++j) g[static_cast<std::size_t>(j)] = spd_gamma_bound(A, static_cast<int>(j), alpha);
  return g;
}

Univariate Univariate::zero() {
  Univariate f;
  f.value = [](double) { return 0.0; };
  f.deriv = [](double) { return 0.0; };
  f.curvature_bound = 0.0;
  f.tag = "zero";
  return f;
}

Univariate Univariate::quadratic(double c, double center) {
  if (!(c >= 0.0)) throw std::invalid_argument("Univariate::quadratic: c must be nonnegative");
  Univariate f;
  f.value = [c, center](double x) { return 0.5 * c * (x - center) * (x - center); };
  f.deriv = [c, center](double x) { return c * (x - center); };
  f.curvature_bound = c;
  std::ostringstream tag;
  tag << "quadratic(" << c << "," << center << ")";
  f.tag = tag.str();
  return f;
}

void CompositeProblem::validate() const {
  if (b.size() != A.rows()) throw std::invalid_argument("CompositeProblem: rhs dimension mismatch");
  if (static_cast<int>(fs.size()) != dim())
    throw std::invalid_argument("CompositeProblem: one univariate term per column required");
  for (const auto& f : fs) {
    if (!f.value || !f.deriv) throw std::invalid_argument("CompositeProblem: univariate term missing callbacks");
    if (!(f.curvature_bound >= 0.0) || !std::isfinite(f.curvature_bound))
      throw std::invalid_argument("CompositeProblem: curvature bound must be finite and nonnegative");
  }
}

CompositeObjective::CompositeObjective(CompositeProblem problem) : problem_(std::move(problem)) {
  problem_.validate();
  gram_ = problem_.A.transpose() * problem_.A;
  atb_ = problem_.A.transpose() * problem_.b;
}

double CompositeObjective::value(const Point& p) const {
  const Eigen::VectorXd v = to_eigen(p);
  double sum = 0.5 * (problem_.A * v - problem_.b).squaredNorm();
  for (int j = 0; j < dim(); ++j) sum += problem_.fs[static_cast<std::size_t>(j)].value(p[static_cast<std::size_t>(j)]);
  return sum;
}

double CompositeObjective::grad_coord(const Point& p, int j) const {
  return problem_.fs[static_cast<std::size_t>(j)].deriv(p[static_cast<std::size_t>(j)]) +
         gram_.row(j).dot(to_eigen(p)) - atb_(j);
}

Point CompositeObjective::gradient(const Point& p) const {
  Eigen::VectorXd g = gram_ * to_eigen(p) - atb_;
  Point out = to_point(g);
  for (int j = 0; j < dim(); ++j)
    out[static_cast<std::size_t>(j)] += problem_.fs[static_cast<std::size_t>(j)].deriv(p[static_cast<std::size_t>(j)]);
  return out;
}

double CompositeObjective::hessian_bound(int j, int k, const CoordBox&) const {
  double h = std::abs(gram_(j, k));
  if (j == k) h += problem_.fs[static_cast<std::size_t>(j)].curvature_bound;
  return h;
}

std::optional<GradRange> CompositeObjective::grad_extremes(int j, const CoordBox& box) const {
  GradRange r;
  double base = problem_.fs[static_cast<std::size_t>(j)].deriv(box.pinned_value) +
                gram_(j, j) * box.pinned_value - atb_(j);
  r.lo = r.hi = base;
  for (int k = 0; k < dim(); ++k) {
    if (k == j) continue;
    const double a = gram_(j, k);
    const auto ks = static_cast<std::size_t>(k);
    r.lo += a * (a >= 0.0 ? box.lo[ks] : box.hi[ks]);
    r.hi += a * (a >= 0.0 ? box.hi[ks] : box.lo[ks]);
  }
  return r;
}

double composite_gamma_bound(const Eigen::MatrixXd& gram, const std::vector<double>& curvature_bounds,
                             int j, double alpha) {
  if (gram.rows() != gram.cols()) throw std::invalid_argument("composite_gamma_bound: gram not square");
  if (static_cast<long>(curvature_bounds.size()) != gram.rows())
    throw std::invalid_argument("composite_gamma_bound: curvature bound per coordinate required");
  if (!(alpha >= 2.0)) throw std::invalid_argument("composite_gamma_bound: alpha must be >= 2");
  double off = 0.0;
  for (long k = 0; k < gram.cols(); ++k)
    if (k != j) off += std::abs(gram(k, j));
  const double diag = gram(j, j) + curvature_bounds[static_cast<std::size_t>(j)];
  const double base = std::max({0.5 * (diag + 8.0 * off), diag, 0.5 * diag * alpha});
  return (1.0 + kGammaMargin) * base;
}

std::vector<double> composite_gamma_bounds(const Eigen::MatrixXd& gram,
                                           const std::vector<double>& curvature_bounds, double alpha) {
  std::vector<double> g(static_cast<std::size_t>(gram.rows()));
  for (long j = 0; j < gram.rows(); ++j)
    g[static_cast<std::size_t>(j)] = composite_gamma_bound(gram, curvature_bounds, static_cast<int>(j), alpha);
  return g;
}

GramCache::GramCache(const CompositeObjective& obj, Point p0, std::int64_t reanchor_period)
    : obj_(&obj), p_(std::move(p0)), reanchor_period_(reanchor_period) {
  if (static_cast<int>(p_.size()) != obj.dim()) throw std::invalid_argument("GramCache: p0 dimension mismatch");
  anchor();
}

void GramCache::anchor() {
  const Eigen::VectorXd v = to_eigen(p_);
  atg_ = obj_->gram() * v - obj_->atb();
  fprime_.resize(p_.size());
  for (int j = 0; j < obj_->dim(); ++j)
    fprime_[static_cast<std::size_t>(j)] = obj_->problem().fs[static_cast<std::size_t>(j)].deriv(p_[static_cast<std::size_t>(j)]);
  since_anchor_ = 0;
}

void GramCache::apply(int k, double delta_pk) {
  const auto ks = static_cast<std::size_t>(k);
  p_[ks] += delta_pk;
  if (delta_pk != 0.0) atg_ += delta_pk * obj_->gram().col(k);
  fprime_[ks] = obj_->problem().fs[ks].deriv(p_[ks]);
  ++updates_;
  if (reanchor_period_ > 0 && ++since_anchor_ >= reanchor_period_) anchor();
}

double GramCache::grad(int j) const {
  return fprime_[static_cast<std::size_t>(j)] + atg_(j);
}

Point GramCache::cached_gradient() const {
  Point g(p_.size());
  for (int j = 0; j < obj_->dim(); ++j) g[static_cast<std::size_t>(j)] = grad(j);
  return g;
}

Point GramCache::direct_gradient() const {
  return obj_->gradient(p_);
}

double GramCache::max_rel_drift() const {
  const Point cached = cached_gradient();
  const Point direct = direct_gradient();
  double worst = 0.0;
  for (std::size_t j = 0; j < cached.size(); ++j) {
    const double denom = std::max(1.0, std::abs(direct[j]));
    worst = std::max(worst, std::abs(cached[j] - direct[j]) / denom);
  }
  return worst;
}

bool GramCache::matches(const Point& view) const {
  return view == p_;
}

namespace {

SolveResult solve_quadratic_family(const Objective& obj, const Eigen::MatrixXd& hess_cap,
                                   const SolveOptions& options, const Point& p0, double phi_offset,
                                   const std::string& tag,
                                   const std::function<double(const Point&)>& residual_of,
                                   const EngineHooks& hooks,
                                   const std::function<std::optional<double>(const Point&, int)>& grad_src) {
  SolveResult result;
  std::vector<double> rule_gamma(static_cast<std::size_t>(obj.dim()));
  for (int j = 0; j < obj.dim(); ++j) {
    double off = 0.0;
    for (int k = 0; k < obj.dim(); ++k)
      if (k != j) off += hess_cap(k, j);
    const double diag = hess_cap(j, j);
    rule_gamma[static_cast<std::size_t>(j)] =
        (1.0 + kGammaMargin) * std::max({0.5 * (diag + 8.0 * off), diag, 0.5 * diag * options.alpha});
  }
  result.gamma = options.gamma_override.empty() ? rule_gamma : options.gamma_override;

  RunConfig cfg;
  cfg.objective = &obj;
  cfg.schedule = options.schedule;
  cfg.schedule_seed = options.schedule_seed;
  cfg.staleness = options.staleness;
  cfg.step = StepSizeRule::constant(result.gamma, options.alpha);
  cfg.p0 = p0;
  cfg.horizon = options.horizon;
  cfg.problem_tag = tag;
  cfg.hooks = hooks;
  cfg.gradient_source = grad_src;

  result.trace = run(cfg);

  // Final point when it meets the tolerance, otherwise the best iterate.
  Point p = result.trace.initial_point;
  Point best_p = p;
  double best_res = residual_of(p);
  for (const auto& ev : result.trace.events()) {
    p[static_cast<std::size_t>(ev.coord)] = ev.value_after;
    const double r = residual_of(p);
    if (r < best_res) {
      best_res = r;
      best_p = p;
    }
    if (result.time_to_tolerance < 0.0 && r < options.tolerance) result.time_to_tolerance = ev.time;
  }
  const double final_res = residual_of(p);
  if (final_res < options.tolerance) {
    result.solution = std::move(p);
    result.residual_inf = final_res;
  } else {
    result.solution = std::move(best_p);
    result.residual_inf = best_res;
  }
  result.converged = result.residual_inf < options.tolerance;

  if (options.monitor) {
    // Constants always come from the rule-derived step sizes; an overridden
    // run below the safe bound then shows up as enumerated violations.
    result.params = quadratic_control_params(hess_cap, rule_gamma);
    result.monitor = run_monitor(result.trace, obj, result.params, phi_offset);
  }
  return result;
}

}  // namespace

SolveResult solve_spd(const SpdProblem& problem, const SolveOptions& options) {
  SpdObjective obj(problem);
  const Eigen::MatrixXd cap = problem.A.cwiseAbs();
  Point p0 = options.p0;
  if (p0.empty()) p0.assign(static_cast<std::size_t>(problem.dim()), 0.0);
  if (static_cast<int>(p0.size()) != problem.dim())
    throw std::invalid_argument("solve_spd: p0 dimension mismatch");
  auto residual = [&problem](const Point& p) { return problem.residual_inf(p); };
  return solve_quadratic_family(obj, cap, options, p0, problem.minimum_value(), "spd", residual, {}, {});
}

SolveResult solve_composite(const CompositeProblem& problem, const SolveOptions& options) {
  CompositeObjective obj(problem);
  Eigen::MatrixXd cap = obj.gram().cwiseAbs();
  for (int j = 0; j < obj.dim(); ++j) cap(j, j) += problem.fs[static_cast<std::size_t>(j)].curvature_bound;
  Point p0 = options.p0;
  if (p0.empty()) p0.assign(static_cast<std::size_t>(problem.dim()), 0.0);
  if (static_cast<int>(p0.size()) != problem.dim())
    throw std::invalid_argument("solve_composite: p0 dimension mismatch");

  auto cache = std::make_shared<GramCache>(obj, p0);
  EngineHooks hooks;
  hooks.on_event = [cache](UpdateEvent& ev, const Point&) { cache->apply(ev.coord, ev.delta_p); };
  auto grad_src = [cache](const Point& view, int j) -> std::optional<double> {
    if (cache->matches(view)) return cache->grad(j);
    return std::nullopt;
  };

  auto residual = [&obj](const Point& p) {
    const Point g = obj.gradient(p);
    double worst = 0.0;
    for (double x : g) worst = std::max(worst, std::abs(x));
    return worst;
  };
  return solve_quadratic_family(obj, cap, options, p0, 0.0, "composite", residual, hooks, grad_src);
}

double first_time_residual_below(const Trace& trace, const SpdProblem& problem, double tol) {
  Point p = trace.initial_point;
  if (problem.residual_inf(p) < tol) return 0.0;
  for (const auto& ev : trace.events()) {
    p[static_cast<std::size_t>(ev.coord)] = ev.value_after;
    if (problem.residual_inf(p) < tol) return ev.time;
  }
  return -1.0;
}

}  // namespace agdlab
