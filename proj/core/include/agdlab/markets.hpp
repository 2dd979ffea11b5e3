#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agdlab/engine.hpp"
#include "agdlab/monitor.hpp"
#include "agdlab/objective.hpp"

namespace agdlab {

struct CesBuyer {
  double money = 0.0;            // e_i > 0
  double rho = -1.0;             // rho_i < 0 strictly (complements)
  std::vector<double> weights;   // a_ij >= 0, at least one positive
};

struct CesMarket {
  int goods = 0;
  std::vector<CesBuyer> buyers;

  void validate() const;  // rejects rho >= 0 and goods desired by no buyer
};

struct LeontiefBuyer {
  double money = 0.0;
  std::vector<int> goods;        // S_i, nonempty
  std::vector<double> rates;     // b_ij > 0, aligned with `goods`
};

struct LeontiefMarket {
  int goods = 0;
  std::vector<LeontiefBuyer> buyers;

  void validate() const;
};

/// Demand system shared by the tatonnement machinery: per-buyer demand,
/// raw indirect utility, and the CES theta (1 for Leontief).
class FisherMarket {
 public:
  virtual ~FisherMarket() = default;

  virtual int goods() const = 0;
  virtual int buyer_count() const = 0;
  virtual double money(int i) const = 0;
  virtual double theta(int i) const = 0;
  virtual Point demand(int i, const Point& p) const = 0;
  virtual double indirect_utility(int i, const Point& p) const = 0;
  virtual std::string kind() const = 0;

  double total_money() const;
  /// Total demand x_j per good.
  Point total_demand(const Point& p) const;
  /// z_j = x_j - 1 (unit supply).
  Point excess_demand(const Point& p) const;
};

class CesFisherMarket final : public FisherMarket {
 public:
  explicit CesFisherMarket(CesMarket spec);

  int goods() const override { return spec_.goods; }
  int buyer_count() const override { return static_cast<int>(spec_.buyers.size()); }
  double money(int i) const override { return spec_.buyers[static_cast<std::size_t>(i)].money; }
  double theta(int i) const override { return thetas_[static_cast<std::size_t>(i)]; }
  Point demand(int i, const Point& p) const override;
  double indirect_utility(int i, const Point& p) const override;
  std::string kind() const override { return "ces"; }

  const CesMarket& spec() const { return spec_; }

 private:
  CesMarket spec_;
  std::vector<double> thetas_;
  std::vector<std::vector<double>> coeff_;  // a_ij^{1/(1-rho_i)}
};

class LeontiefFisherMarket final : public FisherMarket {
 public:
  explicit LeontiefFisherMarket(LeontiefMarket spec);

  int goods() const override { return spec_.goods; }
  int buyer_count() const override { return static_cast<int>(spec_.buyers.size()); }
  double money(int i) const override { return spec_.buyers[static_cast<std::size_t>(i)].money; }
  double theta(int) const override { return 1.0; }
  Point demand(int i, const Point& p) const override;
  double indirect_utility(int i, const Point& p) const override;
  std::string kind() const override { return "leontief"; }

  const LeontiefMarket& spec() const { return spec_; }

 private:
  LeontiefMarket spec_;
};

Point ces_demand(const CesMarket& market, int i, const Point& p);
Point leontief_demand(const LeontiefMarket& market, int i, const Point& p);
Point excess_demand(const FisherMarket& market, const Point& p);

/// The tatonnement potential: phi(p) = sum_j p_j + sum_i e_i ln u_i(p),
/// whose gradient is exactly -z(p).
double market_potential(const FisherMarket& market, const Point& p);

/// Upper bound on |d^2 phi / dp_j dp_k| over a box: the demand-product cap
/// evaluated at `ref` and inflated by (1/r1)^2 with r1 = min_k lo_k / ref_k.
double ces_hessian_bound(const FisherMarket& market, int j, int k, const CoordBox& box, const Point& ref);

/// Objective adapter for the engine and the potential monitor. The Hessian
/// bound uses the box midpoint as reference.
class MarketPotential final : public Objective {
 public:
  explicit MarketPotential(std::shared_ptr<const FisherMarket> market);

  int dim() const override { return market_->goods(); }
  double value(const Point& p) const override;
  double grad_coord(const Point& p, int j) const override;
  Point gradient(const Point& p) const override;
  double hessian_bound(int j, int k, const CoordBox& box) const override;
  bool in_domain(const Point& p) const override;
  std::string name() const override { return market_->kind(); }

  const FisherMarket& market() const { return *market_; }

 private:
  std::shared_ptr<const FisherMarket> market_;
};

/// Safe step-size constant: multiplicative price updates require
/// lambda <= 1/23.46.
inline constexpr double kMaxTatonnementLambda = 1.0 / 23.46;

/// p_j' = p_j (1 + lambda min{z_tilde, 1} dt). Rejects lambda above the
/// bound unless `override_bound` is set.
double tatonnement_step(double p_j, double z_tilde, double lambda, double delta_t,
                        bool override_bound = false);

/// Warehouse-steering variant of the price update:
/// p_j' = p_j (1 + lambda_j min{z_tilde - kappa_j v_j, 1} dt).
/// Throws when |kappa_j v_j| > 1/10 (condition B3).
double ongoing_step(double p_j, double z_tilde, double v_j, double lambda_j, double kappa_j,
                    double delta_t);

/// dv/dt = -z over piecewise-constant segments (duration, z). Throws when
/// |v| would exceed chi/2.
double warehouse_integrate(double v, const std::vector<std::pair<double, double>>& segments, double chi);

/// Ongoing-market capacities, initial offsets and per-good constants.
/// B1: lambda_j <= 1/60. B2: kappa_j/lambda_j <= 1/10. B3 (|kappa_j v_j| <=
/// 1/10) is enforced at runtime.
struct OngoingConfig {
  std::vector<double> chi;
  std::vector<double> v0;
  std::vector<double> lambda;
  std::vector<double> kappa;

  void validate(int goods) const;
};

/// Prices plus warehouse offsets (empty outside ongoing mode).
struct MarketState {
  Point p;
  std::vector<double> v;
};

enum class MarketMode { kCes, kLeontief, kOngoing };

struct TatonnementOptions {
  SchedulePolicy schedule = SchedulePolicy::random_gap(0.5);
  std::uint64_t schedule_seed = 1;
  StalenessPolicy staleness;
  double lambda = kMaxTatonnementLambda;
  double horizon = 2000.0;
  bool override_lambda_bound = false;
  OngoingConfig ongoing;      // ongoing mode only
  bool monitor = true;        // Phi monitor (ces/leontief modes)
  bool compare_equilibrium = false;
};

struct EquilibriumResult {
  Point p_star;
  Point z_star;
  long rounds = 0;
  bool converged = false;
};

/// Long synchronous tatonnement with lambda = 1/1000 and fresh excess
/// demands until max |z_j| < tol; reference for acceptance checks.
EquilibriumResult equilibrium_oracle(const FisherMarket& market, const Point& p0, double lambda = 1e-3,
                                     double tol = 1e-10, long max_rounds = 10000000);

/// phi(p) + sum_j kappa_j lambda_j p*_j v_j^2 (unit constants); diagnostic
/// for warehouse runs.
double lyapunov_ongoing(const FisherMarket& market, const MarketState& state, const Point& p_star,
                        const std::vector<double>& kappas, const std::vector<double>& lambdas);

struct TatonnementResult {
  MarketState final_state;
  Trace trace;
  MonitorResult monitor;       // ces/leontief modes
  ControlParams params;
  bool monitored = false;
  double max_abs_z = 0.0;      // at the final point
  double max_abs_v = 0.0;
  double price_upper_bound = 0.0;  // U
  std::vector<double> lyapunov_series;  // ongoing: sampled at integer times
  std::optional<EquilibriumResult> oracle;
};

TatonnementResult run_tatonnement(std::shared_ptr<const FisherMarket> market, MarketMode mode,
                                  const Point& p0, const TatonnementOptions& options);

/// Market input document: {goods, buyers: [{e, rho, a[]}]} or
/// {goods, buyers: [{e, S[], b[]}]}, ongoing adds {chi[], v0[], lambda[],
/// kappa[]}. Unknown keys are rejected.
struct MarketDocument {
  std::string kind;  // "ces" or "leontief"
  std::optional<CesMarket> ces;
  std::optional<LeontiefMarket> leontief;
  std::optional<OngoingConfig> ongoing;

  std::shared_ptr<const FisherMarket> instantiate() const;
};

MarketDocument load_market_json(std::istream& in, const std::string& context = "<stream>");
MarketDocument load_market_json_file(const std::string& path);

}  // namespace agdlab
