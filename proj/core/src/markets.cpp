#include "agdlab/markets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "agdlab/logging.hpp"
#include "json.hpp"

namespace agdlab {

namespace {

void require_positive_prices(const Point& p) {
  for (double x : p) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("market: prices must be strictly positive");
  }
}

}  // namespace

void CesMarket::validate() const {
  if (goods < 1) throw std::invalid_argument("CesMarket: needs at least one good");
  if (buyers.empty()) throw std::invalid_argument("CesMarket: needs at least one buyer");
  std::vector<char> desired(static_cast<std::size_t>(goods), 0);
  for (const auto& b : buyers) {
    if (!(b.money > 0.0)) throw std::invalid_argument("CesMarket: buyer money must be positive");
    if (!(b.rho < 0.0))
      throw std::invalid_argument("CesMarket: rho must be strictly negative (complements only)");
    if (static_cast<int>(b.weights.size()) != goods)
      throw std::invalid_argument("CesMarket: one weight per good required");
    bool any = false;
    for (std::size_t j = 0; j < b.weights.size(); ++j) {
      if (b.weights[j] < 0.0) throw std::invalid_argument("CesMarket: weights must be nonnegative");
      if (b.weights[j] > 0.0) {
        any = true;
        desired[j] = 1;
      }
    }
    if (!any) throw std::invalid_argument("CesMarket: buyer desires no good");
  }
  for (int j = 0; j < goods; ++j) {
    if (!desired[static_cast<std::size_t>(j)])
      throw std::invalid_argument("CesMarket: a good is desired by no buyer (equilibrium price 0)");
  }
}

void LeontiefMarket::validate() const {
  if (goods < 1) throw std::invalid_argument("LeontiefMarket: needs at least one good");
  if (buyers.empty()) throw std::invalid_argument("LeontiefMarket: needs at least one buyer");
  std::vector<char> desired(static_cast<std::size_t>(goods), 0);
  for (const auto& b : buyers) {
    if (!(b.money > 0.0)) throw std::invalid_argument("LeontiefMarket: buyer money must be positive");
    if (b.goods.empty()) throw std::invalid_argument("LeontiefMarket: S_i must be nonempty");
    if (b.goods.size() != b.rates.size())
      throw std::invalid_argument("LeontiefMarket: one rate per desired good required");
    for (std::size_t s = 0; s < b.goods.size(); ++s) {
      const int g = b.goods[s];
      if (g < 0 || g >= goods) throw std::invalid_argument("LeontiefMarket: good index out of range");
      if (!(b.rates[s] > 0.0)) throw std::invalid_argument("LeontiefMarket: rates must be positive");
      desired[static_cast<std::size_t>(g)] = 1;
    }
  }
  for (int j = 0; j < goods; ++j) {
    if (!desired[static_cast<std::size_t>(j)])
      throw std::invalid_argument("LeontiefMarket: a good is desired by no buyer (equilibrium price 0)");
  }
}

double FisherMarket::total_money() const {
  double sum = 0.0;
  for (int i = 0; i < buyer_count(); ++i) sum += money(i);
  return sum;
}

Point FisherMarket::total_demand(const Point& p) const {
  Point x(static_cast<std::size_t>(goods()), 0.0);
  for (int i = 0; i < buyer_count(); ++i) {
    const Point xi = demand(i, p);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += xi[j];
  }
  return x;
}

Point FisherMarket::excess_demand(const Point& p) const {
  Point z = total_demand(p);
  for (double& zj : z) zj -= 1.0;
  return z;
}

CesFisherMarket::CesFisherMarket(CesMarket spec) : spec_(std::move(spec)) {
  spec_.validate();
  thetas_.reserve(spec_.buyers.size());
  coeff_.reserve(spec_.buyers.size());
  for (const auto& b : spec_.buyers) {
    thetas_.push_back(b.rho / (b.rho - 1.0));
    std::vector<double> c(b.weights.size());
    const double ex = 1.0 / (1.0 - b.rho);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = b.weights[j] > 0.0 ? std::pow(b.weights[j], ex) : 0.0;
    coeff_.push_back(std::move(c));
  }
}

Point CesFisherMarket::demand(int i, const Point& p) const {
  require_positive_prices(p);
  const auto is = static_cast<std::size_t>(i);
  const double th = thetas_[is];
  const auto& c = coeff_[is];
  double denom = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] > 0.0) denom += c[j] * std::pow(p[j], th);
  Point x(c.size(), 0.0);
  const double e = spec_.buyers[is].money;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] > 0.0) x[j] = e * c[j] * std::pow(p[j], th - 1.0) / denom;
  return x;
}

double CesFisherMarket::indirect_utility(int i, const Point& p) const {
  require_positive_prices(p);
  const auto is = static_cast<std::size_t>(i);
  const double th = thetas_[is];
  const auto& c = coeff_[is];
  double denom = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] > 0.0) denom += c[j] * std::pow(p[j], th);
  return spec_.buyers[is].money * std::pow(denom, -1.0 / th);
}

Point LeontiefFisherMarket::demand(int i, const Point& p) const {
  require_positive_prices(p);
  const auto& b = spec_.buyers[static_cast<std::size_t>(i)];
  double cost_per_util = 0.0;
  for (std::size_t s = 0; s < b.goods.size(); ++s)
    cost_per_util += p[static_cast<std::size_t>(b.goods[s])] / b.rates[s];
  const double util = b.money / cost_per_util;
  Point x(p.size(), 0.0);
  for (std::size_t s = 0; s < b.goods.size(); ++s)
    x[static_cast<std::size_t>(b.goods[s])] = util / b.rates[s];
  return x;
}

double LeontiefFisherMarket::indirect_utility(int i, const Point& p) const {
  require_positive_prices(p);
  const auto& b = spec_.buyers[static_cast<std::size_t>(i)];
  double cost_per_util = 0.0;
  for (std::size_t s = 0; s < b.goods.size(); ++s)
    cost_per_util += p[static_cast<std::size_t>(b.goods[s])] / b.rates[s];
  return b.money / cost_per_util;
}

LeontiefFisherMarket::LeontiefFisherMarket(LeontiefMarket spec) : spec_(std::move(spec)) {
  spec_.validate();
}

Point ces_demand(const CesMarket& market, int i, const Point& p) {
  return CesFisherMarket(market).demand(i, p);
}

Point leontief_demand(const LeontiefMarket& market, int i, const Point& p) {
  return LeontiefFisherMarket(market).demand(i, p);
}

Point excess_demand(const FisherMarket& market, const Point& p) {
  return market.excess_demand(p);
}

double market_potential(const FisherMarket& market, const Point& p) {
  require_positive_prices(p);
  double phi = 0.0;
  for (double pj : p) phi += pj;
  for (int i = 0; i < market.buyer_count(); ++i)
    phi += market.money(i) * std::log(market.indirect_utility(i, p));
  return phi;
}

double ces_hessian_bound(const FisherMarket& market, int j, int k, const CoordBox& box, const Point& ref) {
  box.validate();
  require_positive_prices(ref);
  for (double lo : box.lo) {
    if (!(lo > 0.0)) throw std::domain_error("ces_hessian_bound: box touches zero prices");
  }
  double r1 = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < ref.size(); ++m) r1 = std::min(r1, box.lo[m] / ref[m]);
  const double inflation = 1.0 / (r1 * r1);

  const auto js = static_cast<std::size_t>(j);
  const auto ks = static_cast<std::size_t>(k);
  double cap = 0.0;
  for (int i = 0; i < market.buyer_count(); ++i) {
    const Point x = market.demand(i, ref);
    if (j == k) {
      const double th = market.theta(i);
      cap += th * x[js] * x[js] / market.money(i) + (1.0 - th) * x[js] / ref[js];
    } else {
      cap += x[js] * x[ks] / market.money(i);
    }
  }
  return inflation * cap;
}

MarketPotential::MarketPotential(std::shared_ptr<const FisherMarket> market) : market_(std::move(market)) {
  if (!market_) throw std::invalid_argument("MarketPotential: null market");
}

double MarketPotential::value(const Point& p) const {
  return market_potential(*market_, p);
}

double MarketPotential::grad_coord(const Point& p, int j) const {
  require_positive_prices(p);
  double xj = 0.0;
  for (int i = 0; i < market_->buyer_count(); ++i) xj += market_->demand(i, p)[static_cast<std::size_t>(j)];
  return 1.0 - xj;  // -z_j
}

Point MarketPotential::gradient(const Point& p) const {
  const Point z = market_->excess_demand(p);
  Point g(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) g[j] = -z[j];
  return g;
}

double MarketPotential::hessian_bound(int j, int k, const CoordBox& box) const {
  // The low corner dominates demands for complementary markets, so it is the
  // reference with unit inflation.
  Point ref = box.lo;
  ref[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
  return ces_hessian_bound(*market_, j, k, box, ref);
}

bool MarketPotential::in_domain(const Point& p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (double x : p) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  return true;
}

double tatonnement_step(double p_j, double z_tilde, double lambda, double delta_t, bool override_bound) {
  if (!(lambda > 0.0)) throw std::invalid_argument("tatonnement_step: lambda must be positive");
  if (!override_bound && lambda > kMaxTatonnementLambda * (1.0 + 1e-12))
    throw std::invalid_argument("tatonnement_step: lambda above 1/23.46 (use the override to force)");
  if (!(delta_t > 0.0) || delta_t > 1.0 + 1e-9)
    throw std::invalid_argument("tatonnement_step: delta_t outside (0, 1]");
  if (!(p_j > 0.0)) throw std::domain_error("tatonnement_step: price must be positive");
  const double next = p_j * (1.0 + lambda * std::min(z_tilde, 1.0) * delta_t);
  if (!(next > 0.0)) throw std::domain_error("tatonnement_step: price driven nonpositive");
  return next;
}

double ongoing_step(double p_j, double z_tilde, double v_j, double lambda_j, double kappa_j,
                    double delta_t) {
  if (!(lambda_j > 0.0) || lambda_j > 1.0 / 60.0 + 1e-15)
    throw std::invalid_argument("ongoing_step: lambda violates B1 (lambda <= 1/60)");
  if (!(kappa_j > 0.0) || kappa_j / lambda_j > 0.1 + 1e-12)
    throw std::invalid_argument("ongoing_step: kappa violates B2 (kappa/lambda <= 1/10)");
  if (std::abs(kappa_j * v_j) > 0.1 + 1e-12)
    throw std::invalid_argument("ongoing_step: |kappa v| above 1/10 (B3 breach, kappa misconfigured)");
  if (!(delta_t > 0.0) || delta_t > 1.0 + 1e-9)
    throw std::invalid_argument("ongoing_step: delta_t outside (0, 1]");
  if (!(p_j > 0.0)) throw std::domain_error("ongoing_step: price must be positive");
  const double next = p_j * (1.0 + lambda_j * std::min(z_tilde - kappa_j * v_j, 1.0) * delta_t);
  if (!(next > 0.0)) throw std::domain_error("ongoing_step: price driven nonpositive");
  return next;
}

double warehouse_integrate(double v, const std::vector<std::pair<double, double>>& segments, double chi) {
  for (const auto& [duration, z] : segments) {
    if (!(duration >= 0.0)) throw std::invalid_argument("warehouse_integrate: negative duration");
    v -= z * duration;
    if (std::abs(v) > 0.5 * chi + 1e-12)
      throw std::runtime_error("warehouse_integrate: capacity exceeded (model breach)");
  }
  return v;
}

void OngoingConfig::validate(int goods) const {
  const auto n = static_cast<std::size_t>(goods);
  if (chi.size() != n || v0.size() != n || lambda.size() != n || kappa.size() != n)
    throw std::invalid_argument("OngoingConfig: chi, v0, lambda, kappa must have one entry per good");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(chi[j] > 0.0)) throw std::invalid_argument("OngoingConfig: capacities must be positive");
    if (!(lambda[j] > 0.0) || lambda[j] > 1.0 / 60.0 + 1e-15)
      throw std::invalid_argument("OngoingConfig: B1 violated (lambda_j <= 1/60)");
    if (!(kappa[j] > 0.0) || kappa[j] / lambda[j] > 0.1 + 1e-12)
      throw std::invalid_argument("OngoingConfig: B2 violated (kappa_j/lambda_j <= 1/10)");
    if (std::abs(v0[j]) > 0.5 * chi[j])
      throw std::invalid_argument("OngoingConfig: initial stock outside warehouse capacity");
    if (std::abs(kappa[j] * v0[j]) > 0.1)
      throw std::invalid_argument("OngoingConfig: B3 violated at the initial stocks");
  }
}

EquilibriumResult equilibrium_oracle(const FisherMarket& market, const Point& p0, double lambda,
                                     double tol, long max_rounds) {
  require_positive_prices(p0);
  EquilibriumResult out;
  out.p_star = p0;
  for (long r = 0; r < max_rounds; ++r) {
    const Point z = market.excess_demand(out.p_star);
    double worst = 0.0;
    for (double zj : z) worst = std::max(worst, std::abs(zj));
    if (worst < tol) {
      out.z_star = z;
      out.rounds = r;
      out.converged = true;
      return out;
    }
    for (std::size_t j = 0; j < out.p_star.size(); ++j)
      out.p_star[j] *= 1.0 + lambda * std::min(z[j], 1.0);
  }
  out.z_star = market.excess_demand(out.p_star);
  out.rounds = max_rounds;
  out.converged = false;
  return out;
}

double lyapunov_ongoing(const FisherMarket& market, const MarketState& state, const Point& p_star,
                        const std::vector<double>& kappas, const std::vector<double>& lambdas) {
  double sum = market_potential(market, state.p);
  for (std::size_t j = 0; j < state.v.size(); ++j)
    sum += kappas[j] * lambdas[j] * p_star[j] * state.v[j] * state.v[j];
  return sum;
}

namespace {

struct OngoingRunState {
  std::vector<double> v;
  double clock = 0.0;
  long next_sample = 0;
  std::vector<double> lyapunov;
  std::int64_t events_seen = 0;
};

}  // namespace

TatonnementResult run_tatonnement(std::shared_ptr<const FisherMarket> market, MarketMode mode,
                                  const Point& p0, const TatonnementOptions& options) {
  if (!market) throw std::invalid_argument("run_tatonnement: null market");
  const int n = market->goods();
  if (static_cast<int>(p0.size()) != n) throw std::invalid_argument("run_tatonnement: p0 dimension mismatch");
  require_positive_prices(p0);

  const bool ongoing = mode == MarketMode::kOngoing;
  if (mode == MarketMode::kCes && market->kind() != "ces")
    throw std::invalid_argument("run_tatonnement: ces mode needs a CES market");
  if (mode == MarketMode::kLeontief && market->kind() != "leontief")
    throw std::invalid_argument("run_tatonnement: leontief mode needs a Leontief market");
  if (ongoing && market->kind() != "ces")
    throw std::invalid_argument("run_tatonnement: ongoing mode needs a CES market");

  OngoingConfig og = options.ongoing;
  if (ongoing) {
    og.validate(n);
  } else {
    if (!(options.lambda > 0.0)) throw std::invalid_argument("run_tatonnement: lambda must be positive");
    if (!options.override_lambda_bound && options.lambda > kMaxTatonnementLambda * (1.0 + 1e-12))
      throw std::invalid_argument("run_tatonnement: lambda above the 1/23.46 safe bound");
  }

  auto obj = std::make_shared<MarketPotential>(market);
  const double price_bound = std::max(*std::max_element(p0.begin(), p0.end()), 2.0 * market->total_money());

  TatonnementResult result;
  result.price_upper_bound = price_bound;

  if (ongoing || options.compare_equilibrium) {
    result.oracle = equilibrium_oracle(*market, p0);
    if (!result.oracle->converged) log_info("equilibrium oracle did not converge within the round cap");
  }

  auto state = std::make_shared<OngoingRunState>();
  if (ongoing) state->v = og.v0;

  RunConfig cfg;
  cfg.objective = obj.get();
  cfg.schedule = options.schedule;
  cfg.schedule_seed = options.schedule_seed;
  cfg.staleness = options.staleness;
  cfg.p0 = p0;
  cfg.horizon = options.horizon;
  cfg.problem_tag = market->kind() + (ongoing ? "-ongoing" : "");

  const double lambda = options.lambda;
  if (ongoing) {
    cfg.step = StepSizeRule::from_callback(
        [og](int j, double, const Point& view, double g_tilde) {
          const auto js = static_cast<std::size_t>(j);
          // g_tilde already folds in the warehouse term, so -g_tilde is
          // z_tilde - kappa v.
          return std::max(1.0, -g_tilde) / (og.lambda[js] * view[js]);
        },
        6.0);
    cfg.gradient_source = [obj, state, og](const Point& view, int j) -> std::optional<double> {
      const auto js = static_cast<std::size_t>(j);
      const double z_tilde = -obj->grad_coord(view, j);
      return -(z_tilde - og.kappa[js] * state->v[js]);
    };
  } else {
    cfg.step = StepSizeRule::from_callback(
        [lambda](int j, double, const Point& view, double g_tilde) {
          return std::max(1.0, -g_tilde) / (lambda * view[static_cast<std::size_t>(j)]);
        },
        6.0);
  }

  const Point* p_star_ptr = result.oracle ? &result.oracle->p_star : nullptr;
  cfg.hooks.on_advance = [market, state, og, ongoing, p_star_ptr](double t_prev, double t, const Point& p) {
    if (!ongoing) return;
    const Point z = market->excess_demand(p);
    auto advance_to = [&](double target) {
      const double span = target - state->clock;
      if (span <= 0.0) {
        state->clock = std::max(state->clock, target);
        return;
      }
      for (std::size_t j = 0; j < state->v.size(); ++j) {
        state->v[j] -= z[j] * span;
        if (std::abs(state->v[j]) > 0.5 * og.chi[j] + 1e-12)
          throw RunAborted(RunAborted::Reason::kCapacity, state->events_seen,
                           "ongoing run: warehouse capacity exceeded");
        if (std::abs(og.kappa[j] * state->v[j]) > 0.1 + 1e-12)
          throw RunAborted(RunAborted::Reason::kWarehouseBound, state->events_seen,
                           "ongoing run: B3 breached (|kappa v| > 1/10), kappa misconfigured");
      }
      state->clock = target;
    };
    (void)t_prev;
    while (static_cast<double>(state->next_sample) <= t) {
      advance_to(static_cast<double>(state->next_sample));
      MarketState ms{p, state->v};
      state->lyapunov.push_back(lyapunov_ongoing(*market, ms, *p_star_ptr, og.kappa, og.lambda));
      ++state->next_sample;
    }
    advance_to(t);
  };
  cfg.hooks.on_event = [state, og, ongoing, price_bound](UpdateEvent& ev, const Point& p) {
    const auto js = static_cast<std::size_t>(ev.coord);
    if (ongoing) {
      ev.z_tilde = -ev.g_tilde + og.kappa[js] * state->v[js];
      ev.warehouse = state->v[js];
    } else {
      ev.z_tilde = -ev.g_tilde;
      ev.warehouse = 0.0;
    }
    ev.z_fresh = -ev.g_fresh;
    ++state->events_seen;
    if (p[js] > price_bound * (1.0 + 1e-12))
      throw RunAborted(RunAborted::Reason::kPriceBound, ev.seq,
                       "run_tatonnement: price exceeded the U bound");
  };

  result.trace = run(cfg);
  result.trace.market_columns = true;

  Point p_final = result.trace.final_point();
  if (ongoing) {
    // Finish integrating the warehouses and the lyapunov samples to horizon.
    const Point z = market->excess_demand(p_final);
    const double end = options.horizon;
    while (static_cast<double>(state->next_sample) <= end) {
      const double target = static_cast<double>(state->next_sample);
      const double span = target - state->clock;
      if (span > 0.0) {
        for (std::size_t j = 0; j < state->v.size(); ++j) state->v[j] -= z[j] * span;
        state->clock = target;
      }
      MarketState ms{p_final, state->v};
      state->lyapunov.push_back(lyapunov_ongoing(*market, ms, *p_star_ptr, og.kappa, og.lambda));
      ++state->next_sample;
    }
    result.lyapunov_series = state->lyapunov;
  }

  result.final_state.p = p_final;
  result.final_state.v = state->v;
  const Point z_final = market->excess_demand(p_final);
  for (double zj : z_final) result.max_abs_z = std::max(result.max_abs_z, std::abs(zj));
  for (double vj : state->v) result.max_abs_v = std::max(result.max_abs_v, std::abs(vj));

  if (!ongoing && options.monitor) {
    result.params = market_control_params();
    result.monitor = run_monitor(result.trace, *obj, result.params, 0.0);
    result.monitored = true;
  }
  return result;
}

namespace {

using nlohmann::json;

[[noreturn]] void doc_fail(const std::string& context, const std::string& what) {
  throw std::runtime_error("market json (" + context + "): " + what);
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      doc_fail(context, "unknown key '" + it.key() + "'");
  }
}

std::vector<double> to_doubles(const json& arr, const std::string& context) {
  if (!arr.is_array()) doc_fail(context, "expected an array");
  std::vector<double> out;
  for (const auto& x : arr) {
    if (!x.is_number()) doc_fail(context, "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

MarketDocument load_market_json(std::istream& in, const std::string& context) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    doc_fail(context, e.what());
  }
  if (!doc.is_object()) doc_fail(context, "top level must be an object");
  check_keys(doc, {"goods", "buyers", "chi", "v0", "lambda", "kappa"}, context);
  if (!doc.contains("goods") || !doc["goods"].is_number_integer()) doc_fail(context, "missing integer 'goods'");
  if (!doc.contains("buyers") || !doc["buyers"].is_array() || doc["buyers"].empty())
    doc_fail(context, "missing nonempty 'buyers' array");
  const int goods = doc["goods"].get<int>();

  bool is_ces = false, is_leontief = false;
  for (const auto& b : doc["buyers"]) {
    if (b.contains("rho") || b.contains("a")) is_ces = true;
    if (b.contains("S") || b.contains("b")) is_leontief = true;
  }
  if (is_ces == is_leontief) doc_fail(context, "buyers must all be CES ({e,rho,a}) or all Leontief ({e,S,b})");

  MarketDocument out;
  if (is_ces) {
    CesMarket m;
    m.goods = goods;
    for (const auto& b : doc["buyers"]) {
      check_keys(b, {"e", "rho", "a"}, context);
      if (!b.contains("e") || !b.contains("rho") || !b.contains("a")) doc_fail(context, "CES buyer needs e, rho, a");
      CesBuyer buyer;
      buyer.money = b["e"].get<double>();
      buyer.rho = b["rho"].get<double>();
      buyer.weights = to_doubles(b["a"], context);
      m.buyers.push_back(std::move(buyer));
    }
    m.validate();
    out.kind = "ces";
    out.ces = std::move(m);
  } else {
    LeontiefMarket m;
    m.goods = goods;
    for (const auto& b : doc["buyers"]) {
      check_keys(b, {"e", "S", "b"}, context);
      if (!b.contains("e") || !b.contains("S") || !b.contains("b")) doc_fail(context, "Leontief buyer needs e, S, b");
      LeontiefBuyer buyer;
      buyer.money = b["e"].get<double>();
      for (const auto& g : b["S"]) buyer.goods.push_back(g.get<int>());
      buyer.rates = to_doubles(b["b"], context);
      m.buyers.push_back(std::move(buyer));
    }
    m.validate();
    out.kind = "leontief";
    out.leontief = std::move(m);
  }

  const bool any_ongoing = doc.contains("chi") || doc.contains("v0") || doc.contains("lambda") || doc.contains("kappa");
  if (any_ongoing) {
    if (!(doc.contains("chi") && doc.contains("v0") && doc.contains("lambda") && doc.contains("kappa")))
      doc_fail(context, "ongoing markets need all of chi, v0, lambda, kappa");
    OngoingConfig og;
    og.chi = to_doubles(doc["chi"], context);
    og.v0 = to_doubles(doc["v0"], context);
    og.lambda = to_doubles(doc["lambda"], context);
    og.kappa = to_doubles(doc["kappa"], context);
    og.validate(goods);
    out.ongoing = std::move(og);
  }
  return out;
}

MarketDocument load_market_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open market file: " + path);
  return load_market_json(in, path);
}

std::shared_ptr<const FisherMarket> MarketDocument::instantiate() const {
  if (kind == "ces") return std::make_shared<CesFisherMarket>(*ces);
  if (kind == "leontief") return std::make_shared<LeontiefFisherMarket>(*leontief);
  throw std::logic_error("MarketDocument: unknown kind");
}

}  // namespace agdlab
