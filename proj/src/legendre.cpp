#include "hypocert/legendre.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// expm1(x) / x, equal to 1 at x = 0.
double expm1_ratio(double x) { return std::abs(x) < 1e-12 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

// Index j of the interval log_w[j+1] <= l <= log_w[j] in a decreasing grid.
std::size_t interval_of(const std::vector<double>& lw, double l) {
  auto it = std::upper_bound(lw.begin(), lw.end(), l, std::greater<double>());
  std::size_t j = static_cast<std::size_t>(it - lw.begin());
  j = j == 0 ? 0 : j - 1;
  return std::min(j, lw.size() - 2);
}

}  // namespace

double log_kstar(const BetaFn& beta, double lw) {
  const double l1 = log_crossing(beta, lw);
  if (l1 == -kInf) return kInf;
  const double l2 = std::max(log_crossing(beta, lw - std::log(2.0)) + std::log(2.0), l1 + 1e-9);
  auto f = [&](double ls) {
    const double lb = beta.log_eval(ls);
    if (lb >= lw) return -kInf;
    return lw + std::log(-std::expm1(lb - lw)) - ls;
  };
  constexpr int n = 40;
  double grid[n + 1], val[n + 1];
  int best = 0;
  for (int i = 0; i <= n; ++i) {
    grid[i] = l1 + (l2 - l1) * i / n;
    val[i] = f(grid[i]);
    if (val[i] > val[best]) best = i;
  }
  const double a = grid[std::max(best - 1, 0)], b = grid[std::min(best + 1, n)];
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, a, b, 50);
  return std::max(val[best], -r.second);
}

double poly_kstar(double eta0, double eta1, double w) {
  return eta0 * eta1 / std::pow(eta0 * (1.0 + eta1), 1.0 + 1.0 / eta1) * std::pow(w, 1.0 + 1.0 / eta1);
}

double KStar::operator()(double w) const {
  if (log_w.size() < 2) throw std::logic_error("empty K* table");
  const double l = std::log(w);
  const std::size_t j = interval_of(log_w, l);
  const double t = (l - log_w[j]) / (log_w[j + 1] - log_w[j]);
  return std::exp(log_k[j] + t * (log_k[j + 1] - log_k[j]));
}

namespace {

double next_d(double d) { return d == 0.0 ? 1e-6 : d * 1.02; }

}  // namespace

KStar legendre_kstar(const Beta& beta, double a, double w_min) {
  if (!(a > 0.0) || !(a <= 0.25)) throw std::invalid_argument("a must lie in (0, 1/4]");
  if (!(w_min > 0.0) || !(w_min < a)) throw std::invalid_argument("w_min must lie in (0, a)");
  KStar k;
  k.a = a;
  const double la = std::log(a);
  const double lmin = std::log(w_min);
  for (double d = 0.0;; d = next_d(d)) {
    const double lw = la - d;
    const double lk = log_kstar(*beta, lw);
    if (!(lk > -kInf) || !(lk <= lw + 1e-12)) throw std::runtime_error("invalid K*: nonpositive or above w");
    k.log_w.push_back(lw);
    k.log_k.push_back(lk);
    if (lw < lmin) break;
  }
  return k;
}

RateFunction::RateFunction(const Beta& beta, double a, double t_max) {
  if (!(a > 0.0) || !(a <= 0.25)) throw std::invalid_argument("a must lie in (0, 1/4]");
  kstar_.a = a;
  const double la = std::log(a);
  const double floor = beta->log_floor();
  double total = 0.0;
  for (double d = 0.0; d <= 1e12; d = next_d(d)) {
    const double lw = la - d;
    const double lk = log_kstar(*beta, lw);
    if (!(lk > -kInf)) throw std::runtime_error("invalid K*: K*(w) = 0 at w = " + std::to_string(std::exp(lw)));
    const double lq = lw - lk;
    if (!log_q_.empty()) {
      const std::size_t j = log_q_.size() - 1;
      const double h = kstar_.log_w[j] - lw;
      const double kappa = (lq - log_q_[j]) / h;
      total += std::exp(log_q_[j]) * h * expm1_ratio(kappa * h);
    }
    kstar_.log_w.push_back(lw);
    kstar_.log_k.push_back(lk);
    log_q_.push_back(lq);
    cum_.push_back(total);
    if (total >= t_max) break;
    if (lw < floor) {
      floor_hit_ = true;
      break;
    }
  }
  if (cum_.size() < 2) throw std::runtime_error("rate function table is empty");
}

double RateFunction::F(double z) const {
  const double l = std::log(z);
  const auto& lw = kstar_.log_w;
  if (l >= lw.front()) return 0.0;
  const std::size_t j = interval_of(lw, l);
  const double h = lw[j] - lw[j + 1];
  const double kappa = (log_q_[j + 1] - log_q_[j]) / h;
  const double u = lw[j] - l;
  return cum_[j] + std::exp(log_q_[j]) * u * expm1_ratio(kappa * u);
}

double RateFunction::inverse(double t) const { return std::exp(log_inverse(t)); }

double RateFunction::log_inverse(double t) const {
  const auto& lw = kstar_.log_w;
  if (!(t > 0.0)) return lw.front();
  if (t >= cum_.back()) return lw.back();
  const std::size_t j =
      std::min(static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), t) - cum_.begin()) - 1,
               cum_.size() - 2);
  const double h = lw[j] - lw[j + 1];
  const double kappa = (log_q_[j + 1] - log_q_[j]) / h;
  const double delta = (t - cum_[j]) * std::exp(-log_q_[j]);
  const double u = std::abs(kappa * h) < 1e-12 ? delta : std::log1p(kappa * delta) / kappa;
  return lw[j] - std::clamp(u, 0.0, h);
}

}  // namespace hypo
