#include "hypocert/beta.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hypo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kInf || b == kInf) return kInf;
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(e^ls - c) for e^ls > c.
double log_minus(double ls, double c) { return c == 0.0 ? ls : ls + std::log1p(-c * std::exp(-ls)); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

class PolyBeta : public BetaFn {
 public:
  PolyBeta(double eta0, double eta1) : l0_(std::log(eta0)), eta0_(eta0), eta1_(eta1) {}
  double log_eval(double ls) const override { return l0_ - eta1_ * ls; }
  double log_at_zero() const override { return eta0_ > 0.0 ? kInf : -kInf; }
  std::string describe() const override { return "poly(" + fmt(eta0_) + "," + fmt(eta1_) + ")"; }

 private:
  double l0_, eta0_, eta1_;
};

class StretchedExpBeta : public BetaFn {
 public:
  StretchedExpBeta(double eta0, double eta1, double eta2) : l0_(std::log(eta0)), e0_(eta0), e1_(eta1), e2_(eta2) {}
  double log_eval(double ls) const override { return l0_ - e1_ * std::exp(e2_ * ls); }
  double log_at_zero() const override { return l0_; }
  std::string describe() const override {
    return "stretched_exp(" + fmt(e0_) + "," + fmt(e1_) + "," + fmt(e2_) + ")";
  }

 private:
  double l0_, e0_, e1_, e2_;
};

class TailBeta : public BetaFn {
 public:
  TailBeta(const Measure& m, double k, double a, double b, const QuadratureCfg& cfg) : k_(k), a_(a), b_(b) {
    if (!(a > 0.0) || !(b >= 0.0) || !(k >= 0.0)) throw std::invalid_argument("tail beta needs a > 0, b >= 0, k >= 0");
    l_top_ = std::log(a + b);
    if (k == 0.0) return;
    // |x| = r(s) solves a <x>^{2k} + b = s.
    auto radius = [&](double ls) {
      const double z = (log_minus(ls, b) - std::log(a)) / k;
      return z > 40.0 ? std::exp(0.5 * z) : std::sqrt(std::expm1(z));
    };
    std::vector<double> xs{l_top_}, ys{0.0};
    auto push = [&](double ls) {
      const double lb = std::min(log_tail_mass(m, radius(ls), cfg), ys.back());
      xs.push_back(ls);
      ys.push_back(lb);
      return lb;
    };
    for (int i = 0; i <= 192; ++i) push(l_top_ + std::pow(10.0, -8.0 + i / 24.0));
    for (double off = 1.25; off <= 700.0; off += off < 20.0 ? 0.1 : 0.5) {
      if (push(l_top_ + off) < -1e5) break;
    }
    table_ = MonotoneTable(xs, ys);
    floor_ = ys.back();
  }

  double log_eval(double ls) const override {
    if (ls <= l_top_) return 0.0;
    if (k_ == 0.0) return -kInf;
    return std::min(0.0, table_(ls));
  }
  double log_at_zero() const override { return 0.0; }
  double log_floor() const override { return floor_; }
  std::string describe() const override {
    return "tail(k=" + fmt(k_) + ",a=" + fmt(a_) + ",b=" + fmt(b_) + ")";
  }

 private:
  double k_, a_, b_;
  double l_top_ = 0.0;
  MonotoneTable table_;
  double floor_ = -kInf;
};

class ShiftedBeta : public BetaFn {
 public:
  ShiftedBeta(Beta inner, double c) : inner_(std::move(inner)), c_(c), lc_(std::log(c)) {}
  double log_eval(double ls) const override {
    if (c_ == 0.0) return inner_->log_eval(ls);
    if (ls <= lc_) return inner_->log_at_zero();
    return inner_->log_eval(log_minus(ls, c_));
  }
  double log_at_zero() const override { return inner_->log_at_zero(); }
  double log_floor() const override { return inner_->log_floor(); }
  std::string describe() const override { return "shift(" + inner_->describe() + "," + fmt(c_) + ")"; }

 private:
  Beta inner_;
  double c_, lc_;
};

class ScaledBeta : public BetaFn {
 public:
  ScaledBeta(Beta inner, double kappa, double C)
      : inner_(std::move(inner)), lk_(std::log(kappa)), lC_(std::log(C)), kappa_(kappa), C_(C) {}
  double log_eval(double ls) const override { return lC_ + inner_->log_eval(ls + lk_); }
  double log_at_zero() const override { return lC_ + inner_->log_at_zero(); }
  double log_floor() const override { return lC_ + inner_->log_floor(); }
  std::string describe() const override {
    return "scale(" + inner_->describe() + ",kappa=" + fmt(kappa_) + ",C=" + fmt(C_) + ")";
  }

 private:
  Beta inner_;
  double lk_, lC_, kappa_, C_;
};

}  // namespace

Beta poly_beta(double eta0, double eta1) {
  if (!(eta0 >= 0.0) || !(eta1 > 0.0)) throw std::invalid_argument("poly beta needs eta0 >= 0, eta1 > 0");
  return std::make_shared<PolyBeta>(eta0, eta1);
}

Beta stretched_exp_beta(double eta0, double eta1, double eta2) {
  if (!(eta0 > 0.0) || !(eta1 > 0.0) || !(eta2 > 0.0)) throw std::invalid_argument("stretched beta needs positive parameters");
  return std::make_shared<StretchedExpBeta>(eta0, eta1, eta2);
}

Beta beta_from_spec(const BetaSpec& spec) {
  return spec.kind == BetaSpec::Kind::Poly ? poly_beta(spec.eta0, spec.eta1)
                                           : stretched_exp_beta(spec.eta0, spec.eta1, spec.eta2);
}

Beta tail_beta(const Measure& m, double k, double a, double b, const QuadratureCfg& cfg) {
  return std::make_shared<TailBeta>(m, k, a, b, cfg);
}

Beta shifted_beta(Beta inner, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("shift must be nonnegative");
  return std::make_shared<ShiftedBeta>(std::move(inner), c);
}

Beta scaled_beta(Beta inner, double kappa, double C) {
  if (!(kappa > 0.0) || !(C > 0.0)) throw std::invalid_argument("scale factors must be positive");
  return std::make_shared<ScaledBeta>(std::move(inner), kappa, C);
}

// ---------------------------------------------------------------------------
// Chaining

ChainedBeta::ChainedBeta(Beta bx, Beta bv, double c) : bx_(std::move(bx)), bv_(std::move(bv)), c_(c) {
  if (!(c >= 0.0)) throw std::invalid_argument("chain shift must be nonnegative");
  constexpr double step = 0.2;
  // Lower end: where beta-bar reaches 1/2, which covers every w <= 1/4.
  double lo = 0.0;
  while (lo > -40.0 && minimize(lo).log_value < std::log(0.5)) lo -= 2.0;
  std::vector<double> xs, ys;
  for (double ls = lo; ls <= 700.0; ls += step) {
    double lb = std::max(minimize(ls).log_value, -1e6);
    if (!ys.empty()) lb = std::min(lb, ys.back());
    xs.push_back(ls);
    ys.push_back(lb);
    if (lb < -1e5) break;
  }
  ls_lo_ = xs.front();
  lb_lo_ = ys.front();
  table_ = MonotoneTable(xs, ys);
  floor_ = ys.back();
}

double ChainedBeta::objective(double ls, double ls1) const {
  const double ls2 = ls - ls1;
  double lv;
  if (c_ == 0.0) {
    lv = bv_->log_eval(ls2);
  } else {
    lv = ls2 <= std::log(c_) ? bv_->log_at_zero() : bv_->log_eval(log_minus(ls2, c_));
  }
  return log_add(ls1 + lv, bx_->log_eval(ls1));
}

ChainPoint ChainedBeta::minimize(double ls, double lo, double hi) const {
  if (!(hi > lo)) throw std::invalid_argument("empty chaining range");
  // The objective is the log-sum of a term increasing and a term decreasing in
  // log s1, so a coarse scan locates the basin and a fine scan and Brent refine it.
  auto scan = [&](double a, double b, int n) {
    ChainPoint best{kInf, a};
    for (int i = 0; i <= n; ++i) {
      const double x = a + (b - a) * i / n;
      const double v = objective(ls, x);
      if (v < best.log_value) best = {v, x};
    }
    return best;
  };
  const int n_coarse = std::max(100, static_cast<int>(hi - lo));
  const double h = (hi - lo) / n_coarse;
  ChainPoint p = scan(lo, hi, n_coarse);
  if (!std::isfinite(p.log_value)) return p;
  const double a0 = std::max(lo, p.log_s1 - 2.0 * h), b0 = std::min(hi, p.log_s1 + 2.0 * h);
  p = scan(a0, b0, 80);
  const double step = (b0 - a0) / 80.0;
  const double a = std::max(a0, p.log_s1 - step), b = std::min(b0, p.log_s1 + step);
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return objective(ls, x); }, a, b, 40);
  if (r.second < p.log_value) p = {r.second, r.first};
  return p;
}

ChainPoint ChainedBeta::minimize(double ls) const { return minimize(ls, std::min(ls, 0.0) - 40.0, ls + 40.0); }

double ChainedBeta::log_eval(double ls) const {
  if (table_.empty()) return minimize(ls).log_value;
  if (ls < ls_lo_) return std::max(minimize(ls).log_value, lb_lo_);
  return table_(ls);
}

// The limit s -> 0 is not resolved; +inf keeps every derived inequality valid.
double ChainedBeta::log_at_zero() const { return kInf; }

std::string ChainedBeta::describe() const {
  return "chain(" + bx_->describe() + "," + bv_->describe() + ",c=" + fmt(c_) + ")";
}

std::shared_ptr<const ChainedBeta> chained_beta(Beta bx, Beta bv, double c) {
  return std::make_shared<ChainedBeta>(std::move(bx), std::move(bv), c);
}

// ---------------------------------------------------------------------------

double log_crossing(const BetaFn& beta, double lw) {
  double hi = 0.0, step = 1.0;
  while (beta.log_eval(hi) > lw) {
    hi += step;
    step *= 2.0;
    if (hi > 1e5) throw std::runtime_error("beta stays above the level " + std::to_string(lw));
  }
  double lo = hi - 1.0;
  step = 1.0;
  while (beta.log_eval(lo) <= lw) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    if (lo < -745.0) return -kInf;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (beta.log_eval(mid) <= lw) hi = mid;
    else lo = mid;
  }
  return hi;
}

double kstar_shift_bound(const BetaFn& beta, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("shift must be nonnegative");
  const double ls = log_crossing(beta, std::log(0.125));
  if (ls == -kInf) {
    if (c == 0.0) return 1.0;
    throw std::runtime_error("beta <= 1/8 everywhere: the threshold w_bar is unbounded");
  }
  const double w_bar = std::exp(-ls);
  return 1.0 / (1.0 + c * w_bar);
}

}  // namespace hypo
