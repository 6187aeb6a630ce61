#pragma once

#include "hypocert/interp.hpp"
#include "hypocert/model.hpp"

#include <limits>
#include <memory>
#include <string>

namespace hypo {

// A weak Poincare rate function beta: (0, inf) -> [0, inf], nonincreasing with
// limit 0. Every variant is evaluated in the log domain, log beta(e^ls), so
// that values far below the double range stay comparable.
class BetaFn {
 public:
  virtual ~BetaFn() = default;

  // log beta(e^ls); -inf where beta vanishes.
  virtual double log_eval(double ls) const = 0;
  // log beta(0+); may be +inf.
  virtual double log_at_zero() const = 0;
  // Below this log value the representation is an extrapolation.
  virtual double log_floor() const { return -std::numeric_limits<double>::infinity(); }
  virtual std::string describe() const = 0;

  // log beta(s) with beta(s) := beta(0+) for s <= 0.
  double log_at(double s) const { return s > 0.0 ? log_eval(std::log(s)) : log_at_zero(); }
  double operator()(double s) const { return std::exp(log_at(s)); }
};

using Beta = std::shared_ptr<const BetaFn>;

// eta0 s^-eta1
Beta poly_beta(double eta0, double eta1);
// eta0 exp(-eta1 s^eta2)
Beta stretched_exp_beta(double eta0, double eta1, double eta2);
Beta beta_from_spec(const BetaSpec& spec);

// s -> m(a W^2 + b >= s) for W = <x>^k, tabulated in (log s, log beta).
// Equals 1 for s <= a + b. For k = 0 it is the indicator of s <= a + b.
Beta tail_beta(const Measure& m, double k, double a, double b, const QuadratureCfg& cfg);

// beta(s - c) for s > c, beta(0+) otherwise.
Beta shifted_beta(Beta inner, double c);

// C beta(kappa s).
Beta scaled_beta(Beta inner, double kappa, double C);

struct ChainPoint {
  double log_value = 0.0;
  double log_s1 = 0.0;  // minimizer; s2 = s / s1
};

// inf over s1 s2 = s of s1 beta_v(s2 - c) + beta_x(s1), with beta_v(r) := beta_v(0+) for r <= 0.
class ChainedBeta : public BetaFn {
 public:
  ChainedBeta(Beta bx, Beta bv, double c);

  double log_eval(double ls) const override;
  double log_at_zero() const override;
  double log_floor() const override { return floor_; }
  std::string describe() const override;

  // Direct minimization (no table) with log s1 restricted to [lo, hi].
  ChainPoint minimize(double ls, double lo, double hi) const;
  ChainPoint minimize(double ls) const;
  double objective(double ls, double ls1) const;

  const Beta& beta_x() const { return bx_; }
  const Beta& beta_v() const { return bv_; }
  double c() const { return c_; }

 private:
  Beta bx_, bv_;
  double c_;
  MonotoneTable table_;
  double ls_lo_ = 0.0, lb_lo_ = 0.0;
  double floor_ = -std::numeric_limits<double>::infinity();
};

std::shared_ptr<const ChainedBeta> chained_beta(Beta bx, Beta bv, double c);

// Smallest s with beta(s) <= e^lw, returned as log s; throws if beta stays above.
double log_crossing(const BetaFn& beta, double lw);

// Returns c~ = 1 / (1 + c w_bar) with w_bar = sup{u : beta(1/u) <= 1/8}; then
// the conjugate of shifted_beta(beta, c) dominates c~ K* on (0, 1/8).
double kstar_shift_bound(const BetaFn& beta, double c);

}  // namespace hypo
