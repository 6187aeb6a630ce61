#pragma once

#include "hypocert/beta.hpp"

#include <optional>
#include <vector>

namespace hypo {

// log K*(w) where K*(w) = sup_u {u w - u beta(1/u)} = sup_s (w - beta(s)) / s.
// The maximizer lies between the crossings beta = w and beta = w/2 (times 2).
double log_kstar(const BetaFn& beta, double lw);

// Closed form of K* for poly(eta0, eta1).
double poly_kstar(double eta0, double eta1, double w);

// K* tabulated at w_j = a exp(-d_j) with d_0 = 0 and d_j = 1e-6 * 1.02^(j-1).
struct KStar {
  double a = 0.25;
  std::vector<double> log_w;  // decreasing
  std::vector<double> log_k;
  std::optional<double> poly_eta0, poly_eta1;  // closed-form tag

  double operator()(double w) const;  // log-log linear interpolation
};

// Tabulates down to w_min.
KStar legendre_kstar(const Beta& beta, double a, double w_min);

// F_a(z) = int_z^a dw / K*(w) and its inverse. log(w / K*) is interpolated
// linearly in log w between nodes, so F and F^-1 are exact inverses of each
// other on the tabulated range.
class RateFunction {
 public:
  // The table stops once F >= t_max or once w falls below the range where
  // beta is tabulated rather than extrapolated.
  RateFunction(const Beta& beta, double a = 0.25, double t_max = 1e300);

  double a() const { return kstar_.a; }
  const KStar& kstar() const { return kstar_; }
  double F(double z) const;
  // F^-1(t) on [0, t_last]; beyond the table it returns the last tabulated w,
  // which is larger than the true inverse.
  double inverse(double t) const;
  double log_inverse(double t) const;
  double t_last() const { return cum_.back(); }
  bool truncated_by_floor() const { return floor_hit_; }

 private:
  KStar kstar_;
  std::vector<double> log_q_;  // log(w / K*(w))
  std::vector<double> cum_;    // F at each node
  bool floor_hit_ = false;
};

}  // namespace hypo
