#pragma once

// Independent reference implementations shared by the unit tests and the
// acceptance binary.

#include "hypocert/beta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace hypo::oracle {

// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Discrete conjugate sup_i (u_i w - K(u_i)) for all sorted w at once: the
// maximizer walks monotonically along the lower convex hull of (u_i, K(u_i)).
inline std::vector<double> brute_conjugate(const BetaFn& beta, const std::vector<double>& ws, double u_lo, double u_hi,
                                    int n) {
  std::vector<double> u(n), k(n);
  for (int i = 0; i < n; ++i) {
    u[i] = u_lo * std::pow(u_hi / u_lo, static_cast<double>(i) / (n - 1));
    k[i] = u[i] * beta(1.0 / u[i]);
  }
  std::vector<int> hull;
  for (int i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull.back();
      // drop b if it lies on or above the chord a-i
      if ((k[b] - k[a]) * (u[i] - u[a]) >= (k[i] - k[a]) * (u[b] - u[a])) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<std::size_t> order(ws.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ws[a] < ws[b]; });
  std::vector<double> out(ws.size());
  std::size_t h = 0;
  for (auto idx : order) {
    const double w = ws[idx];
    while (h + 1 < hull.size() && u[hull[h + 1]] * w - k[hull[h + 1]] >= u[hull[h]] * w - k[hull[h]]) ++h;
    out[idx] = std::max(0.0, u[hull[h]] * w - k[hull[h]]);
  }
  return out;
}

// Second code path for C0, C1, C_Lions in long double with R written as the
// unsimplified ratio of exponentials.
struct Oracle {
  long double C0, C1, CL;
};
inline Oracle constants(long double tau, long double P, long double Z, long double M, long double theta) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double sp = std::sqrt(P);
  const long double R = 2 * tau * std::exp(-tau / sp) / (sp * (1 - std::exp(-2 * tau / sp)));
  const long double a = tau / pi;
  const long double b = std::sqrt(40 * P / (1 - R));
  const long double C0 = std::sqrt(3.0L) * (a > b ? a : b);
  const long double m1 = tau * tau / (pi * pi) > P ? tau * tau / (pi * pi) : P;
  const long double f = std::sqrt(2 + 4 / Z + M * m1);
  const long double e = 1 + 2 / (1 - std::exp(-tau / sp));
  const long double g = std::sqrt(53 + 36 * (1 / Z + M * P + e * e)) / std::sqrt(1 - R);
  const long double C1 = std::sqrt(3.0L) * (f > g ? f : g);
  const long double CL = std::sqrt((1 + 2 / Z) * C1 * C1 + (1 + 2 * theta * theta) * C0 * C0);
  return {C0, C1, CL};
}

}  // namespace hypo::oracle
