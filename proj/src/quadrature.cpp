#include "hypocert/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace hypo {

void QuadratureCfg::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
  if (!(tail_mass > 0.0) || tail_mass > 1e-4) throw std::invalid_argument("tail mass target must lie in (0, 1e-4]");
  if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be positive");
}

QuadratureFailure::QuadratureFailure(const std::string& what, double lo_, double hi_, double value_, double error_)
    : std::runtime_error(what), lo(lo_), hi(hi_), value(value_), error(error_) {}

namespace {

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const RealFn& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  static const auto& kx = Kronrod::abscissa();
  static const auto& kw = Kronrod::weights();
  static const auto& gw = Gauss::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = kw[0] * f0;
  double g = gw[0] * f0;
  for (std::size_t i = 1; i < kx.size(); ++i) {
    const double fl = f(c - h * kx[i]);
    const double fr = f(c + h * kx[i]);
    k += kw[i] * (fl + fr);
    // Gauss nodes are the even-indexed Kronrod abscissae.
    if (i % 2 == 0) g += gw[i / 2] * (fl + fr);
  }
  k *= h;
  g *= h;
  if (!std::isfinite(k)) {
    std::ostringstream os;
    os << "non-finite integrand on [" << a << ", " << b << "]";
    throw QuadratureFailure(os.str(), a, b, k, INFINITY);
  }
  return {a, b, k, std::abs(k - g)};
}

}  // namespace

QuadResult adaptive_gk(const RealFn& f, const std::vector<double>& breaks, const QuadratureCfg& cfg) {
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    Segment s = gk15(f, breaks[i], breaks[i + 1]);
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  int splits = 0;
  // Error estimates below a few ulps of the integral are roundoff.
  const double floor_tol = 64.0 * std::numeric_limits<double>::epsilon();
  while (!heap.empty() && err > std::max({cfg.abs_tol, cfg.rel_tol * std::abs(total), floor_tol * std::abs(total)})) {
    Segment worst = heap.top();
    if (splits >= cfg.max_subdivisions || worst.b - worst.a <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(worst.a)) {
      std::ostringstream os;
      os << "quadrature did not converge after " << splits << " subdivisions; worst bracket [" << worst.a << ", "
         << worst.b << "], error " << err;
      throw QuadratureFailure(os.str(), worst.a, worst.b, total, err);
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment l = gk15(f, worst.a, mid);
    Segment r = gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++splits;
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {total, err};
}

QuadResult adaptive_gk(const RealFn& f, double a, double b, const QuadratureCfg& cfg) {
  return adaptive_gk(f, std::vector<double>{a, b}, cfg);
}

std::vector<double> dyadic_breaks(int levels) {
  std::vector<double> br{0.0};
  for (int k = levels; k >= 1; --k) br.push_back(std::ldexp(1.0, -k));
  for (int k = 2; k <= levels; ++k) br.push_back(1.0 - std::ldexp(1.0, -k));
  br.push_back(1.0);
  return br;
}

QuadResult integrate_upper_tail(const RealFn& f, double a, const QuadratureCfg& cfg) {
  if (!(a > 0.0)) throw std::invalid_argument("upper tail start must be positive");
  auto g = [&](double t) {
    const double x = a / t;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v * a / (t * t);
  };
  return adaptive_gk(g, dyadic_breaks(40), cfg);
}

}  // namespace hypo
