#include "hypocert/interp.hpp"

#include <stdexcept>

namespace hypo {

MonotoneTable::MonotoneTable(std::vector<double> x, std::vector<double> y) {
  const std::size_t n = x.size();
  if (n < 4 || y.size() != n) throw std::invalid_argument("monotone table needs at least four matching points");
  x0_ = x.front();
  x1_ = x.back();
  y0_ = y.front();
  y1_ = y.back();
  s0_ = (y[1] - y[0]) / (x[1] - x[0]);
  s1_ = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  spline_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(y));
}

double MonotoneTable::operator()(double x) const {
  if (x <= x0_) return y0_ + s0_ * (x - x0_);
  if (x >= x1_) return y1_ + s1_ * (x - x1_);
  return (*spline_)(x);
}

}  // namespace hypo
