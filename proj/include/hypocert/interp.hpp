#pragma once

#include <cmath>
#include <memory>
#include <vector>

// pchip in Boost 1.74 calls unqualified isnan.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace hypo {

// Shape-preserving cubic interpolant of tabulated data. Outside the table the
// end secants extend it linearly.
class MonotoneTable {
 public:
  MonotoneTable() = default;
  MonotoneTable(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double front() const { return x0_; }
  double back() const { return x1_; }
  bool empty() const { return !spline_; }

 private:
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline_;
  double x0_ = 0.0, x1_ = 0.0, y0_ = 0.0, y1_ = 0.0, s0_ = 0.0, s1_ = 0.0;
};

}  // namespace hypo
