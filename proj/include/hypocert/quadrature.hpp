#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypo {

using RealFn = std::function<double(double)>;

struct QuadratureCfg {
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  double tail_mass = 1e-8;
  int max_subdivisions = 4000;

  // Throws std::invalid_argument unless tolerances > 0 and tail_mass in (0, 1e-4].
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& what, double lo, double hi, double value, double error);

  double lo;
  double hi;
  double value;
  double error;
};

// Globally adaptive 15-point Gauss-Kronrod over consecutive breakpoints.
// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
QuadResult adaptive_gk(const RealFn& f, const std::vector<double>& breaks, const QuadratureCfg& cfg);
QuadResult adaptive_gk(const RealFn& f, double a, double b, const QuadratureCfg& cfg);

// Integral of f over [a, inf), a > 0, through the substitution x = a/t.
QuadResult integrate_upper_tail(const RealFn& f, double a, const QuadratureCfg& cfg);

// Breakpoints on [0, 1] refined geometrically toward both ends.
std::vector<double> dyadic_breaks(int levels);

}  // namespace hypo
