#include "hypocert/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hypo {

double compute_Zw(const Model& model, const QuadratureCfg& cfg) {
  const Weight& w = model.weight;
  return integrate([&w](double x) { return std::exp(-2.0 * w.log_value(x)); }, model.mu, cfg).value;
}

double compute_Rwtau(double P_W, double tau) {
  if (!(P_W > 0.0) || !(tau > 0.0)) throw std::invalid_argument("P_W and tau must be positive");
  const double s = tau / std::sqrt(P_W);
  if (s < 1e-4) return 1.0 - s * s / 6.0;
  if (s < 700.0) return s / std::sinh(s);
  return std::exp(std::log(2.0 * s) - s);
}

C0C1 compute_C0_C1(double tau, double P_W, double Z_W, double M, double R) {
  if (!(tau > 0.0) || !(P_W > 0.0) || !(Z_W > 0.0) || !(M >= 0.0) || !(R < 1.0))
    throw std::invalid_argument("spatial inputs out of range");
  const double pi = std::numbers::pi;
  const double sqrt3 = std::sqrt(3.0);
  const double gap = 1.0 - R;
  C0C1 c;
  c.C0 = sqrt3 * std::max(tau / pi, std::sqrt(40.0 * P_W / gap));
  const double e = -std::expm1(-tau / std::sqrt(P_W));  // 1 - e^{-tau/sqrt(P_W)}
  const double bracket_term = 1.0 + 2.0 / e;
  const double first = std::sqrt(2.0 + 4.0 / Z_W + M * std::max(tau * tau / (pi * pi), P_W));
  const double second =
      std::sqrt(1.0 / gap) * std::sqrt(53.0 + 36.0 * (1.0 / Z_W + M * P_W + bracket_term * bracket_term));
  c.C1 = sqrt3 * std::max(first, second);
  return c;
}

double compute_C_Lions(double C0, double C1, double Z_W, double theta_W) {
  return std::sqrt((1.0 + 2.0 / Z_W) * C1 * C1 + (1.0 + 2.0 * theta_W * theta_W) * C0 * C0);
}

SpatialConstants compute_spatial_constants(const Model& model, double tau) {
  const Weight& w = model.weight;
  if (!(w.P_W > 0.0)) throw std::invalid_argument("P_W unavailable for this potential; supply it explicitly");
  SpatialConstants sp;
  sp.tau = tau;
  sp.Z_W = w.Z_W;
  sp.P_W = w.P_W;
  sp.theta_W = w.theta;
  sp.R_W_tau = compute_Rwtau(w.P_W, tau);
  const C0C1 c = compute_C0_C1(tau, w.P_W, w.Z_W, model.potential.M, sp.R_W_tau);
  sp.C0 = c.C0;
  sp.C1 = c.C1;
  sp.C_Lions = compute_C_Lions(c.C0, c.C1, w.Z_W, w.theta);
  return sp;
}

VelocityMoments compute_velocity_moments(const Model& model, const QuadratureCfg& cfg) {
  const Profile& psi = model.kinetic.profile;
  const int d = model.d;
  VelocityMoments m;
  m.d = d;
  m.n2 = integrate([&](double v) { return psi.deriv(v) * psi.deriv(v); }, model.nu, cfg).value;
  m.n4 = integrate([&](double v) { return std::pow(psi.deriv(v), 4); }, model.nu, cfg).value;
  m.h2 = integrate(
             [&](double v) {
               const double t = d > 1 ? psi.tangential(v) : 0.0;
               return psi.second(v) * psi.second(v) + (d - 1) * t * t;
             },
             model.nu, cfg)
             .value;
  if (!std::isfinite(m.n4) || !std::isfinite(m.h2)) throw std::runtime_error("velocity moments are not finite");
  // grad psi = psi'(r) v / r; the angular mean of v_i v_j / r^2 is delta_ij / d.
  m.scrM = SymMatrix(d);
  for (int i = 0; i < d; ++i) m.scrM(i, i) = m.n2 / d;
  const auto ev = jacobi_eigenvalues(m.scrM);
  if (!(ev.front() > 0.0)) throw std::runtime_error("scrM is not positive definite");
  m.rho_scrM = ev.back();
  m.calM = spd_inverse(m.scrM);
  for (double& x : m.calM.a) x *= m.n2;
  m.rho_calM = jacobi_eigenvalues(m.calM).back();
  // G^calM = calM G with calM = rho_calM Id for radial psi.
  const double s2 = m.rho_calM * m.rho_calM / m.n2;
  m.gH1 = std::sqrt(1.0 + m.h2 / m.n2);
  m.cross1 = std::sqrt(s2 * m.n4);
  m.cross2 = std::sqrt(s2 * m.h2);
  return m;
}

AveragingConstants compute_averaging_constants(const SpatialConstants& sp, const VelocityMoments& mom, double L,
                                               double theta_W) {
  const double inv_n = 1.0 / std::sqrt(mom.n2);
  const double zw = 1.0 / std::sqrt(sp.Z_W);
  AveragingConstants a;
  a.C0_tau = sp.C_Lions * (inv_n * (mom.cross1 + L * mom.cross2) +
                           zw * (1.0 + std::sqrt(2.0 * mom.rho_scrM) * std::max(1.0, theta_W)) +
                           mom.rho_calM * inv_n);
  a.C1_tau = sp.C_Lions * (zw + inv_n * mom.rho_calM * mom.gH1);
  return a;
}

double invert_increasing(const std::function<double(double)>& f, double target, double hi) {
  if (!(target >= 0.0)) throw std::invalid_argument("target must be nonnegative");
  if (target == 0.0) return 0.0;
  double lo = 0.0;
  hi = std::max(hi, 1e-300);
  while (f(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("inversion bracket diverged");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

WeightedRateConstants compute_theorem1_constants(const Model& model, const SpatialConstants& sp,
                                                 const AveragingConstants& avg, double gamma, double h0_inf,
                                                 double H0, Thm1Case which) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(h0_inf > 0.0) || !(H0 > 0.0)) throw std::invalid_argument("initial data bounds must be positive");
  const Weight& w = model.weight;
  const double sigma = w.sigma;
  WeightedRateConstants k;
  k.which = which;
  k.sigma = sigma;
  k.H0 = H0;
  k.C2 = std::pow(4.0, 2.0 / (sigma + 2.0)) * std::pow(sp.Z_W, sigma / (sigma + 2.0)) *
         std::pow(h0_inf, 4.0 / (sigma + 2.0)) * std::pow(w.W_sigma_norm, 2.0 * sigma / (sigma + 2.0));
  const double e_s = sigma / (sigma + 2.0);
  const double c0 = avg.C0_tau, c1 = avg.C1_tau;

  if (which == Thm1Case::I) {
    if (!model.kinetic.C_P) throw std::invalid_argument("case (i) needs a Poincare constant for nu");
    const double cp = *model.kinetic.C_P;
    k.A1 = 1.0 / (2.0 * gamma * cp);
    k.A2 = k.C2 * std::pow(c0 * c0 / (gamma * cp) + gamma * c1 * c1, e_s);
    const double a1 = k.A1, a2 = k.A2;
    k.phi0 = invert_increasing([=](double y) { return a1 * y + a2 * std::pow(y, e_s); }, H0, H0 * (1.0 / a1 + 1.0));
    return k;
  }

  const auto& g = model.kinetic.weight;
  if (!g || !g->P_v) throw std::invalid_argument("case (ii) needs a velocity weight with a finite P_v");
  const double delta = g->delta_w;
  k.delta = delta;
  const double e_d = delta / (2.0 + delta);
  k.C3 = std::pow(2.0, (4.0 - delta) / (2.0 + delta)) * std::pow(*g->P_v, e_d) * std::pow(gamma, -e_d) *
         std::pow(h0_inf, 4.0 / (2.0 + delta)) * std::pow(g->G_delta_norm, 2.0 * delta / (2.0 + delta));
  const double c2 = k.C2, c3 = k.C3;
  auto forward = [=](double y) {
    const double yd = std::pow(y, e_d);
    return c3 * yd + c2 * std::pow(2.0 * c0 * c0 * c3 * yd + gamma * c1 * c1 * y, e_s);
  };
  k.phi0 = invert_increasing(forward, H0, H0);
  k.B = c3 * std::pow(k.phi0, 2.0 * delta / ((delta + 2.0) * (sigma + 2.0))) +
        c2 * std::pow(2.0 * c0 * c0 * c3 + gamma * c1 * c1 * std::pow(k.phi0, 2.0 / (delta + 2.0)), e_s);
  return k;
}

double theorem1_energy_bound(const WeightedRateConstants& k, double t) {
  const double s = k.sigma;
  if (k.which == Thm1Case::I) {
    const double rate = 2.0 * std::pow(k.A1 * std::pow(k.phi0, 2.0 / (s + 2.0)) + k.A2, -(s + 2.0) / s) / s;
    return std::pow(std::pow(k.H0, -2.0 / s) + rate * t, -s / 2.0);
  }
  const double d = k.delta;
  const double e = 2.0 * (s + d + 2.0) / (s * d);
  const double rate = e * std::pow(k.B, -(d + 2.0) * (s + 2.0) / (d * s));
  return std::pow(std::pow(k.H0, -e) + rate * t, -1.0 / e);
}

}  // namespace hypo
