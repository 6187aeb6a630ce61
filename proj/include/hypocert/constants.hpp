#pragma once

#include "hypocert/linalg.hpp"
#include "hypocert/model.hpp"

#include <functional>
#include <optional>

namespace hypo {

struct SpatialConstants {
  double tau = 1.0;
  double Z_W = 1.0;
  double P_W = 0.0;
  double theta_W = 1.0;
  double R_W_tau = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  double C_Lions = 0.0;
};

struct VelocityMoments {
  int d = 1;
  double n2 = 0.0;  // int |grad psi|^2 dnu
  double n4 = 0.0;  // int |grad psi|^4 dnu
  double h2 = 0.0;  // int |hess psi|^2 dnu (Frobenius)
  SymMatrix scrM;
  double rho_scrM = 0.0;
  SymMatrix calM;  // n2 * scrM^{-1}
  double rho_calM = 0.0;
  double gH1 = 0.0;     // ||grad psi / sqrt(n2)||_{H^1(nu)}
  double cross1 = 0.0;  // (sum_i ||G_i^calM grad psi||^2)^{1/2}
  double cross2 = 0.0;  // (sum_i ||grad G_i^calM||^2)^{1/2}
};

struct AveragingConstants {
  double C0_tau = 0.0;
  double C1_tau = 0.0;
};

enum class Thm1Case { I, II };

struct WeightedRateConstants {
  Thm1Case which = Thm1Case::I;
  double C2 = 0.0;
  double C3 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double B = 0.0;
  double phi0 = 0.0;
  double H0 = 0.0;      // initial energy bound used for phi0
  double sigma = 0.0;
  double delta = 0.0;   // weight exponent of case (ii)
};

double compute_Zw(const Model& model, const QuadratureCfg& cfg);

// 2 tau e^{-s} / (sqrt(P_W) (1 - e^{-2s})) with s = tau / sqrt(P_W); equals s / sinh s.
double compute_Rwtau(double P_W, double tau);

struct C0C1 {
  double C0 = 0.0;
  double C1 = 0.0;
};
C0C1 compute_C0_C1(double tau, double P_W, double Z_W, double M, double R_W_tau);

double compute_C_Lions(double C0, double C1, double Z_W, double theta_W);

SpatialConstants compute_spatial_constants(const Model& model, double tau);

VelocityMoments compute_velocity_moments(const Model& model, const QuadratureCfg& cfg);

AveragingConstants compute_averaging_constants(const SpatialConstants& sp, const VelocityMoments& mom, double L,
                                               double theta_W);

// Solves f(y) = target for increasing f with f(0) = 0 by bisection; the upper
// bracket starts at hi and doubles until it brackets the root.
double invert_increasing(const std::function<double(double)>& f, double target, double hi);

// H0 bounds the initial L^2(Theta) energy and h0_inf the sup norm of h0.
WeightedRateConstants compute_theorem1_constants(const Model& model, const SpatialConstants& sp,
                                                 const AveragingConstants& avg, double gamma, double h0_inf,
                                                 double H0, Thm1Case which);

// Energy bound H_tau(t) of the Bihari-LaSalle step for either case.
double theorem1_energy_bound(const WeightedRateConstants& k, double t);

}  // namespace hypo
