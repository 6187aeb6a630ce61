#pragma once

#include "hypocert/beta.hpp"
#include "hypocert/constants.hpp"

namespace hypo {

// s1 -> mu(s1 <= 2 Z_W C0_tau^2 W^2 + 1).
Beta beta_tail_x(const Model& model, double Z_W, double C0_tau, const QuadratureCfg& cfg);

// Weak Poincare beta of nu: the user-supplied closed form when present,
// otherwise v -> nu(Z_G P_G G^2 >= s) from the weighted inequality.
Beta velocity_beta(const Model& model, const QuadratureCfg& cfg);

enum class KineticRoute { Poincare, Chained, AppendixA };
std::string to_string(KineticRoute r);

struct KineticBeta {
  KineticRoute route = KineticRoute::Poincare;
  Beta beta;
  // Poincare route: mu(C_tilde W^2 + b >= s).
  double C_tilde = 0.0;
  double b = 0.0;
  // Chained route: C_bar * chain(2 gamma s).
  std::shared_ptr<const ChainedBeta> chain;
  double c = 0.0;
  double C_bar = 1.0;
  double M = 0.0;
  bool M_resolved = true;  // false when the minimizer never became feasible on the grid
};

struct ChainConstant {
  double C_bar = 1.0;
  double M = 0.0;
  bool resolved = true;
};

// M is the smallest grid s beyond which the unconstrained minimizer at 2 gamma s
// has s1 > 1 and s2 > c. C_bar is the largest ratio of the constrained infimum,
// capped at 1/4 (the variance of a mean-zero function never exceeds osc^2/4),
// to chain(2 gamma s) over grid s <= M, and at least 1.
ChainConstant chain_constant(const ChainedBeta& chain, double gamma);

KineticBeta beta_kin(const Model& model, const SpatialConstants& sp, const AveragingConstants& avg, double gamma,
                     const QuadratureCfg& cfg);

// Strong spatial confinement: C_PL beta_v(s / C_PL - gamma / 2).
KineticBeta beta_kin_appendix_a(const Model& model, double C_PL, double gamma, const QuadratureCfg& cfg);

}  // namespace hypo
