#include "hypocert/weakpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypo {

Beta beta_tail_x(const Model& model, double Z_W, double C0_tau, const QuadratureCfg& cfg) {
  return tail_beta(model.mu, model.weight.k, 2.0 * Z_W * C0_tau * C0_tau, 1.0, cfg);
}

Beta velocity_beta(const Model& model, const QuadratureCfg& cfg) {
  if (model.kinetic.beta_v) return beta_from_spec(*model.kinetic.beta_v);
  const auto& g = model.kinetic.weight;
  if (!g || !(g->P_G > 0.0)) throw std::invalid_argument("no weak Poincare inequality available for nu");
  return tail_beta(model.nu, g->k, g->Z_G * g->P_G, 0.0, cfg);
}

std::string to_string(KineticRoute r) {
  switch (r) {
    case KineticRoute::Poincare: return "poincare";
    case KineticRoute::Chained: return "chained";
    case KineticRoute::AppendixA: return "appendix-a";
  }
  return "?";
}

ChainConstant chain_constant(const ChainedBeta& chain, double gamma) {
  const double lg = std::log(2.0 * gamma);
  const double lc = chain.c() > 0.0 ? std::log(chain.c()) : -std::numeric_limits<double>::infinity();
  std::vector<double> ls_grid;
  for (double ls = -20.0; ls <= 60.0 + 1e-9; ls += 0.1) ls_grid.push_back(ls);

  ChainConstant out;
  // Scan from the top for the last infeasible point.
  std::size_t first_ok = ls_grid.size();
  for (std::size_t i = ls_grid.size(); i-- > 0;) {
    const double L = ls_grid[i] + lg;
    const ChainPoint p = chain.minimize(L);
    const bool ok = p.log_s1 > 0.0 && L - p.log_s1 > lc;
    if (!ok) break;
    first_ok = i;
  }
  if (first_ok == ls_grid.size()) {
    out.resolved = false;
    first_ok = ls_grid.size() - 1;
  }
  out.M = std::exp(ls_grid[first_ok]);

  double worst = 0.0;  // log of the largest ratio
  const double cap = std::log(0.25);
  for (std::size_t i = 0; i <= first_ok; ++i) {
    const double L = ls_grid[i] + lg;
    const double hi = chain.c() > 0.0 ? L - lc : L + 40.0;
    double lt = cap;
    if (hi > 0.0) lt = std::min(cap, chain.minimize(L, 0.0, hi).log_value);
    worst = std::max(worst, lt - chain.minimize(L).log_value);
  }
  out.C_bar = std::exp(worst);
  return out;
}

KineticBeta beta_kin(const Model& model, const SpatialConstants& sp, const AveragingConstants& avg, double gamma,
                     const QuadratureCfg& cfg) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  KineticBeta kb;
  const double c0 = avg.C0_tau, c1 = avg.C1_tau;
  if (model.kinetic.C_P && model.kinetic.active == VelocityInequality::Poincare) {
    const double cp = *model.kinetic.C_P;
    kb.route = KineticRoute::Poincare;
    kb.C_tilde = sp.Z_W * (c0 * c0 / (gamma * cp) + c1 * c1 * gamma);
    kb.b = 1.0 / (2.0 * gamma * cp);
    kb.beta = tail_beta(model.mu, model.weight.k, kb.C_tilde, kb.b, cfg);
    return kb;
  }
  kb.route = KineticRoute::Chained;
  kb.c = gamma * gamma * c1 * c1 / (c0 * c0);
  kb.chain = chained_beta(beta_tail_x(model, sp.Z_W, c0, cfg), velocity_beta(model, cfg), kb.c);
  const ChainConstant cc = chain_constant(*kb.chain, gamma);
  kb.C_bar = cc.C_bar;
  kb.M = cc.M;
  kb.M_resolved = cc.resolved;
  kb.beta = scaled_beta(kb.chain, 2.0 * gamma, kb.C_bar);
  return kb;
}

KineticBeta beta_kin_appendix_a(const Model& model, double C_PL, double gamma, const QuadratureCfg& cfg) {
  if (!(C_PL > 0.0)) throw std::invalid_argument("Poincare-Lions route needs C_PL > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  if (!model.strongly_confined()) throw std::invalid_argument("Poincare-Lions route needs a strongly confining potential");
  KineticBeta kb;
  kb.route = KineticRoute::AppendixA;
  kb.beta = scaled_beta(shifted_beta(velocity_beta(model, cfg), gamma / 2.0), 1.0 / C_PL, C_PL);
  return kb;
}

}  // namespace hypo
