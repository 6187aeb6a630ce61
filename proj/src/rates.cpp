#include "hypocert/rates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hypo {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Thm1CaseI: return "thm1-case-i";
    case Regime::Thm1CaseII: return "thm1-case-ii";
    case Regime::Thm3: return "thm3-weakpi";
    case Regime::AppendixA: return "appendixA";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::Thm1CaseI, Regime::Thm1CaseII, Regime::Thm3, Regime::AppendixA}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown regime '" + s + "'");
}

std::string ExponentClass::kind_name() const {
  switch (kind) {
    case Kind::Exponential: return "Exponential";
    case Kind::StretchedExp: return "StretchedExp";
    case Kind::Algebraic: return "Algebraic";
    case Kind::AlgebraicMinus: return "AlgebraicMinus";
  }
  return "?";
}

std::string ExponentClass::symbol() const {
  std::ostringstream os;
  os.precision(6);
  switch (kind) {
    case Kind::Exponential: os << "exp(-lambda t)"; break;
    case Kind::StretchedExp: os << "exp(-c t^" << r << ")"; break;
    case Kind::Algebraic: os << "t^-" << r; break;
    case Kind::AlgebraicMinus: os << "t^-" << r << "+"; break;
  }
  return os.str();
}

ExponentClass table1_exponent(ProfileKind potential, double alpha, ProfileKind kinetic, double delta) {
  using K = ExponentClass::Kind;
  if (potential == ProfileKind::Gaussian) throw std::invalid_argument("potential must be SubExp or Log");
  if (potential == ProfileKind::SubExp && !(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (kinetic == ProfileKind::Gaussian) delta = 2.0;
  const bool x_strong = potential == ProfileKind::SubExp && alpha >= 1.0;
  const bool x_sub = potential == ProfileKind::SubExp && alpha < 1.0;
  const bool v_strong = kinetic != ProfileKind::Log && delta >= 1.0;
  const bool v_sub = kinetic == ProfileKind::SubExp && delta < 1.0;
  const double p = alpha, q = delta;
  if (x_strong) {
    if (v_strong) return {K::Exponential, 0.0};
    if (v_sub) return {K::StretchedExp, delta / (2.0 - delta)};
    return {K::Algebraic, q / 2.0};
  }
  if (x_sub) {
    if (v_strong) return {K::StretchedExp, alpha / (2.0 - alpha)};
    if (v_sub) return {K::StretchedExp, alpha * delta / (2.0 * alpha + 2.0 * delta - 3.0 * alpha * delta)};
    return {K::AlgebraicMinus, q / 2.0};
  }
  if (v_strong) return {K::Algebraic, p / 2.0};
  if (v_sub) return {K::AlgebraicMinus, p / 2.0};
  return {K::Algebraic, p * q / (4.0 + 2.0 * p + 2.0 * q)};
}

std::string table1_symbol(ProfileKind potential, double alpha, ProfileKind kinetic, double delta) {
  const ExponentClass c = table1_exponent(potential, alpha, kinetic, delta);
  if (kinetic == ProfileKind::Gaussian) delta = 2.0;
  const bool x_log = potential == ProfileKind::Log;
  const bool x_strong = !x_log && alpha >= 1.0;
  const bool v_log = kinetic == ProfileKind::Log;
  const bool v_strong = !v_log && delta >= 1.0;
  if (c.kind == ExponentClass::Kind::Exponential) return "exp(-lambda t)";
  if (x_log && v_log) return "t^(-pq/(4+2p+2q))";
  if (x_log) return v_strong ? "t^(-p/2)" : "t^(-p/2+)";
  if (v_log) return x_strong ? "t^(-q/2)" : "t^(-q/2+)";
  if (x_strong) return "exp(-c t^(delta/(2-delta)))";
  if (v_strong) return "exp(-c t^(alpha/(2-alpha)))";
  return "exp(-c t^(alpha delta/(2 alpha+2 delta-3 alpha delta)))";
}

// ---------------------------------------------------------------------------

double RateCertificate::log_envelope(double t) const {
  if (!weak_regime()) {
    if (t <= tau) return 0.0;
    return std::log(theorem1_energy_bound(*thm1, t - tau) / h0_l2_sq);
  }
  if (t <= tau) return std::log(std::max(tau, rate->a()));
  return rate->log_inverse(t - tau);
}

double RateCertificate::envelope(double t) const { return std::exp(log_envelope(t)); }

double RateCertificate::envelope_literal(double t) const {
  if (weak_regime() && t <= tau) return tau;
  return envelope(t);
}

std::string RateCertificate::normalizer_name() const { return weak_regime() ? "Phi(h0)" : "||h0||^2"; }

double RateCertificate::t_reliable() const { return weak_regime() ? tau + rate->t_last() : 1e30; }

RateCertificate certify_thm1(const Model& model, const SpatialConstants& sp, const AveragingConstants& avg,
                             double gamma, double h0_inf, double h0_l2_sq, Thm1Case which) {
  if (!(h0_l2_sq > 0.0)) throw std::invalid_argument("||h0||^2 must be positive");
  RateCertificate c;
  c.regime = which == Thm1Case::I ? Regime::Thm1CaseI : Regime::Thm1CaseII;
  c.tau = sp.tau;
  c.h0_l2_sq = h0_l2_sq;
  c.thm1 = compute_theorem1_constants(model, sp, avg, gamma, h0_inf, h0_l2_sq, which);
  const double s = c.thm1->sigma;
  if (which == Thm1Case::I) {
    c.cls = {ExponentClass::Kind::Algebraic, s / 2.0};
  } else {
    const double d = c.thm1->delta;
    c.cls = {ExponentClass::Kind::Algebraic, s * d / (2.0 * (s + d + 2.0))};
  }
  return c;
}

RateCertificate certify_thm3(const KineticBeta& kin, double a, double tau, ExponentClass cls) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
  RateCertificate c;
  c.regime = kin.route == KineticRoute::AppendixA ? Regime::AppendixA : Regime::Thm3;
  c.tau = tau;
  c.cls = cls;
  c.kinetic = kin;
  c.rate = std::make_shared<RateFunction>(kin.beta, a);
  return c;
}

RateCertificate certify_appendix_a(const Model& model, double C_PL, double gamma, double a, double tau,
                                   const QuadratureCfg& cfg) {
  const KineticBeta kb = beta_kin_appendix_a(model, C_PL, gamma, cfg);
  const auto& s = model.spec;
  return certify_thm3(kb, a, tau, table1_exponent(s.potential, s.potential_param, s.kinetic, s.kinetic_param));
}

FitResult fit_exponent(const RateCertificate& cert, double t_lo, double t_hi) {
  FitResult f;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  if (cert.cls.kind == ExponentClass::Kind::Exponential) return f;
  constexpr int n = 200;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lt = std::log(t_lo) + (std::log(t_hi) - std::log(t_lo)) * i / (n - 1);
    const double le = cert.log_envelope(std::exp(lt));
    const double y = cert.cls.stretched() ? std::log(-le) : le;
    sx += lt;
    sy += y;
    sxx += lt * lt;
    sxy += lt * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.exponent = cert.cls.stretched() ? slope : -slope;
  return f;
}

FitResult fit_exponent(const RateCertificate& cert) {
  const double hi = cert.t_reliable();
  return fit_exponent(cert, hi / 100.0, hi);
}

RateCertificate certify_weak(const Model& model, double gamma, double tau, double a, const QuadratureCfg& cfg) {
  const auto& s = model.spec;
  const ExponentClass cls = table1_exponent(s.potential, s.potential_param, s.kinetic, s.kinetic_param);
  if (model.strongly_confined()) {
    throw std::invalid_argument("strongly confining potential: use the Poincare-Lions route with a supplied C_PL");
  }
  const SpatialConstants sp = compute_spatial_constants(model, tau);
  const VelocityMoments mom = compute_velocity_moments(model, cfg);
  const AveragingConstants avg = compute_averaging_constants(sp, mom, model.potential.L, model.weight.theta);
  return certify_thm3(beta_kin(model, sp, avg, gamma, cfg), a, tau, cls);
}

TauChoice optimize_tau(const Model& model, double gamma, double a, double t_target, const QuadratureCfg& cfg) {
  TauChoice best{0.0, std::numeric_limits<double>::infinity()};
  for (double tau = 0.125; tau <= 16.0; tau *= 2.0) {
    const RateCertificate c = certify_weak(model, gamma, tau, a, cfg);
    const double le = c.log_envelope(t_target);
    if (le < best.log_envelope) best = {tau, le};
  }
  return best;
}

}  // namespace hypo
