#pragma once

#include "hypocert/constants.hpp"
#include "hypocert/legendre.hpp"
#include "hypocert/weakpi.hpp"

#include <memory>
#include <optional>
#include <string>

namespace hypo {

enum class Regime { Thm1CaseI, Thm1CaseII, Thm3, AppendixA };
std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

// Exponential: exp(-lambda t), lambda not certified (r unused).
// StretchedExp: exp(-c t^r).  Algebraic: t^-r.  AlgebraicMinus: t^{-r + eps} for every eps > 0.
struct ExponentClass {
  enum class Kind { Exponential, StretchedExp, Algebraic, AlgebraicMinus };
  Kind kind = Kind::Algebraic;
  double r = 0.0;

  std::string symbol() const;
  std::string kind_name() const;
  bool stretched() const { return kind == Kind::StretchedExp; }
};

// Rate-table cell. SubExp with parameter >= 1 and Gaussian count as strongly
// confining (the Gaussian kinetic energy behaves as delta = 2).
ExponentClass table1_exponent(ProfileKind potential, double pot_param, ProfileKind kinetic, double kin_param);
// The cell's rate as a formula in the symbolic parameters alpha, delta, p, q.
std::string table1_symbol(ProfileKind potential, double pot_param, ProfileKind kinetic, double kin_param);

struct FitResult {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double t_lo = 0.0;
  double t_hi = 0.0;
};

class RateCertificate {
 public:
  std::string id;
  Regime regime = Regime::Thm3;
  double tau = 1.0;
  ExponentClass cls;

  // Weighted-route data; the envelope is normalized by ||h0||^2.
  std::optional<WeightedRateConstants> thm1;
  double h0_l2_sq = 1.0;

  // Weak-dissipation route data; the envelope is normalized by Phi(h0).
  std::shared_ptr<const RateFunction> rate;
  std::optional<KineticBeta> kinetic;

  // Bound on ||h(t)||^2 / normalizer. For the weak-dissipation route and t <= tau it is
  // max(tau, a); envelope_literal keeps the bare tau there.
  double envelope(double t) const;
  double log_envelope(double t) const;
  double envelope_literal(double t) const;
  std::string normalizer_name() const;
  bool weak_regime() const { return regime == Regime::Thm3 || regime == Regime::AppendixA; }

  // Largest time with a tabulated (not clamped) envelope.
  double t_reliable() const;
};

RateCertificate certify_thm1(const Model& model, const SpatialConstants& sp, const AveragingConstants& avg,
                             double gamma, double h0_inf, double h0_l2_sq, Thm1Case which);

RateCertificate certify_thm3(const KineticBeta& kin, double a, double tau, ExponentClass cls);

RateCertificate certify_appendix_a(const Model& model, double C_PL, double gamma, double a, double tau,
                                   const QuadratureCfg& cfg);

// Least squares on the last two decades of the reliable range: log F against
// log t, or log(-log F) for stretched classes. Exponential classes are not fitted.
FitResult fit_exponent(const RateCertificate& cert);
FitResult fit_exponent(const RateCertificate& cert, double t_lo, double t_hi);

// Full weak-regime certificate for a benchmark model: constants, beta_kin and F.
RateCertificate certify_weak(const Model& model, double gamma, double tau, double a, const QuadratureCfg& cfg);

struct TauChoice {
  double tau = 1.0;
  double log_envelope = 0.0;
};

// Coarse search over tau in {1/8, ..., 16} minimizing the weak envelope at t_target.
TauChoice optimize_tau(const Model& model, double gamma, double a, double t_target, const QuadratureCfg& cfg);

}  // namespace hypo
