#pragma once

#include "hypocert/quadrature.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace hypo {

// <x> = sqrt(1 + x^2) and its logarithm, finite for every finite x.
double bracket(double x);
double log_bracket(double x);

// Surface area of the unit sphere in R^d (2 for d = 1).
double sphere_area(int d);

enum class ProfileKind { SubExp, Log, Gaussian };

// Radial function F(|x|) on R^d:
//   SubExp   F = <x>^a
//   Log      F = (d + a) log<x>
//   Gaussian F = |x|^2 / 2
struct Profile {
  ProfileKind kind = ProfileKind::Gaussian;
  double a = 0.0;
  int d = 1;

  double value(double r) const;
  double deriv(double r) const;       // F'(r), odd in r
  double second(double r) const;      // F''(r)
  double tangential(double r) const;  // F'(r)/r
};

std::string to_string(ProfileKind k);

enum class Provenance { ClosedForm, MuckenhouptNumeric, UserSupplied, DiscreteSpectral, Unavailable };
std::string to_string(Provenance p);

// Radially symmetric measure on R^d. For d = 1 the density is even and the
// integrand is evaluated at signed points; for d > 1 integrands are radial.
class Measure {
 public:
  Measure() = default;
  static Measure lebesgue(int d);
  // log_density need not be normalized; the mass and the truncation radius
  // (tail mass below cfg.tail_mass) are fixed here.
  Measure(int d, RealFn log_density, const QuadratureCfg& cfg);

  int dim() const { return d_; }
  bool is_lebesgue() const { return lebesgue_; }
  double log_mass() const { return log_mass_; }
  double radius() const { return radius_; }
  double log_density(double r) const;
  double density(double r) const;
  // Unnormalized log density, as supplied.
  double raw_log_density(double r) const { return lebesgue_ ? 0.0 : log_density_(r); }

 private:
  int d_ = 1;
  bool lebesgue_ = true;
  RealFn log_density_;
  double log_mass_ = 0.0;
  double radius_ = 1.0;
};

QuadResult integrate(const RealFn& f, const Measure& m, const QuadratureCfg& cfg);
// Same, splitting bulk and tails at an explicit radius.
QuadResult integrate(const RealFn& f, const Measure& m, const QuadratureCfg& cfg, double radius);

// log m(|x| >= r), accurate far below the double underflow threshold.
double log_tail_mass(const Measure& m, double r, const QuadratureCfg& cfg);

struct Potential {
  Profile profile;
  double L = 0.0;  // sup |grad phi|
  double M = 0.0;  // sup of |Hessian eigenvalues|
  double log_Z = 0.0;
};

// W(x) = <x>^k.
struct Weight {
  double k = 0.0;
  double sigma = 0.0;
  double theta = 1.0;
  double P_W = 0.0;
  Provenance P_W_provenance = Provenance::Unavailable;
  double Z_W = 1.0;
  double W_sigma_norm = 1.0;  // ||W||_{L^sigma(mu)}

  double value(double x) const;
  double log_value(double x) const;
  double grad_ratio(double x) const;  // |grad W| / W
};

enum class VelocityInequality { Poincare, Weighted, WeakPI };
std::string to_string(VelocityInequality v);

// Closed-form velocity beta: Poly eta0 s^-eta1, StretchedExp eta0 exp(-eta1 s^eta2).
struct BetaSpec {
  enum class Kind { Poly, StretchedExp } kind = Kind::Poly;
  double eta0 = 1.0, eta1 = 1.0, eta2 = 1.0;
};

// G(v) = <v>^k together with the normalized weighted Poincare constant P_G
// (Var under G^-2 nu / Z_G) and the nu-centred constant P_v when it exists.
struct VelocityWeight {
  double k = 1.0;
  double delta_w = 1.0;
  double Z_G = 1.0;
  double P_G = 0.0;
  Provenance P_G_provenance = Provenance::Unavailable;
  double G_delta_norm = 1.0;  // ||G||_{L^delta_w(nu)}
  std::optional<double> P_v;

  double value(double v) const { return std::exp(k * log_bracket(v)); }
};

struct Kinetic {
  Profile profile;
  double log_Z = 0.0;
  std::optional<double> C_P;
  Provenance C_P_provenance = Provenance::Unavailable;
  std::optional<VelocityWeight> weight;
  std::optional<BetaSpec> beta_v;
  VelocityInequality active = VelocityInequality::Poincare;
};

struct ModelSpec {
  ProfileKind potential = ProfileKind::Log;
  double potential_param = 2.0;
  ProfileKind kinetic = ProfileKind::Gaussian;
  double kinetic_param = 0.0;
  int d = 1;
  std::optional<double> sigma;
  std::optional<double> theta_W;
  std::optional<double> P_W;
  std::optional<double> C_P;
  std::optional<double> P_G;
  std::optional<double> delta_w;
  std::optional<BetaSpec> beta_v;
};

struct Model {
  ModelSpec spec;
  QuadratureCfg cfg;
  int d = 1;
  Potential potential;
  Kinetic kinetic;
  Weight weight;
  Measure mu;
  Measure nu;
  Measure mu_w;

  // SubExp potentials with alpha >= 1 satisfy a standard Poincare inequality.
  bool strongly_confined() const;
};

Model make_benchmark(const ModelSpec& spec, const QuadratureCfg& cfg);

// B = sup_r lambda([r, inf)) * int_0^r e^F for lambda = <x>^{-2k} e^{-F} dx on
// the half line; 4B bounds the weighted Hardy constant.
double muckenhoupt_constant(const Profile& base, double k, const QuadratureCfg& cfg);

// Smallest nonzero eigenvalue of the finite-volume generator of e^{-F} on a
// uniform grid of n cells (d = 1).
double discrete_spectral_gap(const Profile& base, int n, const QuadratureCfg& cfg);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double bound = 0.0;
  double witness = 0.0;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
};

AssumptionReport validate_assumptions(const Model& model, const QuadratureCfg& cfg);

}  // namespace hypo
