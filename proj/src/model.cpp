#include "hypocert/model.hpp"

#include "hypocert/linalg.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hypo {

double bracket(double x) { return std::exp(log_bracket(x)); }

double log_bracket(double x) {
  const double ax = std::abs(x);
  if (ax < 1e8) return 0.5 * std::log1p(ax * ax);
  return std::log(ax) + 0.5 * std::log1p(1.0 / (ax * ax));
}

double sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace {

// x^2 / (1 + x^2) without overflow.
double sq_ratio(double x) {
  if (x == 0.0) return 0.0;
  return 1.0 / (1.0 + 1.0 / (x * x));
}

}  // namespace

double Profile::value(double r) const {
  switch (kind) {
    case ProfileKind::SubExp: return std::exp(a * log_bracket(r));
    case ProfileKind::Log: return (d + a) * log_bracket(r);
    case ProfileKind::Gaussian: return 0.5 * r * r;
  }
  return 0.0;
}

double Profile::deriv(double r) const {
  switch (kind) {
    case ProfileKind::SubExp: return a * r * std::exp((a - 2.0) * log_bracket(r));
    case ProfileKind::Log: return std::abs(r) > 1.0 ? (d + a) / (r + 1.0 / r) : (d + a) * r / (1.0 + r * r);
    case ProfileKind::Gaussian: return r;
  }
  return 0.0;
}

double Profile::second(double r) const {
  switch (kind) {
    case ProfileKind::SubExp: return a * std::exp((a - 2.0) * log_bracket(r)) * (1.0 + (a - 2.0) * sq_ratio(r));
    case ProfileKind::Log: {
      const double b2 = std::exp(-2.0 * log_bracket(r));  // 1/(1+r^2)
      return (d + a) * b2 * (1.0 - 2.0 * sq_ratio(r));
    }
    case ProfileKind::Gaussian: return 1.0;
  }
  return 0.0;
}

double Profile::tangential(double r) const {
  switch (kind) {
    case ProfileKind::SubExp: return a * std::exp((a - 2.0) * log_bracket(r));
    case ProfileKind::Log: return (d + a) * std::exp(-2.0 * log_bracket(r));
    case ProfileKind::Gaussian: return 1.0;
  }
  return 0.0;
}

std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::SubExp: return "subexp";
    case ProfileKind::Log: return "log";
    case ProfileKind::Gaussian: return "gaussian";
  }
  return "?";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::MuckenhouptNumeric: return "muckenhoupt-numeric";
    case Provenance::UserSupplied: return "user-supplied";
    case Provenance::DiscreteSpectral: return "discrete-spectral";
    case Provenance::Unavailable: return "unavailable";
  }
  return "?";
}

std::string to_string(VelocityInequality v) {
  switch (v) {
    case VelocityInequality::Poincare: return "poincare";
    case VelocityInequality::Weighted: return "weighted";
    case VelocityInequality::WeakPI: return "weak-pi";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Measure

Measure Measure::lebesgue(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  Measure m;
  m.d_ = d;
  m.lebesgue_ = true;
  m.radius_ = 1.0;
  return m;
}

Measure::Measure(int d, RealFn log_density, const QuadratureCfg& cfg)
    : d_(d), lebesgue_(false), log_density_(std::move(log_density)) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  cfg.validate();
  log_mass_ = 0.0;
  radius_ = 1.0;
  const QuadResult z = integrate([](double) { return 1.0; }, *this, cfg, 1.0);
  if (!(z.value > 0.0) || !std::isfinite(z.value)) throw std::runtime_error("measure has no finite positive mass");
  log_mass_ = std::log(z.value);

  const double target = std::log(cfg.tail_mass);
  double hi = 1.0;
  while (log_tail_mass(*this, hi, cfg) >= target) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("tail mass target unreachable");
  }
  double lo = 0.5 * hi;
  if (log_tail_mass(*this, lo, cfg) < target) lo = 0.0;
  for (int it = 0; it < 60 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_tail_mass(*this, mid, cfg) < target) hi = mid;
    else lo = mid;
  }
  radius_ = hi;
}

double Measure::log_density(double r) const { return lebesgue_ ? 0.0 : log_density_(r) - log_mass_; }

double Measure::density(double r) const { return std::exp(log_density(r)); }

QuadResult integrate(const RealFn& f, const Measure& m, const QuadratureCfg& cfg) {
  return integrate(f, m, cfg, m.radius());
}

QuadResult integrate(const RealFn& f, const Measure& m, const QuadratureCfg& cfg, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("truncation radius must be positive");
  const int d = m.dim();
  std::vector<double> half{0.0};
  for (double b = 0.125; b < radius; b *= 2.0) half.push_back(b);
  half.push_back(radius);

  if (d == 1) {
    auto g = [&](double x) {
      const double w = m.density(x);
      return w == 0.0 ? 0.0 : f(x) * w;
    };
    std::vector<double> br;
    for (auto it = half.rbegin(); it != half.rend(); ++it) br.push_back(-*it);
    br.insert(br.end(), half.begin() + 1, half.end());
    const QuadResult bulk = adaptive_gk(g, br, cfg);
    const QuadResult right = integrate_upper_tail(g, radius, cfg);
    const QuadResult left = integrate_upper_tail([&](double x) { return g(-x); }, radius, cfg);
    return {bulk.value + right.value + left.value, bulk.error + right.error + left.error};
  }
  const double area = sphere_area(d);
  auto g = [&](double r) {
    const double w = m.density(r);
    return w == 0.0 ? 0.0 : f(r) * w * std::pow(r, d - 1);
  };
  const QuadResult bulk = adaptive_gk(g, half, cfg);
  const QuadResult tail = integrate_upper_tail(g, radius, cfg);
  return {area * (bulk.value + tail.value), area * (bulk.error + tail.error)};
}

double log_tail_mass(const Measure& m, double r, const QuadratureCfg& cfg) {
  if (m.is_lebesgue()) throw std::invalid_argument("tail mass of Lebesgue measure is infinite");
  if (!(r > 0.0)) return 0.0;
  const int d = m.dim();
  const double g0 = m.raw_log_density(r);
  // x = r + y / kappa puts the decay of e^{g(x) - g(r)} on an O(1) scale in y.
  const double h = 1e-4 * r;
  const double slope = (m.raw_log_density(r + h) - m.raw_log_density(r - h)) / (2.0 * h);
  const double kappa = std::max(std::abs(slope), 1.0 / std::max(r, 1.0));
  auto scaled = [&](double y) {
    const double x = r + y / kappa;
    const double e = m.raw_log_density(x) - g0 + (d - 1) * std::log1p(y / (kappa * r));
    return std::exp(e);
  };
  QuadratureCfg local = cfg;
  local.abs_tol = 0.0;
  const QuadResult head = adaptive_gk(scaled, {0.0, 0.25, 0.5, 1.0}, local);
  const QuadResult tail = integrate_upper_tail(scaled, 1.0, local);
  const double log_area = d == 1 ? std::log(2.0) : std::log(sphere_area(d));
  const double v = log_area + g0 + (d - 1) * std::log(r) + std::log(head.value + tail.value) - std::log(kappa) -
                   m.log_mass();
  return std::min(v, 0.0);
}

// ---------------------------------------------------------------------------
// Weights

double Weight::value(double x) const { return std::exp(k * log_bracket(x)); }
double Weight::log_value(double x) const { return k * log_bracket(x); }
double Weight::grad_ratio(double x) const {
  const double ax = std::abs(x);
  return ax > 1.0 ? k / (ax + 1.0 / ax) : k * ax / (1.0 + ax * ax);
}

double muckenhoupt_constant(const Profile& base, double k, const QuadratureCfg& cfg) {
  QuadratureCfg local = cfg;
  local.abs_tol = 0.0;
  // log of lambda([r, inf)) * int_0^r e^F, both scaled by e^{-+F(r)}.
  auto log_product = [&](double r) {
    const double fr = base.value(r);
    const double lr = log_bracket(r);
    auto upper = [&](double x) { return std::exp(-(base.value(x) - fr) - 2.0 * k * (log_bracket(x) - lr)); };
    const QuadResult a = integrate_upper_tail(upper, r, local);
    std::vector<double> br{0.0};
    for (int j = 1; j <= 40; ++j) br.push_back(r - std::ldexp(r, -j));
    br.push_back(r);
    const QuadResult b = adaptive_gk([&](double x) { return std::exp(base.value(x) - fr); }, br, local);
    return -2.0 * k * lr + std::log(a.value) + std::log(b.value);
  };

  double best = -std::numeric_limits<double>::infinity();
  double best_lr = 0.0;
  const int n = 240;
  // Past F(r) - F(0) ~ 2000 the product has reached its asymptotic regime.
  double rmax = 1.0;
  while (rmax < 1e8 && base.value(rmax) - base.value(0.0) < 2000.0) rmax *= 1.5;
  const double lo = std::log(1e-4), hi = std::log(rmax);
  for (int i = 0; i <= n; ++i) {
    const double lr = lo + (hi - lo) * i / n;
    const double v = log_product(std::exp(lr));
    if (v > best) {
      best = v;
      best_lr = lr;
    }
  }
  const double step = (hi - lo) / n;
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double lr) { return -log_product(std::exp(lr)); }, best_lr - step, best_lr + step, 40);
  best = std::max(best, -refined.second);
  double value = std::exp(best);
  // Asymptotic value of the product for the matched exponent k = 1 - a.
  if (base.kind == ProfileKind::SubExp && std::abs(k - (1.0 - base.a)) < 1e-12) value = std::max(value, 1.0 / (base.a * base.a));
  return value;
}

double discrete_spectral_gap(const Profile& base, int n, const QuadratureCfg& cfg) {
  if (n < 8) throw std::invalid_argument("spectral gap grid too small");
  const Measure nu(1, [&](double v) { return -base.value(v); }, cfg);
  double vmax = 1.0;
  while (log_tail_mass(nu, vmax, cfg) > std::log(1e-12)) vmax *= 1.25;
  const double dv = 2.0 * vmax / n;
  std::vector<double> psi(n), mass(n);
  for (int j = 0; j < n; ++j) {
    const double v = -vmax + (j + 0.5) * dv;
    psi[j] = base.value(v);
    mass[j] = std::exp(-psi[j]) * dv;
  }
  std::vector<double> cond(n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    const double dpsi = psi[j + 1] - psi[j];
    const double w = std::abs(dpsi) < 1e-12 ? std::exp(-psi[j + 1]) * (1.0 + 0.5 * dpsi)
                                            : std::exp(-psi[j + 1]) * dpsi / (-std::expm1(-dpsi));
    cond[j] = w / dv;
  }
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    diag[j] += cond[j] / mass[j];
    diag[j + 1] += cond[j] / mass[j + 1];
    off[j] = -cond[j] / std::sqrt(mass[j] * mass[j + 1]);
  }
  return tridiagonal_eigenvalue(diag, off, 1);
}

// ---------------------------------------------------------------------------
// Benchmarks

bool Model::strongly_confined() const {
  return potential.profile.kind == ProfileKind::SubExp && potential.profile.a >= 1.0;
}

namespace {

double subexp_lipschitz(double a) {
  if (a > 1.0) return std::numeric_limits<double>::infinity();
  if (a == 1.0) return 1.0;
  const double r = std::sqrt(1.0 / (1.0 - a));
  return a * r * std::exp((a - 2.0) * log_bracket(r));
}

double moment(const Measure& m, const QuadratureCfg& cfg, const RealFn& f) { return integrate(f, m, cfg).value; }

}  // namespace

Model make_benchmark(const ModelSpec& spec, const QuadratureCfg& cfg) {
  cfg.validate();
  if (spec.d < 1) throw std::invalid_argument("dimension must be positive");
  Model m;
  m.spec = spec;
  m.cfg = cfg;
  m.d = spec.d;
  const int d = spec.d;

  // Potential.
  Profile phi{spec.potential, spec.potential_param, d};
  switch (spec.potential) {
    case ProfileKind::SubExp:
      if (!(phi.a > 0.0)) throw std::invalid_argument("alpha must be positive");
      m.potential.L = subexp_lipschitz(phi.a);
      m.potential.M = phi.a <= 2.0 ? phi.a : std::numeric_limits<double>::infinity();
      break;
    case ProfileKind::Log:
      if (!(phi.a > 0.0)) throw std::invalid_argument("p must be positive");
      m.potential.L = 0.5 * (d + phi.a);
      m.potential.M = d + phi.a;
      break;
    case ProfileKind::Gaussian: throw std::invalid_argument("potential must be subexp or log");
  }
  m.potential.profile = phi;
  m.mu = Measure(d, [phi](double r) { return -phi.value(r); }, cfg);
  m.potential.log_Z = m.mu.log_mass();

  // Weight.
  Weight& w = m.weight;
  if (spec.potential == ProfileKind::Log) {
    w.k = 1.0;
    w.sigma = spec.sigma.value_or(0.5 * phi.a);
    if (!(w.sigma > 0.0) || w.sigma >= phi.a) throw std::invalid_argument("sigma must lie in (0, p) for a log potential");
  } else {
    w.k = phi.a < 1.0 ? 1.0 - phi.a : 0.0;
    w.sigma = spec.sigma.value_or(4.0);
    if (!(w.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  }
  w.theta = spec.theta_W.value_or(1.0);
  if (!(w.theta > 0.0)) throw std::invalid_argument("theta_W must be positive");
  const double k = w.k;
  m.mu_w = k == 0.0 ? m.mu
                    : Measure(d, [phi, k](double r) { return -phi.value(r) - 2.0 * k * log_bracket(r); }, cfg);
  w.Z_W = std::exp(m.mu_w.log_mass() - m.mu.log_mass());
  const double sigma = w.sigma;
  w.W_sigma_norm = std::pow(moment(m.mu, cfg, [k, sigma](double x) { return std::exp(sigma * k * log_bracket(x)); }),
                            1.0 / sigma);
  if (spec.P_W) {
    if (!(*spec.P_W > 0.0)) throw std::invalid_argument("P_W must be positive");
    w.P_W = *spec.P_W;
    w.P_W_provenance = Provenance::UserSupplied;
  } else if (spec.potential == ProfileKind::Log) {
    w.P_W = 2.0 / (phi.a * w.Z_W);
    w.P_W_provenance = Provenance::ClosedForm;
  } else if (phi.a < 1.0) {
    if (d != 1) throw std::invalid_argument("P_W for a subexp potential in d > 1 must be supplied");
    w.P_W = 4.0 * muckenhoupt_constant(phi, k, cfg) / w.Z_W;
    w.P_W_provenance = Provenance::MuckenhouptNumeric;
  }

  // Kinetic energy.
  Profile psi{spec.kinetic, spec.kinetic_param, d};
  if (spec.kinetic != ProfileKind::Gaussian && !(psi.a > 0.0))
    throw std::invalid_argument("kinetic parameter must be positive");
  m.kinetic.profile = psi;
  m.nu = Measure(d, [psi](double r) { return -psi.value(r); }, cfg);
  m.kinetic.log_Z = m.nu.log_mass();
  Kinetic& kin = m.kinetic;
  const bool poincare_family =
      spec.kinetic == ProfileKind::Gaussian || (spec.kinetic == ProfileKind::SubExp && psi.a >= 1.0);
  if (spec.C_P) {
    if (!(*spec.C_P > 0.0)) throw std::invalid_argument("C_P must be positive");
    kin.C_P = *spec.C_P;
    kin.C_P_provenance = Provenance::UserSupplied;
  } else if (spec.kinetic == ProfileKind::Gaussian) {
    kin.C_P = 1.0;
    kin.C_P_provenance = Provenance::ClosedForm;
  } else if (poincare_family) {
    if (d != 1) throw std::invalid_argument("C_P for a subexp kinetic energy in d > 1 must be supplied");
    kin.C_P = discrete_spectral_gap(psi, 4000, cfg);
    kin.C_P_provenance = Provenance::DiscreteSpectral;
  }

  if (!poincare_family) {
    VelocityWeight g;
    g.k = spec.kinetic == ProfileKind::Log ? 1.0 : 1.0 - psi.a;
    g.delta_w = spec.delta_w.value_or(spec.kinetic == ProfileKind::Log ? 0.5 * psi.a : 4.0);
    if (!(g.delta_w > 0.0)) throw std::invalid_argument("delta_w must be positive");
    if (spec.kinetic == ProfileKind::Log && g.delta_w >= psi.a)
      throw std::invalid_argument("delta_w must lie in (0, q) for a log kinetic energy");
    const double gk = g.k;
    const Measure nu_g(d, [psi, gk](double r) { return -psi.value(r) - 2.0 * gk * log_bracket(r); }, cfg);
    g.Z_G = std::exp(nu_g.log_mass() - m.nu.log_mass());
    const double dw = g.delta_w;
    g.G_delta_norm = std::pow(moment(m.nu, cfg, [gk, dw](double v) { return std::exp(dw * gk * log_bracket(v)); }), 1.0 / dw);
    if (spec.P_G) {
      if (!(*spec.P_G > 0.0)) throw std::invalid_argument("P_G must be positive");
      g.P_G = *spec.P_G;
      g.P_G_provenance = Provenance::UserSupplied;
    } else if (spec.kinetic == ProfileKind::Log) {
      g.P_G = 2.0 / (psi.a * g.Z_G);
      g.P_G_provenance = Provenance::ClosedForm;
    } else {
      if (d != 1) throw std::invalid_argument("P_G for a subexp kinetic energy in d > 1 must be supplied");
      g.P_G = 4.0 * muckenhoupt_constant(psi, gk, cfg) / g.Z_G;
      g.P_G_provenance = Provenance::MuckenhouptNumeric;
    }
    // int G^2 dnu is finite iff 2k < q for the log family.
    const bool g2_finite = spec.kinetic != ProfileKind::Log || psi.a > 2.0;
    if (g2_finite) {
      const double g2 = moment(m.nu, cfg, [gk](double v) { return std::exp(2.0 * gk * log_bracket(v)); });
      g.P_v = g.Z_G * g.P_G * (1.0 + g.Z_G * g2);
    }
    kin.weight = g;
    kin.active = kin.C_P ? VelocityInequality::Poincare : VelocityInequality::Weighted;
  } else {
    kin.active = VelocityInequality::Poincare;
  }
  if (spec.beta_v) {
    if (!(spec.beta_v->eta0 > 0.0) || !(spec.beta_v->eta1 > 0.0) ||
        (spec.beta_v->kind == BetaSpec::Kind::StretchedExp && !(spec.beta_v->eta2 > 0.0)))
      throw std::invalid_argument("beta_v parameters must be positive");
    kin.beta_v = spec.beta_v;
    kin.active = VelocityInequality::WeakPI;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Validation

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

namespace {

std::vector<double> validation_grid(double radius) {
  std::vector<double> g{0.0};
  const int n = 800;
  const double lo = std::log(1e-4), hi = std::log(std::max(radius, 2.0));
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / n);
    g.push_back(r);
    g.push_back(-r);
  }
  return g;
}

template <class F>
AssumptionCheck sup_check(std::string name, const std::vector<double>& grid, double bound, F ratio) {
  AssumptionCheck c;
  c.name = std::move(name);
  c.bound = bound;
  c.worst = -std::numeric_limits<double>::infinity();
  for (double x : grid) {
    const double v = ratio(x);
    if (v > c.worst) {
      c.worst = v;
      c.witness = x;
    }
  }
  c.passed = c.worst <= bound * (1.0 + 1e-12);
  return c;
}

AssumptionCheck finite_check(std::string name, const std::function<double()>& eval) {
  AssumptionCheck c;
  c.name = std::move(name);
  c.bound = std::numeric_limits<double>::infinity();
  try {
    c.worst = eval();
    c.witness = c.worst;
    c.passed = std::isfinite(c.worst);
  } catch (const QuadratureFailure& e) {
    c.worst = std::numeric_limits<double>::infinity();
    c.witness = e.hi;
    c.passed = false;
  }
  return c;
}

}  // namespace

AssumptionReport validate_assumptions(const Model& model, const QuadratureCfg& cfg) {
  AssumptionReport rep;
  const auto xs = validation_grid(model.mu.radius());
  const auto vs = validation_grid(model.nu.radius());
  const Profile& phi = model.potential.profile;
  const Profile& psi = model.kinetic.profile;
  const Weight& w = model.weight;
  const int d = model.d;

  rep.checks.push_back(sup_check("W >= 1", xs, 0.0, [&](double x) { return -w.log_value(x); }));
  rep.checks.push_back(sup_check("|grad W|/W <= theta_W", xs, w.theta, [&](double x) { return w.grad_ratio(x); }));
  rep.checks.push_back(sup_check("|grad phi| <= L", xs, model.potential.L, [&](double x) { return std::abs(phi.deriv(x)); }));
  rep.checks.push_back(sup_check("|hess phi| <= M", xs, model.potential.M, [&](double x) {
    const double h = std::abs(phi.second(x));
    return d > 1 ? std::max(h, std::abs(phi.tangential(x))) : h;
  }));
  rep.checks.push_back(finite_check("int W^sigma dmu", [&] {
    return integrate([&](double x) { return std::exp(w.sigma * w.log_value(x)); }, model.mu, cfg).value;
  }));
  rep.checks.push_back(finite_check("int |grad psi|^4 dnu", [&] {
    return integrate([&](double v) { return std::pow(psi.deriv(v), 4); }, model.nu, cfg).value;
  }));
  rep.checks.push_back(finite_check("int |hess psi|^2 dnu", [&] {
    return integrate(
               [&](double v) {
                 const double t = d > 1 ? psi.tangential(v) : 0.0;
                 return psi.second(v) * psi.second(v) + (d - 1) * t * t;
               },
               model.nu, cfg)
        .value;
  }));
  {
    AssumptionCheck c;
    c.name = "Z_W in (0, 1]";
    c.worst = w.Z_W;
    c.bound = 1.0;
    c.witness = w.Z_W;
    c.passed = w.Z_W > 0.0 && w.Z_W <= 1.0 + 1e-12;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace hypo
