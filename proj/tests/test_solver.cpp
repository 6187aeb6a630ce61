#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypocert/sde.hpp"
#include "hypocert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace hypo;

namespace {

ModelSpec spec_of(ProfileKind pk, double pp, ProfileKind kk, double kp) {
  ModelSpec s;
  s.potential = pk;
  s.potential_param = pp;
  s.kinetic = kk;
  s.kinetic_param = kp;
  return s;
}

const Model& log_gauss() {
  static const Model m = make_benchmark(spec_of(ProfileKind::Log, 2.0, ProfileKind::Gaussian, 0.0), QuadratureCfg{});
  return m;
}

PhaseGrid small_grid(const Model& m, int n = 48) {
  GridSettings gs;
  gs.Nx = n;
  gs.Nv = n;
  return make_grid(m, gs);
}

}  // namespace

TEST_CASE("grid masses are a symmetric probability") {
  for (const auto& spec : {spec_of(ProfileKind::Log, 2.0, ProfileKind::Gaussian, 0.0),
                           spec_of(ProfileKind::SubExp, 0.5, ProfileKind::Log, 2.0)}) {
    const Model m = make_benchmark(spec, QuadratureCfg{});
    const PhaseGrid g = small_grid(m, 40);
    CHECK(g.total_weight() == doctest::Approx(1.0).epsilon(1e-6));
    for (const Axis* a : {&g.x, &g.v}) {
      const int n = a->size();
      CHECK(std::isinf(a->face.front()));
      CHECK(std::isinf(a->face.back()));
      for (int i = 0; i < n; ++i) {
        CHECK(a->node[i] == doctest::Approx(-a->node[n - 1 - i]).epsilon(1e-12));
        CHECK(a->mass[i] == doctest::Approx(a->mass[n - 1 - i]).epsilon(1e-9));
        CHECK(a->mass[i] > 0.0);
        if (i + 1 < n) CHECK(a->node[i] < a->node[i + 1]);
      }
    }
  }
  CHECK(tail_radius(log_gauss().nu, 1e-12, QuadratureCfg{}) == doctest::Approx(7.13).epsilon(0.01));
}

TEST_CASE("constants are stationary and the mean is conserved") {
  const PhaseGrid g = small_grid(log_gauss());
  const KfpSolver s(g, 1.0);
  const double dt = 1.8 * s.max_transport_dt();

  Field zero(g.cells(), 0.0);
  Field one(g.cells(), 1.0);
  for (int n = 0; n < 20; ++n) {
    s.step(zero, dt);
    s.step(one, dt);
  }
  CHECK(*std::max_element(zero.begin(), zero.end()) == 0.0);
  CHECK(*std::min_element(zero.begin(), zero.end()) == 0.0);
  for (double x : one) CHECK(x == doctest::Approx(1.0).epsilon(1e-13));

  Field h = initial_field(g, InitialKind::TanhXTanhV);
  for (std::size_t k = 0; k < h.size(); ++k) h[k] += 0.3 * std::sin(0.37 * static_cast<double>(k));
  const double m0 = s.mass(h);
  for (int n = 0; n < 1000; ++n) s.step(h, dt);
  CHECK(std::abs(s.mass(h) - m0) < 1e-12);
}

TEST_CASE("velocity diffusion leaves x-only fields alone and decays at the discrete gap") {
  const PhaseGrid g = small_grid(log_gauss(), 64);
  const double gamma = 1.5;
  const KfpSolver s(g, gamma);
  Field hx = initial_field(g, InitialKind::TanhX);
  const Field hx0 = hx;
  s.diffuse(hx, 0.3);
  for (std::size_t k = 0; k < hx.size(); ++k) CHECK(hx[k] == doctest::Approx(hx0[k]).epsilon(1e-13));

  // Gaussian velocity: the continuum gap is 1 and the discrete one is close to it.
  const double lambda = s.velocity_gap();
  CHECK(lambda == doctest::Approx(1.0).epsilon(0.05));
  const double dt = 0.05;
  const double factor = std::pow(1.0 + gamma * lambda * dt, -2.0);
  Field h = initial_field(g, InitialKind::TanhV);
  const double e0 = s.l2_sq(h);
  double e = e0, ratio = 0.0;
  for (int n = 1; n <= 400; ++n) {
    s.step(h, dt, false);
    const double en = s.l2_sq(h);
    ratio = en / e;
    e = en;
    CHECK(e <= std::pow(factor, n) * e0 * (1.0 + 1e-10));
  }
  CHECK(ratio == doctest::Approx(factor).epsilon(1e-6));
}

TEST_CASE("transport flux is divergence free") {
  // A constant field is preserved only if every cell's inflow equals its outflow.
  const PhaseGrid g = small_grid(log_gauss(), 33);
  const KfpSolver s(g, 0.0);
  Field one(g.cells(), 1.0);
  s.transport(one, s.max_transport_dt());
  for (double x : one) CHECK(x == doctest::Approx(1.0).epsilon(1e-13));
  // and transport alone never raises the L2 norm
  Field h = initial_field(g, InitialKind::TanhXTanhV);
  double e = s.l2_sq(h);
  for (int n = 0; n < 200; ++n) {
    s.transport(h, s.max_transport_dt());
    const double en = s.l2_sq(h);
    CHECK(en <= e * (1.0 + 1e-13));
    e = en;
  }
}

TEST_CASE("CFL violation throws without touching the field") {
  const PhaseGrid g = small_grid(log_gauss(), 32);
  const KfpSolver s(g, 1.0);
  Field h = initial_field(g, InitialKind::TanhX);
  const Field h0 = h;
  CHECK_THROWS_AS(s.step(h, 3.0 * s.max_transport_dt()), std::invalid_argument);
  CHECK(h == h0);
  CHECK_THROWS_AS(s.step(h, 0.0), std::invalid_argument);
  RunSettings rs;
  rs.dt = 10.0 * s.max_transport_dt();
  rs.stride = rs.dt;  // the stride alignment keeps dt
  rs.T = 10.0 * rs.dt;
  CHECK_THROWS(run_decay(s, h0, rs));
}

TEST_CASE("decay run invariants and first-order energy residual") {
  const PhaseGrid g = small_grid(log_gauss(), 48);
  const KfpSolver s(g, 1.0);
  const Field h0 = initial_field(g, InitialKind::TanhX);
  RunSettings rs;
  rs.T = 10.0;
  rs.stride = 0.5;
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    rs.dt = dt;
    const DecaySeries d = run_decay(s, h0, rs);
    CHECK(d.max_mass_drift <= 1e-12);
    CHECK(d.max_l2_increase <= 1e-12);
    CHECK(d.max_principle_slack <= 1e-12);
    CHECK(d.t.size() == 21);
    CHECK(d.incomplete_windows == 2);  // windows starting at 9.5 and 10
    CHECK(std::isnan(d.H_tau.back()));
    double res = 0.0;
    for (double r : d.energy_residual)
      if (std::isfinite(r)) res = std::max(res, r);
    if (prev > 0.0) {
      CHECK(prev / res >= 1.7);
      CHECK(prev / res <= 2.3);
    }
    prev = res;
    for (std::size_t k = 0; k + 1 < d.t.size(); ++k) CHECK(d.l2_sq[k + 1] <= d.l2_sq[k]);
  }
}

TEST_CASE("budget and fits") {
  const PhaseGrid g = small_grid(log_gauss(), 32);
  const KfpSolver s(g, 1.0);
  RunSettings rs;
  rs.T = 4.0;
  const DecaySeries d = run_decay(s, initial_field(g, InitialKind::TanhX), rs);
  const Budget b = richardson_budget(d, d);
  for (double x : b.l2_sq) CHECK(x == 0.0);
  const Budget z = zero_budget(d);
  CHECK(z.pairing.size() == d.t.size());

  DecaySeries syn;
  for (int k = 1; k <= 100; ++k) {
    const double t = k;
    syn.t.push_back(t);
    syn.l2_sq.push_back(std::pow(t, -1.5));
  }
  CHECK(fit_log_slope(syn, 10.0, 100.0) == doctest::Approx(-1.5).epsilon(1e-10));
  syn.l2_sq.clear();
  syn.t.insert(syn.t.begin(), 0.0);
  for (double t : syn.t) syn.l2_sq.push_back(std::exp(-2.0 * std::pow(t, 0.4)));
  CHECK(fit_stretched(syn, 5.0, 50.0) == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("random streams are reproducible") {
  SplitMix64 a = SplitMix64::stream(7, 3), b = SplitMix64::stream(7, 3), c = SplitMix64::stream(7, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  SplitMix64 r(1);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n / 2; ++i) {
    double u, v;
    r.normal_pair(u, v);
    s += u + v;
    s2 += u * u + v * v;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("ensemble stays stationary under the splitting") {
  const Model& m = log_gauss();
  const QuadratureCfg cfg;
  // Theta-expectation of tanh(x)^2 by quadrature
  const double ref = integrate([](double x) { return std::tanh(x) * std::tanh(x); }, m.mu, cfg).value;
  const std::size_t n = 40000;
  SdeEnsemble e = sample_ensemble(m, n, 1.0, 0.01, 11);
  auto check_moments = [&] {
    double v2 = 0.0, t2 = 0.0, t4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v2 += e.v[i] * e.v[i];
      const double t = std::tanh(e.x[i]) * std::tanh(e.x[i]);
      t2 += t;
      t4 += t * t;
    }
    v2 /= n;
    t2 /= n;
    t4 /= n;
    CHECK(std::abs(v2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(t2 - ref) < 4.0 * std::sqrt((t4 - t2 * t2) / n) + 1e-3);
  };
  check_moments();
  for (int k = 0; k < 300; ++k) step_sde(e, m);
  check_moments();
}

TEST_CASE("autocovariance estimator") {
  const Model& m = log_gauss();
  McSettings ms;
  ms.particles = 20000;
  ms.T = 1.0;
  ms.stride = 0.1;
  ms.burn_in = 0.2;
  ms.blocks = 20;
  ms.min_ess = 100.0;
  const McSeries zero = estimate_observable_decay(m, 1.0, InitialKind::Constant, 1.0, ms);
  for (double c : zero.c) CHECK(c == 0.0);

  const McSeries a = estimate_observable_decay(m, 1.0, InitialKind::TanhX, 0.0, ms);
  const McSeries b = estimate_observable_decay(m, 1.0, InitialKind::TanhX, 0.0, ms);
  CHECK(a.c == b.c);
  CHECK(a.se == b.se);
  CHECK(a.t.size() == 11);
  const double var = integrate([](double x) { return std::tanh(x) * std::tanh(x); }, m.mu, QuadratureCfg{}).value;
  CHECK(std::abs(a.c.front() - var) < 4.0 * a.se.front());
  for (std::size_t k = 0; k + 1 < a.c.size(); ++k) CHECK(a.c[k + 1] < a.c[k] + 3.0 * a.se[k]);
}
