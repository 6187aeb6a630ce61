#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypocert/legendre.hpp"
#include "hypocert/weakpi.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace hypo;
using oracle::brute_conjugate;
using oracle::slope;

namespace {

ModelSpec spec_of(ProfileKind pot, double a, ProfileKind kin, double b) {
  ModelSpec s;
  s.potential = pot;
  s.potential_param = a;
  s.kinetic = kin;
  s.kinetic_param = b;
  return s;
}

}  // namespace

TEST_CASE("closed-form betas are monotone and vanish") {
  QuadratureCfg cfg;
  const Model m = make_benchmark(spec_of(ProfileKind::Log, 2.0, ProfileKind::Gaussian, 0.0), cfg);
  std::vector<Beta> all{poly_beta(1.0, 1.0),
                        poly_beta(2.0, 3.0),
                        stretched_exp_beta(1.0, 1.0, 0.5),
                        tail_beta(m.mu, 1.0, 3.0, 1.0, cfg),
                        shifted_beta(poly_beta(1.0, 1.0), 2.0),
                        scaled_beta(poly_beta(1.0, 0.5), 2.0, 3.0),
                        chained_beta(poly_beta(1.0, 1.0), poly_beta(1.0, 1.0), 0.5)};
  for (const auto& b : all) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 60; ++i) {
      const double s = std::pow(10.0, -3.0 + 12.0 * i / 59.0);
      const double v = (*b)(s);
      INFO(b->describe() << " s=" << s);
      CHECK(v <= prev * (1.0 + 1e-12));
      CHECK(v >= 0.0);
      prev = v;
    }
    CHECK(b->log_eval(std::log(1e9)) < std::log(1e-2));
  }
}

TEST_CASE("spatial tail beta") {
  QuadratureCfg cfg;
  const Model m = make_benchmark(spec_of(ProfileKind::Log, 2.0, ProfileKind::Gaussian, 0.0), cfg);
  const double zw = m.weight.Z_W, c0 = 3.0;
  const Beta bx = beta_tail_x(m, zw, c0, cfg);
  CHECK((*bx)(1.0 + 2.0 * zw * c0 * c0) == 1.0);
  CHECK((*bx)(0.5) == 1.0);
  // W = <x>: beta = mu(|x| >= r) = 1 - r / <r> with a <r>^2 + 1 = s
  const double a = 2.0 * zw * c0 * c0;
  for (double s : {20.0, 1e3, 1e6, 1e12, 1e40}) {
    const double r = std::sqrt((s - 1.0) / a - 1.0);
    const double exact = 1.0 / (std::sqrt(1.0 + r * r) * (std::sqrt(1.0 + r * r) + r));
    CHECK((*bx)(s) == doctest::Approx(exact).epsilon(1e-6));
  }
  std::vector<double> x, y;
  for (double ls = 20.0; ls <= 40.0; ls += 1.0) {
    x.push_back(ls);
    y.push_back(bx->log_eval(ls));
  }
  CHECK(slope(x, y) == doctest::Approx(-1.0).epsilon(0.05));

  // SubExp(alpha): log beta ~ -c s^{alpha / (2 (1 - alpha))}
  for (double alpha : {0.3, 0.5, 0.7}) {
    const Model ms = make_benchmark(spec_of(ProfileKind::SubExp, alpha, ProfileKind::Gaussian, 0.0), cfg);
    const Beta b = beta_tail_x(ms, ms.weight.Z_W, 1.0, cfg);
    std::vector<double> lx, ly;
    // inside the tabulated range, where -log beta runs from 1e3 to 1e5
    const double eta = alpha / (2.0 * (1.0 - alpha));
    for (double ls = std::log(1e3) / eta; ls <= std::log(1e5) / eta; ls += 0.1) {
      lx.push_back(ls);
      ly.push_back(std::log(-b->log_eval(ls)));
    }
    CHECK(slope(lx, ly) == doctest::Approx(alpha / (2.0 * (1.0 - alpha))).epsilon(0.1));
  }
}

TEST_CASE("tail mass far beyond the double range of the density") {
  QuadratureCfg cfg;
  const Model m = make_benchmark(spec_of(ProfileKind::SubExp, 0.5, ProfileKind::Gaussian, 0.0), cfg);
  // int_r^inf e^{-<x>^a} dx = e^{-<r>^a} <r>^{1-a} / a (1 + O(r^-a)), doubled for both sides
  for (double r : {1e4, 1e8, 1e12}) {
    const double br = bracket(r);
    const double approx = std::log(2.0) - std::pow(br, 0.5) + 0.5 * std::log(br) - std::log(0.5) - m.mu.log_mass();
    const double got = log_tail_mass(m.mu, r, cfg);
    CHECK(got == doctest::Approx(approx).epsilon(2.0 / std::pow(r, 0.5)));
  }
}

TEST_CASE("chaining") {
  const auto p11 = poly_beta(1.0, 1.0);
  const auto ch = chained_beta(p11, p11, 0.0);
  // oracle: 10^6-point grid in s1 for s = 4, objective s1^2/4 + 1/s1
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000000; ++i) {
    const double s1 = 1e-3 * std::pow(1e6, i / 999999.0);
    best = std::min(best, s1 / (4.0 / s1) + 1.0 / s1);
  }
  CHECK((*ch)(4.0) == doctest::Approx(best).epsilon(1e-9));
  CHECK(std::exp(ch->minimize(std::log(4.0)).log_value) == doctest::Approx(best).epsilon(1e-9));
  // exact: s1 = (s/2)^{1/3}, value 3 (s/2)^{-1/3} / 2... checked against calculus
  CHECK(best == doctest::Approx(1.5 * std::cbrt(2.0) / std::cbrt(4.0)).epsilon(1e-9));

  // upper bound property at arbitrary feasible pairs
  for (double s : {0.3, 4.0, 50.0}) {
    for (double s1 : {0.1, 1.0, 7.0}) {
      const double s2 = s / s1;
      CHECK((*ch)(s) <= s1 * (*p11)(s2) + (*p11)(s1) + 1e-12);
    }
  }
  const auto chc = chained_beta(p11, poly_beta(1.0, 2.0), 1.5);
  for (double s : {1.0, 10.0, 300.0}) {
    for (double s1 : {0.2, 2.0, 9.0}) {
      const double s2 = s / s1;
      const double bv = s2 > 1.5 ? std::pow(s2 - 1.5, -2.0) : std::numeric_limits<double>::infinity();
      CHECK((*chc)(s) <= s1 * bv + 1.0 / s1 + 1e-12);
    }
  }

  // beta_v = 0 leaves beta_x at the largest scanned s1
  const auto zero = chained_beta(p11, poly_beta(0.0, 1.0), 0.0);
  CHECK((*zero)(10.0) <= (*p11)(10.0 * 1e6));

  // slope -1/3 for the (2, 2) pair
  std::vector<double> x, y;
  for (double ls = 20.0; ls <= 60.0; ls += 2.0) {
    x.push_back(ls);
    y.push_back(ch->log_eval(ls));
  }
  CHECK(slope(x, y) == doctest::Approx(-1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("Legendre transform against closed forms") {
  const auto k11 = legendre_kstar(poly_beta(1.0, 1.0), 0.25, 1e-10);
  for (std::size_t j = 0; j < k11.log_w.size(); ++j) {
    const double w = std::exp(k11.log_w[j]);
    CHECK(std::exp(k11.log_k[j]) == doctest::Approx(w * w / 4.0).epsilon(1e-4));
  }
  for (auto [e0, e1] : {std::pair{2.0, 3.0}, std::pair{0.5, 0.7}, std::pair{1.0, 1.0}}) {
    const auto k = legendre_kstar(poly_beta(e0, e1), 0.25, 1e-8);
    for (std::size_t j = 0; j < k.log_w.size(); j += 7) {
      const double w = std::exp(k.log_w[j]);
      CHECK(std::exp(k.log_k[j]) == doctest::Approx(poly_kstar(e0, e1, w)).epsilon(0.01));
    }
  }
  // stretched: K*(w) >= c w log(1/w)^{-1/eta2} with c bounded below
  const auto ks = legendre_kstar(stretched_exp_beta(1.0, 1.0, 0.5), 0.25, 1e-30);
  double cmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ks.log_w.size(); ++j) {
    const double lw = ks.log_w[j];
    if (lw > std::log(1e-3)) continue;
    cmin = std::min(cmin, std::exp(ks.log_k[j] - lw) * std::pow(-lw, 2.0));
  }
  CHECK(cmin > 0.1);
}

TEST_CASE("Legendre transform against a dense brute-force conjugate") {
  struct Case {
    Beta b;
    double u_lo, u_hi;
  };
  std::vector<Case> cases{{poly_beta(1.0, 1.0), 1e-12, 1.0},
                          {poly_beta(2.0, 3.0), 1e-6, 1.0},
                          {stretched_exp_beta(1.0, 1.0, 0.5), 1e-5, 10.0}};
  for (const auto& c : cases) {
    const KStar k = legendre_kstar(c.b, 0.25, 1e-8);
    std::vector<double> ws;
    for (double lw : k.log_w) ws.push_back(std::exp(lw));
    const auto oracle = brute_conjugate(*c.b, ws, c.u_lo, c.u_hi, 1000000);
    for (std::size_t j = 0; j < ws.size(); ++j) {
      INFO(c.b->describe() << " w=" << ws[j]);
      CHECK(std::exp(k.log_k[j]) == doctest::Approx(oracle[j]).epsilon(1e-3));
    }
  }
}

TEST_CASE("K* structural properties") {
  QuadratureCfg cfg;
  const Model m = make_benchmark(spec_of(ProfileKind::Log, 2.0, ProfileKind::Gaussian, 0.0), cfg);
  for (const Beta& b : {poly_beta(1.0, 1.0), stretched_exp_beta(1.0, 2.0, 0.3), tail_beta(m.mu, 1.0, 5.0, 1.0, cfg)}) {
    const KStar k = legendre_kstar(b, 0.25, 1e-12);
    for (std::size_t j = 0; j < k.log_w.size(); ++j) {
      CHECK(k.log_k[j] <= k.log_w[j] + 1e-12);
      if (j + 1 < k.log_w.size()) {
        CHECK(k.log_k[j + 1] < k.log_k[j]);
        // K*(w) / w nondecreasing in w
        CHECK(k.log_k[j + 1] - k.log_w[j + 1] <= k.log_k[j] - k.log_w[j] + 1e-9);
      }
    }
    // midpoint convexity
    for (double w = 1e-10; w < 0.2; w *= 3.0) {
      const double w2 = 1.5 * w;
      const double mid = log_kstar(*b, std::log(0.5 * (w + w2)));
      CHECK(std::exp(mid) <= 0.5 * (std::exp(log_kstar(*b, std::log(w))) + std::exp(log_kstar(*b, std::log(w2)))) *
                                 (1.0 + 1e-9));
    }
  }
}

TEST_CASE("rate function exact case") {
  const RateFunction rf(poly_beta(1.0, 1.0), 0.25);
  for (double z : {0.2, 0.1, 1e-3, 1e-7}) CHECK(rf.F(z) == doctest::Approx(4.0 * (1.0 / z - 4.0)).epsilon(1e-6));
  for (double t = 0.0; t <= 1e4; t = t < 1.0 ? t + 0.25 : t * 1.7) {
    CHECK(rf.inverse(t) == doctest::Approx(4.0 / (t + 16.0)).epsilon(1e-4));
  }
  double prev = 1.0;
  for (double t = 1e-3; t < 1e29; t *= 3.0) {
    const double w = rf.inverse(t);
    CHECK(w <= prev);
    CHECK(rf.F(w) == doctest::Approx(t).epsilon(1e-6));
    prev = w;
  }
}

TEST_CASE("rate function closed-form bounds and asymptotics") {
  for (auto [e0, e1] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.3, 2.0}}) {
    const RateFunction rf(poly_beta(e0, e1), 0.25);
    for (double t = 1.0; t <= 1e4; t *= 1.5) {
      CHECK(rf.inverse(t) <= e0 * std::pow(1.0 + e1, 1.0 + e1) * std::pow(t, -e1));
    }
  }
  for (double eta2 : {0.5, 1.0}) {
    const RateFunction rf(stretched_exp_beta(1.0, 1.0, eta2), 0.25);
    std::vector<double> x, y;
    const double top = std::log(rf.t_last());
    for (double lt = top - std::log(100.0); lt <= top; lt += 0.1) {
      x.push_back(lt);
      y.push_back(std::log(-rf.log_inverse(std::exp(lt))));
    }
    CHECK(slope(x, y) == doctest::Approx(eta2 / (1.0 + eta2)).epsilon(0.1));
  }
}

TEST_CASE("shift lemma") {
  const auto p11 = poly_beta(1.0, 1.0);
  CHECK(kstar_shift_bound(*p11, 0.0) == 1.0);
  const auto same = shifted_beta(p11, 0.0);
  for (double w : {1e-3, 0.1}) CHECK(log_kstar(*same, std::log(w)) == log_kstar(*p11, std::log(w)));

  // beta(1/u) <= 1/8 iff u <= 1/8, so w_bar = 1/8 and c~ = 8/9 for c = 1.
  const double ct = kstar_shift_bound(*p11, 1.0);
  CHECK(ct == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  const auto sh = shifted_beta(p11, 1.0);
  for (double w = 1e-6; w < 0.125; w *= 1.5) {
    const double ks = std::exp(log_kstar(*sh, std::log(w)));
    const double k = std::exp(log_kstar(*p11, std::log(w)));
    CHECK(ks >= ct * k * (1.0 - 1e-9));
    CHECK(ks >= k / 9.0);
  }
  const auto p12 = poly_beta(1.0, 2.0);
  const double ct2 = kstar_shift_bound(*p12, 2.0);
  const auto sh2 = shifted_beta(p12, 2.0);
  for (double w = 1e-6; w < 0.125; w *= 1.5) {
    CHECK(std::exp(log_kstar(*sh2, std::log(w))) >= ct2 * std::exp(log_kstar(*p12, std::log(w))) * (1.0 - 1e-9));
  }
  CHECK_THROWS(kstar_shift_bound(*stretched_exp_beta(1.0, 1e-30, 1e-9), 1.0));
}

TEST_CASE("kinetic beta routes") {
  QuadratureCfg cfg;
  const double gamma = 1.0;
  auto pipeline = [&](const Model& m) {
    const auto sp = compute_spatial_constants(m, 1.0);
    const auto mom = compute_velocity_moments(m, cfg);
    const auto avg = compute_averaging_constants(sp, mom, m.potential.L, m.weight.theta);
    return beta_kin(m, sp, avg, gamma, cfg);
  };
  {
    const Model m = make_benchmark(spec_of(ProfileKind::Log, 2.0, ProfileKind::Gaussian, 0.0), cfg);
    const auto kb = pipeline(m);
    CHECK(kb.route == KineticRoute::Poincare);
    std::vector<double> x, y;
    for (double ls = 30.0; ls <= 50.0; ls += 1.0) {
      x.push_back(ls);
      y.push_back(kb.beta->log_eval(ls));
    }
    CHECK(slope(x, y) == doctest::Approx(-1.0).epsilon(0.05));
  }
  {
    const Model m = make_benchmark(spec_of(ProfileKind::Log, 2.0, ProfileKind::Log, 2.0), cfg);
    const auto kb = pipeline(m);
    CHECK(kb.route == KineticRoute::Chained);
    CHECK(kb.C_bar >= 1.0);
    CHECK(kb.M_resolved);
    std::vector<double> x, y;
    for (double ls = 60.0; ls <= 100.0; ls += 2.0) {
      x.push_back(ls);
      y.push_back(kb.beta->log_eval(ls));
    }
    CHECK(slope(x, y) == doctest::Approx(-1.0 / 3.0).epsilon(0.05));
  }
  {
    ModelSpec s = spec_of(ProfileKind::SubExp, 1.5, ProfileKind::Log, 2.0);
    const Model m = make_benchmark(s, cfg);
    const auto kb = beta_kin_appendix_a(m, 1.0, gamma, cfg);
    CHECK(kb.route == KineticRoute::AppendixA);
    // poly(1,1) with gamma = 0 and C_PL = 1 is the plain beta
    s.beta_v = BetaSpec{BetaSpec::Kind::Poly, 1.0, 1.0, 1.0};
    const auto kp = beta_kin_appendix_a(make_benchmark(s, cfg), 1.0, 0.0, cfg);
    for (double v : {0.5, 3.0, 100.0}) CHECK((*kp.beta)(v) == doctest::Approx(1.0 / v).epsilon(1e-14));
  }
}
