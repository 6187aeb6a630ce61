#include "hypocert/sde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace hypo {

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 s(seed ^ 0xD1B54A32D192ED03ULL);
  s.state_ += (index + 1) * 0x9E3779B97F4A7C15ULL;
  s.state_ = s.next();
  return s;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

void SplitMix64::normal_pair(double& a, double& b) {
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double th = 2.0 * std::numbers::pi * uniform();
  a = r * std::cos(th);
  b = r * std::sin(th);
}

SymmetricSampler::SymmetricSampler(const Measure& m, const QuadratureCfg& cfg, int n) {
  const double R = tail_radius(m, 1e-12, cfg);
  const double c = std::asinh(R);
  r_.resize(n);
  log_t_.resize(n);
  for (int i = 0; i < n; ++i) {
    r_[i] = std::sinh(c * i / (n - 1));
    log_t_[i] = log_tail_mass(m, r_[i], cfg);
  }
}

double SymmetricSampler::operator()(SplitMix64& rng) const {
  const double lu = std::log(rng.uniform());
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  if (lu <= log_t_.back()) return sign * r_.back();
  // first index with log_t < lu
  const auto it = std::upper_bound(log_t_.begin(), log_t_.end(), lu, std::greater<double>());
  const std::size_t k = static_cast<std::size_t>(it - log_t_.begin());
  const double w = (lu - log_t_[k - 1]) / (log_t_[k] - log_t_[k - 1]);
  return sign * (r_[k - 1] + w * (r_[k] - r_[k - 1]));
}

SdeEnsemble sample_ensemble(const Model& model, std::size_t n, double gamma, double dt, std::uint64_t seed) {
  const SymmetricSampler sx(model.mu, model.cfg), sv(model.nu, model.cfg);
  SdeEnsemble e;
  e.gamma = gamma;
  e.dt = dt;
  e.seed = seed;
  e.x.resize(n);
  e.v.resize(n);
  e.rng.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    e.rng.push_back(SplitMix64::stream(seed, p));
    e.x[p] = sx(e.rng[p]);
    e.v[p] = sv(e.rng[p]);
  }
  return e;
}

namespace {

struct Stepper {
  const Profile& pot;
  const Profile& kin;
  double gamma, dt;
  bool gaussian;
  double decay, spread;  // exact OU half-step

  Stepper(const Model& m, double g, double h)
      : pot(m.potential.profile), kin(m.kinetic.profile), gamma(g), dt(h),
        gaussian(m.kinetic.profile.kind == ProfileKind::Gaussian) {
    decay = std::exp(-0.5 * gamma * dt);
    spread = std::sqrt(-std::expm1(-gamma * dt));
  }

  void ou(double& v, double xi) const {
    if (gaussian) v = decay * v + spread * xi;
    else v += -0.5 * gamma * dt * kin.deriv(v) + std::sqrt(gamma * dt) * xi;
  }

  void operator()(double& x, double& v, SplitMix64& rng) const {
    double xi1, xi2;
    rng.normal_pair(xi1, xi2);
    x += 0.5 * dt * kin.deriv(v);
    ou(v, xi1);
    v -= dt * pot.deriv(x);
    ou(v, xi2);
    x += 0.5 * dt * kin.deriv(v);
  }
};

void check_finite(double x, double v) {
  if (!std::isfinite(x) || !std::isfinite(v)) throw std::runtime_error("non-finite SDE state");
}

}  // namespace

void step_sde(SdeEnsemble& e, const Model& model) {
  if (!(e.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Stepper st(model, e.gamma, e.dt);
  for (std::size_t p = 0; p < e.x.size(); ++p) {
    st(e.x[p], e.v[p], e.rng[p]);
    check_finite(e.x[p], e.v[p]);
  }
}

McSeries estimate_observable_decay(const Model& model, double gamma, InitialKind h0, double h0_mean,
                                   const McSettings& ms) {
  const auto t0 = std::chrono::steady_clock::now();
  if (ms.blocks < 2 || ms.particles < static_cast<std::size_t>(ms.blocks))
    throw std::invalid_argument("need at least two blocks and one particle per block");
  if (!(ms.dt > 0.0) || !(ms.T > 0.0) || !(ms.stride > 0.0)) throw std::invalid_argument("dt, T and stride must be positive");
  const int per_sample = std::max(1, static_cast<int>(std::lround(ms.stride / ms.dt)));
  const int n_samples = static_cast<int>(std::floor(ms.T / (per_sample * ms.dt) + 1e-9)) + 1;
  const int burn = static_cast<int>(std::lround(ms.burn_in / ms.dt));
  const SymmetricSampler sx(model.mu, model.cfg), sv(model.nu, model.cfg);
  const Stepper st(model, gamma, ms.dt);
  const int B = ms.blocks;
  const std::size_t N = ms.particles;

  // per block: sum and sum of squares of f(Z_0) f(Z_t)
  std::vector<std::vector<double>> sum(B, std::vector<double>(n_samples, 0.0)), sq = sum;
  std::vector<std::size_t> count(B);
  auto run_block = [&](int b) {
    const std::size_t lo = N * b / B, hi = N * (b + 1) / B;
    count[b] = hi - lo;
    for (std::size_t p = lo; p < hi; ++p) {
      SplitMix64 rng = SplitMix64::stream(ms.seed, p);
      double x = sx(rng), v = sv(rng);
      for (int n = 0; n < burn; ++n) st(x, v, rng);
      const double f0 = initial_value(h0, x, v) - h0_mean;
      for (int k = 0; k < n_samples; ++k) {
        if (k > 0)
          for (int n = 0; n < per_sample; ++n) st(x, v, rng);
        check_finite(x, v);
        const double y = f0 * (initial_value(h0, x, v) - h0_mean);
        sum[b][k] += y;
        sq[b][k] += y * y;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(B, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int b = w; b < B; b += n_threads) run_block(b);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  McSeries out;
  out.min_ess = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    double S = 0.0, Q = 0.0;
    for (int b = 0; b < B; ++b) {
      S += sum[b][k];
      Q += sq[b][k];
    }
    const double mean = S / static_cast<double>(N);
    std::vector<double> loo(B);
    double loo_mean = 0.0;
    for (int b = 0; b < B; ++b) {
      loo[b] = (S - sum[b][k]) / static_cast<double>(N - count[b]);
      loo_mean += loo[b] / B;
    }
    double var = 0.0;
    for (int b = 0; b < B; ++b) var += (loo[b] - loo_mean) * (loo[b] - loo_mean);
    var *= static_cast<double>(B - 1) / B;
    const double naive = Q / static_cast<double>(N) - mean * mean;
    if (var > 0.0) out.min_ess = std::min(out.min_ess, naive / var);
    out.t.push_back(k * per_sample * ms.dt);
    out.c.push_back(mean);
    out.se.push_back(std::sqrt(var));
  }
  if (!std::isfinite(out.min_ess)) out.min_ess = 0.0;
  out.low_ess = out.min_ess < ms.min_ess;
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace hypo
