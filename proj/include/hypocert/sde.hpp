#pragma once

#include "hypocert/model.hpp"
#include "hypocert/solver.hpp"

#include <cstdint>
#include <vector>

namespace hypo {

// SplitMix64; one independent stream per particle, keyed by (seed, index).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  double uniform();  // in (0, 1)
  // Two independent standard normals (Box-Muller).
  void normal_pair(double& a, double& b);

 private:
  std::uint64_t state_;
};

// Inverse-CDF sampler of a symmetric one-dimensional measure, tabulated on
// |z| up to the radius with tail mass 1e-12 (larger |z| is clamped to it).
class SymmetricSampler {
 public:
  SymmetricSampler(const Measure& m, const QuadratureCfg& cfg, int n = 2000);
  double operator()(SplitMix64& rng) const;

 private:
  std::vector<double> r_;      // increasing radii
  std::vector<double> log_t_;  // log m(|z| >= r), decreasing
};

struct SdeEnsemble {
  std::vector<double> x, v;
  double gamma = 1.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
  std::vector<SplitMix64> rng;
};

// Theta-distributed ensemble by direct sampling.
SdeEnsemble sample_ensemble(const Model& model, std::size_t n, double gamma, double dt, std::uint64_t seed);

// One step A(dt/2) O(dt/2) B(dt) O(dt/2) A(dt/2): A moves x by psi'(v), B kicks v
// by -phi'(x), O is the friction-noise pair (exact Ornstein-Uhlenbeck when psi
// is Gaussian, Euler-Maruyama otherwise). Throws on a non-finite state.
void step_sde(SdeEnsemble& e, const Model& model);

struct McSettings {
  std::size_t particles = 100000;
  double dt = 0.01;
  double T = 10.0;
  double stride = 0.1;
  double burn_in = 1.0;
  int blocks = 100;
  std::uint64_t seed = 1;
  double min_ess = 1000.0;
};

struct McSeries {
  std::vector<double> t, c, se;  // autocovariance and jackknife standard error
  double min_ess = 0.0;
  bool low_ess = false;
  double runtime_s = 0.0;
};

// c(t) = <f(Z_0) f(Z_t)> along stationary trajectories, f = h0 - h0_mean.
// Blocks of consecutive particles are the jackknife units and are processed
// independently, so the result does not depend on the number of threads.
McSeries estimate_observable_decay(const Model& model, double gamma, InitialKind h0, double h0_mean,
                                   const McSettings& ms);

}  // namespace hypo
