#pragma once

#include "hypocert/beta.hpp"
#include "hypocert/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hypo {

struct GridSettings {
  int Nx = 128;
  int Nv = 128;
  double X_max = 0.0;  // 0: smallest r with mu(|x| >= r) <= 1e-6, at least 20
  double V_max = 0.0;  // 0: smallest r with nu(|v| >= r) <= 1e-12
  double core = 2.0;   // nodes are roughly uniform for |z| below core and geometric beyond
};

// Smallest r with m(|x| >= r) <= mass, by bisection on log_tail_mass.
double tail_radius(const Measure& m, double mass, const QuadratureCfg& cfg);

// Tensor grid of finite-volume cells for d = 1. Nodes are sinh-mapped uniform
// points, faces sit at node midpoints and the two outer cells extend to
// infinity, so the cell masses of each axis sum to 1 up to the accuracy of
// the tail integrals.
struct Axis {
  std::vector<double> node;
  std::vector<double> face;      // size n + 1; face[0] = -inf, face[n] = +inf
  std::vector<double> mass;      // measure of each cell
  std::vector<double> face_rho;  // normalized density at each face (0 at +-inf)
  std::vector<double> node_rho;
  double cutoff = 0.0;

  int size() const { return static_cast<int>(node.size()); }
};

Axis make_axis(const Measure& m, int n, double cutoff, double core, const QuadratureCfg& cfg);

struct PhaseGrid {
  Axis x, v;
  int nx() const { return x.size(); }
  int nv() const { return v.size(); }
  std::size_t cells() const { return static_cast<std::size_t>(nx()) * nv(); }
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * nv() + j; }
  double weight(int i, int j) const { return x.mass[i] * v.mass[j]; }
  double total_weight() const;
};

PhaseGrid make_grid(const Model& model, const GridSettings& gs);

using Field = std::vector<double>;

// Backward Kolmogorov equation dh/dt = psi'(v) h_x - phi'(x) h_v + gamma (h_vv - psi'(v) h_v)
// in L^2(Theta). Transport uses face fluxes of the stream function
// rho_mu(x) rho_nu(v), so the discrete flux is divergence free and upwinding
// is a doubly stochastic update; velocity diffusion is backward Euler with
// face conductances given by the logarithmic mean of rho_nu (Chang-Cooper
// form in the variable h, whose equilibria are the constants).
class KfpSolver {
 public:
  KfpSolver(const PhaseGrid& grid, double gamma);

  const PhaseGrid& grid() const { return grid_; }
  double gamma() const { return gamma_; }

  // Largest explicit transport step keeping every update a convex combination.
  double max_transport_dt() const { return max_dt_; }

  void transport(Field& h, double dt) const;
  void diffuse(Field& h, double dt) const;
  // T(dt/2) D(dt) T(dt/2). Throws before touching h if dt/2 exceeds the transport limit.
  void step(Field& h, double dt, bool with_transport = true) const;

  double mass(const Field& h) const;
  double l2_sq(const Field& h) const;
  double pair(const Field& a, const Field& b) const;
  // Semi-discrete dissipation: -d/dt ||h||^2 = velocity part + upwind part.
  double velocity_dissipation(const Field& h) const;
  double transport_dissipation(const Field& h) const;

  // Smallest nonzero eigenvalue of the discrete velocity operator in L^2(nu).
  double velocity_gap() const;

 private:
  PhaseGrid grid_;
  double gamma_;
  std::vector<double> fx_;  // (nx - 1) * nv, flux from cell (i, j) to (i + 1, j)
  std::vector<double> fv_;  // nx * (nv - 1), flux from cell (i, j) to (i, j + 1)
  std::vector<double> cond_;  // nv - 1 velocity face conductances
  double max_dt_ = 0.0;
};

enum class InitialKind { TanhX, TanhV, TanhXTanhV, Constant };
std::string to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);
double initial_value(InitialKind k, double x, double v);

// Discrete Theta-mean of h0 on the grid.
double initial_mean(const PhaseGrid& g, InitialKind k);
// h0 on the grid with its discrete Theta-mean subtracted.
Field initial_field(const PhaseGrid& g, InitialKind k);

struct RunSettings {
  double dt = 0.0;       // 0: 0.9 * the largest stable step
  double T = 50.0;
  double stride = 0.5;   // sampling interval
  double tau = 1.0;      // window length of H_tau and D_tau
  bool transport = true;
};

struct DecaySeries {
  double dt = 0.0;
  int steps_per_sample = 1;
  int window_steps = 1;
  std::vector<double> t;
  std::vector<double> l2_sq;
  std::vector<double> linf;
  std::vector<double> osc;  // (max h - min h)^2
  std::vector<double> mass;
  // Window averages over [t, t + tau]; NaN where the window runs past T.
  std::vector<double> H_tau;
  std::vector<double> D_tau;    // total discrete dissipation
  std::vector<double> Dv_tau;   // velocity dissipation only
  std::vector<double> energy_residual;  // |(E(t + tau) - E(t)) / tau + D_tau(t)|
  std::vector<double> pairing;          // <h0, h(t)>_Theta
  int incomplete_windows = 0;

  // Diagnostics over every step.
  double max_mass_drift = 0.0;
  double max_l2_increase = 0.0;   // max_n (E_{n+1} - E_n) / E_0
  double max_principle_slack = 0.0;  // max(max h - max h0, min h0 - min h), clipped at 0
  double runtime_s = 0.0;
};

class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evolves the mean-zero h0 and records samples every stride. Aborts with
// InstabilityError when ||h||^2 grows by more than 1e-10 ||h0||^2 in one step.
DecaySeries run_decay(const KfpSolver& solver, const Field& h0, const RunSettings& rs);

// Per-sample allowance: 3 |coarse - refined| for each recorded quantity.
struct Budget {
  std::vector<double> l2_sq, H_tau, Dv_tau, pairing;
};
Budget richardson_budget(const DecaySeries& coarse, const DecaySeries& refined);
Budget zero_budget(const DecaySeries& s);

// Least squares slope of log y against log t over samples with t in [lo, hi]
// (log(-log(y / y0)) for stretched fits).
double fit_log_slope(const DecaySeries& s, double lo, double hi);
double fit_stretched(const DecaySeries& s, double lo, double hi);

struct DissipationAudit {
  int checked = 0;
  int failed = 0;
  int budget_dominated = 0;  // windows with Dv_tau below 10 x its budget (still checked)
  int failed_unbudgeted = 0; // failures with the budget terms dropped, for information
  double worst_margin = 0.0;  // min over checks of (rhs - lhs) / rhs
  double worst_t = 0.0, worst_s = 0.0;
  bool passed() const { return failed == 0; }
};

// H_tau(t) <= s D_tau(t) + beta(s) Phi(h0) + budget on every complete window
// and on s = 10^k, k = -2, -1.75, ..., 14.
DissipationAudit weak_dissipation_check(const DecaySeries& s, const Budget& b, const BetaFn& beta, double phi0);

}  // namespace hypo
