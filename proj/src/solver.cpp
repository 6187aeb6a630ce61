#include "hypocert/solver.hpp"

#include "hypocert/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// m(z >= f) for the symmetric one-dimensional measure m.
double upper_mass(const Measure& m, double f, const QuadratureCfg& cfg) {
  if (f == kInf) return 0.0;
  if (f == -kInf) return 1.0;
  if (f == 0.0) return 0.5;
  const double half = 0.5 * std::exp(log_tail_mass(m, std::abs(f), cfg));
  return f > 0.0 ? half : 1.0 - half;
}

// (a - b) / (log a - log b), the logarithmic mean.
double log_mean(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  const double r = b / a;
  if (std::abs(r - 1.0) < 1e-8) return 0.5 * (a + b);
  return (b - a) / std::log(r);
}

}  // namespace

double tail_radius(const Measure& m, double mass, const QuadratureCfg& cfg) {
  const double target = std::log(mass);
  double hi = 1.0;
  while (log_tail_mass(m, hi, cfg) > target) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("tail radius unreachable");
  }
  double lo = hi / 2.0;
  if (log_tail_mass(m, lo, cfg) <= target) lo = 0.0;
  for (int it = 0; it < 100 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_tail_mass(m, mid, cfg) > target) lo = mid;
    else hi = mid;
  }
  return hi;
}

Axis make_axis(const Measure& m, int n, double cutoff, double core, const QuadratureCfg& cfg) {
  if (n < 4) throw std::invalid_argument("an axis needs at least 4 nodes");
  if (!(cutoff > 0.0) || !(core > 0.0)) throw std::invalid_argument("cutoff and core must be positive");
  Axis a;
  a.cutoff = cutoff;
  const double c = std::asinh(cutoff / core);
  a.node.resize(n);
  for (int i = 0; i < n; ++i) {
    const double xi = -1.0 + 2.0 * i / (n - 1);
    a.node[i] = cutoff * std::sinh(c * xi) / std::sinh(c);
  }
  // exact symmetry
  for (int i = 0; i < n / 2; ++i) a.node[n - 1 - i] = -a.node[i];
  if (n % 2 == 1) a.node[n / 2] = 0.0;

  a.face.assign(n + 1, 0.0);
  a.face[0] = -kInf;
  a.face[n] = kInf;
  for (int i = 1; i < n; ++i) a.face[i] = 0.5 * (a.node[i - 1] + a.node[i]);
  for (int i = 1; i < n / 2 + 1; ++i) a.face[n - i] = -a.face[i];

  std::vector<double> up(n + 1);
  for (int i = 0; i <= n; ++i) up[i] = upper_mass(m, a.face[i], cfg);
  a.mass.resize(n);
  for (int i = 0; i < n; ++i) a.mass[i] = up[i] - up[i + 1];
  for (int i = 0; i < n / 2; ++i) a.mass[n - 1 - i] = a.mass[i];

  a.face_rho.resize(n + 1);
  for (int i = 0; i <= n; ++i) a.face_rho[i] = std::isfinite(a.face[i]) ? m.density(a.face[i]) : 0.0;
  a.node_rho.resize(n);
  for (int i = 0; i < n; ++i) a.node_rho[i] = m.density(a.node[i]);
  for (double w : a.mass) {
    if (!(w > 0.0)) throw std::runtime_error("nonpositive cell mass; reduce the cutoff");
  }
  return a;
}

double PhaseGrid::total_weight() const {
  double sx = 0.0, sv = 0.0;
  for (double w : x.mass) sx += w;
  for (double w : v.mass) sv += w;
  return sx * sv;
}

PhaseGrid make_grid(const Model& model, const GridSettings& gs) {
  if (model.d != 1) throw std::invalid_argument("the phase-space solver is one-dimensional");
  const auto& cfg = model.cfg;
  const double X = gs.X_max > 0.0 ? gs.X_max : std::max(20.0, tail_radius(model.mu, 1e-6, cfg));
  const double V = gs.V_max > 0.0 ? gs.V_max : tail_radius(model.nu, 1e-12, cfg);
  PhaseGrid g;
  g.x = make_axis(model.mu, gs.Nx, X, gs.core, cfg);
  g.v = make_axis(model.nu, gs.Nv, V, gs.core, cfg);
  return g;
}

// ---------------------------------------------------------------------------

KfpSolver::KfpSolver(const PhaseGrid& grid, double gamma) : grid_(grid), gamma_(gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  const int nx = grid_.nx(), nv = grid_.nv();
  const auto& rx = grid_.x.face_rho;
  const auto& rv = grid_.v.face_rho;
  // Advecting field (-psi', phi') Theta = (rho_v' rho_x, -rho_x' rho_v) integrated over each face.
  fx_.resize(static_cast<std::size_t>(nx - 1) * nv);
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j < nv; ++j) fx_[static_cast<std::size_t>(i) * nv + j] = rx[i + 1] * (rv[j + 1] - rv[j]);
  fv_.resize(static_cast<std::size_t>(nx) * (nv - 1));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < nv; ++j)
      fv_[static_cast<std::size_t>(i) * (nv - 1) + j] = rv[j + 1] * (rx[i] - rx[i + 1]);

  std::vector<double> inflow(grid_.cells(), 0.0);
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j < nv; ++j) {
      const double f = fx_[static_cast<std::size_t>(i) * nv + j];
      inflow[grid_.at(f > 0.0 ? i + 1 : i, j)] += std::abs(f);
    }
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < nv; ++j) {
      const double f = fv_[static_cast<std::size_t>(i) * (nv - 1) + j];
      inflow[grid_.at(i, f > 0.0 ? j + 1 : j)] += std::abs(f);
    }
  double rate = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nv; ++j) rate = std::max(rate, inflow[grid_.at(i, j)] / grid_.weight(i, j));
  max_dt_ = rate > 0.0 ? 1.0 / rate : kInf;

  const auto& vn = grid_.v.node;
  cond_.resize(nv - 1);
  for (int j = 0; j + 1 < nv; ++j)
    cond_[j] = log_mean(grid_.v.node_rho[j], grid_.v.node_rho[j + 1]) / (vn[j + 1] - vn[j]);
}

void KfpSolver::transport(Field& h, double dt) const {
  const int nx = grid_.nx(), nv = grid_.nv();
  Field dh(h.size(), 0.0);
  for (int i = 0; i + 1 < nx; ++i) {
    const double* f = &fx_[static_cast<std::size_t>(i) * nv];
    const double* a = &h[grid_.at(i, 0)];
    const double* b = &h[grid_.at(i + 1, 0)];
    double* da = &dh[grid_.at(i, 0)];
    double* db = &dh[grid_.at(i + 1, 0)];
    for (int j = 0; j < nv; ++j) {
      if (f[j] > 0.0) db[j] += f[j] * (a[j] - b[j]);
      else da[j] -= f[j] * (b[j] - a[j]);
    }
  }
  for (int i = 0; i < nx; ++i) {
    const double* f = &fv_[static_cast<std::size_t>(i) * (nv - 1)];
    const double* a = &h[grid_.at(i, 0)];
    double* d = &dh[grid_.at(i, 0)];
    for (int j = 0; j + 1 < nv; ++j) {
      if (f[j] > 0.0) d[j + 1] += f[j] * (a[j] - a[j + 1]);
      else d[j] -= f[j] * (a[j + 1] - a[j]);
    }
  }
  for (int i = 0; i < nx; ++i) {
    const double c = dt / grid_.x.mass[i];
    for (int j = 0; j < nv; ++j) h[grid_.at(i, j)] += c * dh[grid_.at(i, j)] / grid_.v.mass[j];
  }
}

void KfpSolver::diffuse(Field& h, double dt) const {
  if (gamma_ == 0.0) return;
  const int nx = grid_.nx(), nv = grid_.nv();
  const auto& m = grid_.v.mass;
  std::vector<double> lower(nv, 0.0), diag(nv), upper(nv, 0.0);
  for (int j = 0; j < nv; ++j) {
    const double cl = j > 0 ? gamma_ * dt * cond_[j - 1] : 0.0;
    const double cu = j + 1 < nv ? gamma_ * dt * cond_[j] : 0.0;
    lower[j] = -cl;
    upper[j] = -cu;
    diag[j] = m[j] + cl + cu;
  }
  // Thomas elimination, factorized once for every column
  std::vector<double> cp(nv), inv(nv);
  inv[0] = 1.0 / diag[0];
  cp[0] = upper[0] * inv[0];
  for (int j = 1; j < nv; ++j) {
    inv[j] = 1.0 / (diag[j] - lower[j] * cp[j - 1]);
    cp[j] = upper[j] * inv[j];
  }
  std::vector<double> y(nv);
  for (int i = 0; i < nx; ++i) {
    double* col = &h[grid_.at(i, 0)];
    y[0] = m[0] * col[0] * inv[0];
    for (int j = 1; j < nv; ++j) y[j] = (m[j] * col[j] - lower[j] * y[j - 1]) * inv[j];
    col[nv - 1] = y[nv - 1];
    for (int j = nv - 2; j >= 0; --j) col[j] = y[j] - cp[j] * col[j + 1];
  }
}

void KfpSolver::step(Field& h, double dt, bool with_transport) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (with_transport && 0.5 * dt > max_dt_ * (1.0 + 1e-12)) {
    throw std::invalid_argument("CFL violation: dt/2 = " + std::to_string(0.5 * dt) +
                                " exceeds the transport limit " + std::to_string(max_dt_));
  }
  if (with_transport) transport(h, 0.5 * dt);
  diffuse(h, dt);
  if (with_transport) transport(h, 0.5 * dt);
}

double KfpSolver::mass(const Field& h) const { return pair(h, Field(h.size(), 1.0)); }

double KfpSolver::pair(const Field& a, const Field& b) const {
  double s = 0.0;
  for (int i = 0; i < grid_.nx(); ++i) {
    double r = 0.0;
    for (int j = 0; j < grid_.nv(); ++j) r += grid_.v.mass[j] * a[grid_.at(i, j)] * b[grid_.at(i, j)];
    s += grid_.x.mass[i] * r;
  }
  return s;
}

double KfpSolver::l2_sq(const Field& h) const { return pair(h, h); }

double KfpSolver::velocity_dissipation(const Field& h) const {
  double s = 0.0;
  for (int i = 0; i < grid_.nx(); ++i) {
    double r = 0.0;
    const double* col = &h[grid_.at(i, 0)];
    for (int j = 0; j + 1 < grid_.nv(); ++j) r += cond_[j] * (col[j + 1] - col[j]) * (col[j + 1] - col[j]);
    s += grid_.x.mass[i] * r;
  }
  return 2.0 * gamma_ * s;
}

double KfpSolver::transport_dissipation(const Field& h) const {
  const int nx = grid_.nx(), nv = grid_.nv();
  double s = 0.0;
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j < nv; ++j) {
      const double d = h[grid_.at(i + 1, j)] - h[grid_.at(i, j)];
      s += std::abs(fx_[static_cast<std::size_t>(i) * nv + j]) * d * d;
    }
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < nv; ++j) {
      const double d = h[grid_.at(i, j + 1)] - h[grid_.at(i, j)];
      s += std::abs(fv_[static_cast<std::size_t>(i) * (nv - 1) + j]) * d * d;
    }
  return s;
}

double KfpSolver::velocity_gap() const {
  const int nv = grid_.nv();
  const auto& m = grid_.v.mass;
  std::vector<double> diag(nv, 0.0), off(nv - 1);
  for (int j = 0; j + 1 < nv; ++j) {
    diag[j] += cond_[j] / m[j];
    diag[j + 1] += cond_[j] / m[j + 1];
    off[j] = -cond_[j] / std::sqrt(m[j] * m[j + 1]);
  }
  return tridiagonal_eigenvalue(diag, off, 1);
}

// ---------------------------------------------------------------------------

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::TanhX: return "tanh_x";
    case InitialKind::TanhV: return "tanh_v";
    case InitialKind::TanhXTanhV: return "tanh_x_tanh_v";
    case InitialKind::Constant: return "constant";
  }
  return "?";
}

InitialKind initial_kind_from_string(const std::string& s) {
  for (auto k : {InitialKind::TanhX, InitialKind::TanhV, InitialKind::TanhXTanhV, InitialKind::Constant})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown initial datum '" + s + "'");
}

double initial_value(InitialKind k, double x, double v) {
  switch (k) {
    case InitialKind::TanhX: return std::tanh(x);
    case InitialKind::TanhV: return std::tanh(v);
    case InitialKind::TanhXTanhV: return std::tanh(x) * std::tanh(v);
    case InitialKind::Constant: return 1.0;
  }
  return 0.0;
}

double initial_mean(const PhaseGrid& g, InitialKind k) {
  if (k == InitialKind::Constant) return 1.0;
  double mean = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nv(); ++j) mean += g.weight(i, j) * initial_value(k, g.x.node[i], g.v.node[j]);
  return mean / g.total_weight();
}

Field initial_field(const PhaseGrid& g, InitialKind k) {
  const double mean = initial_mean(g, k);
  Field h(g.cells());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nv(); ++j) h[g.at(i, j)] = initial_value(k, g.x.node[i], g.v.node[j]) - mean;
  return h;
}

// ---------------------------------------------------------------------------

namespace {

double trapezoid_mean(const std::vector<double>& y, std::size_t a, std::size_t b) {
  double s = 0.5 * (y[a] + y[b]);
  for (std::size_t n = a + 1; n < b; ++n) s += y[n];
  return s / static_cast<double>(b - a);
}

}  // namespace

DecaySeries run_decay(const KfpSolver& solver, const Field& h0, const RunSettings& rs) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(rs.T > 0.0) || !(rs.stride > 0.0) || !(rs.tau > 0.0)) throw std::invalid_argument("T, stride and tau must be positive");
  double dt = rs.dt > 0.0 ? rs.dt : 0.9 * 2.0 * solver.max_transport_dt();
  // align steps with the sampling stride and the window length
  const int per_sample = std::max(1, static_cast<int>(std::ceil(rs.stride / dt - 1e-9)));
  dt = rs.stride / per_sample;
  DecaySeries s;
  s.dt = dt;
  s.steps_per_sample = per_sample;
  s.window_steps = std::max(1, static_cast<int>(std::lround(rs.tau / dt)));
  const int n_samples = static_cast<int>(std::floor(rs.T / rs.stride + 1e-9));
  const long n_steps = static_cast<long>(n_samples) * per_sample;

  Field h = h0;
  const double e0 = solver.l2_sq(h0);
  const double hmax0 = *std::max_element(h0.begin(), h0.end());
  const double hmin0 = *std::min_element(h0.begin(), h0.end());
  const double mass0 = solver.mass(h0);
  std::vector<double> E(n_steps + 1), D(n_steps + 1), Dv(n_steps + 1);
  auto record_step = [&](long n) {
    E[n] = solver.l2_sq(h);
    Dv[n] = solver.velocity_dissipation(h);
    D[n] = rs.transport ? Dv[n] + solver.transport_dissipation(h) : Dv[n];
  };
  auto record_sample = [&](double t) {
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    s.t.push_back(t);
    s.linf.push_back(std::max(std::abs(*lo), std::abs(*hi)));
    s.osc.push_back((*hi - *lo) * (*hi - *lo));
    s.mass.push_back(solver.mass(h));
    s.pairing.push_back(solver.pair(h0, h));
  };
  record_step(0);
  record_sample(0.0);
  for (long n = 0; n < n_steps; ++n) {
    solver.step(h, dt, rs.transport);
    record_step(n + 1);
    const double inc = E[n + 1] - E[n];
    if (e0 > 0.0) {
      s.max_l2_increase = std::max(s.max_l2_increase, inc / e0);
      if (inc > 1e-10 * e0 || !std::isfinite(E[n + 1])) {
        throw InstabilityError("||h||^2 increased by " + std::to_string(inc / e0) + " ||h0||^2 at t = " +
                               std::to_string((n + 1) * dt));
      }
    }
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    s.max_principle_slack = std::max({s.max_principle_slack, *hi - hmax0, hmin0 - *lo});
    if ((n + 1) % per_sample == 0) {
      record_sample((n + 1) * dt);
      s.max_mass_drift = std::max(s.max_mass_drift, std::abs(s.mass.back() - mass0));
    }
  }
  const int w = s.window_steps;
  const double tau = w * dt;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    s.l2_sq.push_back(E[k * per_sample]);
    const long a = static_cast<long>(k) * per_sample;
    if (a + w > n_steps) {
      s.H_tau.push_back(kNaN);
      s.D_tau.push_back(kNaN);
      s.Dv_tau.push_back(kNaN);
      s.energy_residual.push_back(kNaN);
      ++s.incomplete_windows;
      continue;
    }
    s.H_tau.push_back(trapezoid_mean(E, a, a + w));
    s.D_tau.push_back(trapezoid_mean(D, a, a + w));
    s.Dv_tau.push_back(trapezoid_mean(Dv, a, a + w));
    s.energy_residual.push_back(std::abs((E[a + w] - E[a]) / tau + s.D_tau.back()));
  }
  s.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

// ---------------------------------------------------------------------------

Budget zero_budget(const DecaySeries& s) {
  Budget b;
  b.l2_sq.assign(s.t.size(), 0.0);
  b.H_tau = b.Dv_tau = b.pairing = b.l2_sq;
  return b;
}

Budget richardson_budget(const DecaySeries& coarse, const DecaySeries& refined) {
  if (coarse.t.size() != refined.t.size()) throw std::invalid_argument("series are sampled differently");
  Budget b = zero_budget(coarse);
  auto diff = [](double a, double c) { return std::isfinite(a) && std::isfinite(c) ? 3.0 * std::abs(a - c) : 0.0; };
  for (std::size_t k = 0; k < coarse.t.size(); ++k) {
    b.l2_sq[k] = diff(coarse.l2_sq[k], refined.l2_sq[k]);
    b.H_tau[k] = diff(coarse.H_tau[k], refined.H_tau[k]);
    b.Dv_tau[k] = diff(coarse.Dv_tau[k], refined.Dv_tau[k]);
    b.pairing[k] = diff(coarse.pairing[k], refined.pairing[k]);
  }
  return b;
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return kNaN;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

double fit_log_slope(const DecaySeries& s, double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < s.t.size(); ++k)
    if (s.t[k] >= lo && s.t[k] <= hi && s.l2_sq[k] > 0.0) {
      x.push_back(std::log(s.t[k]));
      y.push_back(std::log(s.l2_sq[k]));
    }
  return ls_slope(x, y);
}

double fit_stretched(const DecaySeries& s, double lo, double hi) {
  std::vector<double> x, y;
  const double e0 = s.l2_sq.front();
  for (std::size_t k = 0; k < s.t.size(); ++k)
    if (s.t[k] >= lo && s.t[k] <= hi && s.l2_sq[k] > 0.0 && s.l2_sq[k] < e0) {
      x.push_back(std::log(s.t[k]));
      y.push_back(std::log(-std::log(s.l2_sq[k] / e0)));
    }
  return ls_slope(x, y);
}

DissipationAudit weak_dissipation_check(const DecaySeries& s, const Budget& b, const BetaFn& beta, double phi0) {
  DissipationAudit a;
  a.worst_margin = kInf;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    if (!std::isfinite(s.H_tau[k])) continue;
    const double D = s.Dv_tau[k];
    if (D < 10.0 * b.Dv_tau[k]) ++a.budget_dominated;
    for (int e = -8; e <= 56; ++e) {
      const double sv = std::pow(10.0, 0.25 * e);
      const double rhs = sv * (D + b.Dv_tau[k]) + beta(sv) * phi0 + b.H_tau[k];
      const double lhs = s.H_tau[k];
      ++a.checked;
      const double margin = rhs > 0.0 ? (rhs - lhs) / rhs : (lhs > 0.0 ? -kInf : 0.0);
      if (lhs > rhs) ++a.failed;
      if (lhs > sv * D + beta(sv) * phi0) ++a.failed_unbudgeted;
      if (margin < a.worst_margin) {
        a.worst_margin = margin;
        a.worst_t = s.t[k];
        a.worst_s = sv;
      }
    }
  }
  if (a.checked == 0) a.worst_margin = kNaN;
  return a;
}

}  // namespace hypo
