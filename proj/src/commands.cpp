#include "hypocert/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hypo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool kinetic_strong(const ModelSpec& s) {
  return s.kinetic == ProfileKind::Gaussian || (s.kinetic == ProfileKind::SubExp && s.kinetic_param >= 1.0);
}

double h0_norm_sq(const Model& m, InitialKind k) {
  const auto& cfg = m.cfg;
  auto tanh_sq = [](double z) { return std::tanh(z) * std::tanh(z); };
  switch (k) {
    case InitialKind::TanhX: return integrate(tanh_sq, m.mu, cfg).value;
    case InitialKind::TanhV: return integrate(tanh_sq, m.nu, cfg).value;
    case InitialKind::TanhXTanhV: return integrate(tanh_sq, m.mu, cfg).value * integrate(tanh_sq, m.nu, cfg).value;
    case InitialKind::Constant: return 0.0;
  }
  return 0.0;
}

ojson class_json(const ExponentClass& c, const std::string& formula) {
  ojson j;
  j["kind"] = c.kind_name();
  j["r"] = c.r;
  j["symbol"] = c.symbol();
  j["formula"] = formula;
  return j;
}

ojson certificate_json(const RateCertificate& c, double a) {
  ojson j;
  j["regime"] = to_string(c.regime);
  j["tau"] = c.tau;
  j["normalizer"] = c.normalizer_name();
  j["class"] = class_json(c.cls, "");
  j["class"].erase("formula");
  if (c.thm1) {
    const auto& k = *c.thm1;
    j["weighted_rate_constants"] = {{"C2", k.C2}, {"C3", k.C3}, {"A1", k.A1}, {"A2", k.A2}, {"B", k.B},
                     {"phi0", k.phi0}, {"H0", k.H0}, {"sigma", k.sigma}, {"delta", k.delta}};
  }
  if (c.kinetic) {
    const auto& kb = *c.kinetic;
    ojson b;
    b["route"] = to_string(kb.route);
    b["beta"] = kb.beta->describe();
    if (kb.route == KineticRoute::Poincare) {
      b["C_tilde"] = kb.C_tilde;
      b["b"] = kb.b;
    }
    if (kb.route == KineticRoute::Chained) {
      b["c"] = kb.c;
      b["C_bar"] = kb.C_bar;
      b["M"] = kb.M;
      b["M_resolved"] = kb.M_resolved;
    }
    j["beta_kin"] = b;
    j["a"] = a;
    j["envelope_t_le_tau"] = c.envelope(0.0);
    j["envelope_literal_t_le_tau"] = c.envelope_literal(0.0);
    j["truncated_by_floor"] = c.rate->truncated_by_floor();
  }
  const double t_rel = c.t_reliable();
  j["t_reliable"] = t_rel;
  if (c.cls.kind != ExponentClass::Kind::Exponential) {
    const FitResult f = fit_exponent(c);
    j["fitted_exponent"] = f.exponent;
    j["fit_window"] = {f.t_lo, f.t_hi};
    if (c.cls.kind == ExponentClass::Kind::AlgebraicMinus)
      j["fit_note"] = "eps-loss class: the fitted exponent is reported, not claimed exact";
  }
  ojson env = ojson::array();
  env.push_back({0.0, c.envelope(0.0)});
  for (int k = -4; k <= 600; ++k) {
    const double t = std::pow(10.0, 0.5 * k);
    if (t > t_rel) break;
    env.push_back({t, c.envelope(t)});
  }
  j["envelope"] = env;
  return j;
}

}  // namespace

Scenario apply_overrides(Scenario s, const CommandOptions& opt) {
  if (opt.tau) {
    if (!(*opt.tau > 0.0)) throw std::invalid_argument("--tau must be positive");
    s.tau = *opt.tau;
    s.run.tau = *opt.tau;
  }
  if (opt.seed) s.mc.seed = *opt.seed;
  return s;
}

const RateCertificate* Certification::weak() const {
  for (const auto& c : certs)
    if (c.weak_regime()) return &c;
  return nullptr;
}

double Certification::l2_bound(double t, double l2_sq0, double phi) const {
  double b = kInf;
  for (const auto& c : certs) b = std::min(b, (c.weak_regime() ? phi : l2_sq0) * c.envelope(t));
  return b;
}

Certification certify(const Scenario& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Certification c;
  c.scenario = s;
  QuadratureCfg cfg;
  c.model = make_benchmark(s.model, cfg);
  const Model& m = c.model;

  const AssumptionReport rep = validate_assumptions(m, cfg);
  ojson checks = ojson::array();
  for (const auto& a : rep.checks)
    checks.push_back({{"name", a.name}, {"passed", a.passed}, {"worst", a.worst}, {"bound", a.bound}, {"witness", a.witness}});
  if (!rep.all_passed()) throw AssumptionError("model assumptions failed", checks);

  c.cls = table1_exponent(s.model.potential, s.model.potential_param, s.model.kinetic, s.model.kinetic_param);
  c.symbol = table1_symbol(s.model.potential, s.model.potential_param, s.model.kinetic, s.model.kinetic_param);
  c.h0_l2_sq = h0_norm_sq(m, s.h0);
  c.h0_inf = s.h0 == InitialKind::Constant ? 0.0 : 1.0;
  c.phi0 = 4.0 * c.h0_inf * c.h0_inf;

  // The weighted-Poincare constants need P_W, which strongly confining
  // potentials only have when the scenario supplies it.
  std::optional<SpatialConstants> sp;
  std::optional<AveragingConstants> avg;
  std::string constants_note;
  const VelocityMoments mom = compute_velocity_moments(m, cfg);
  try {
    sp = compute_spatial_constants(m, s.tau);
    avg = compute_averaging_constants(*sp, mom, m.potential.L, m.weight.theta);
  } catch (const std::invalid_argument& e) {
    constants_note = e.what();
  }

  const bool strong = m.strongly_confined();
  auto thm1 = [&](Thm1Case which) {
    const bool ok = which == Thm1Case::I ? m.kinetic.active == VelocityInequality::Poincare
                                         : m.kinetic.active == VelocityInequality::Weighted && m.kinetic.weight &&
                                               m.kinetic.weight->P_v;
    if (!ok) throw std::invalid_argument("case mismatch with the scenario's velocity inequality");
    if (!sp) throw std::invalid_argument(constants_note);
    return certify_thm1(m, *sp, *avg, s.gamma, c.h0_inf, c.h0_l2_sq, which);
  };
  auto appendix = [&] {
    if (!s.C_PL) throw std::invalid_argument("missing C_PL: the Poincare-Lions route needs a user-supplied constant");
    return certify_appendix_a(m, *s.C_PL, s.gamma, s.a, s.tau, cfg);
  };
  if (c.h0_l2_sq == 0.0) {
    c.skipped_reason = "h0 is constant, so h vanishes identically";
  } else if (s.regime == "auto") {
    if (strong && kinetic_strong(s.model)) {
      c.skipped_reason = "exponential cell: the rate constant is outside the certified-constant scope";
    } else if (strong) {
      c.certs.push_back(appendix());
    } else {
      c.certs.push_back(certify_weak(m, s.gamma, s.tau, s.a, cfg));
      std::optional<Thm1Case> which;
      if (m.kinetic.active == VelocityInequality::Poincare) which = Thm1Case::I;
      else if (m.kinetic.active == VelocityInequality::Weighted && m.kinetic.weight && m.kinetic.weight->P_v)
        which = Thm1Case::II;
      if (which) c.certs.push_back(thm1(*which));
    }
  } else {
    switch (regime_from_string(s.regime)) {
      case Regime::Thm1CaseI: c.certs.push_back(thm1(Thm1Case::I)); break;
      case Regime::Thm1CaseII: c.certs.push_back(thm1(Thm1Case::II)); break;
      case Regime::Thm3: c.certs.push_back(certify_weak(m, s.gamma, s.tau, s.a, cfg)); break;
      case Regime::AppendixA:
        if (!strong) throw std::invalid_argument("the Poincare-Lions route needs a strongly confining potential");
        c.certs.push_back(appendix());
        break;
    }
  }
  for (auto& r : c.certs) r.id = s.id;

  ojson j;
  j["spec"] = kSchemaVersion;
  j["id"] = s.id;
  j["scenario"] = to_json(s);
  ojson model;
  model["L"] = m.potential.L;
  model["M"] = m.potential.M;
  model["strongly_confined"] = strong;
  model["weight"] = {{"k", m.weight.k},
                     {"sigma", m.weight.sigma},
                     {"theta_W", m.weight.theta},
                     {"P_W", m.weight.P_W},
                     {"P_W_provenance", to_string(m.weight.P_W_provenance)},
                     {"Z_W", m.weight.Z_W},
                     {"W_sigma_norm", m.weight.W_sigma_norm}};
  ojson kin;
  kin["active"] = to_string(m.kinetic.active);
  if (m.kinetic.C_P) kin["C_P"] = *m.kinetic.C_P;
  kin["C_P_provenance"] = to_string(m.kinetic.C_P_provenance);
  if (m.kinetic.weight) {
    const auto& g = *m.kinetic.weight;
    kin["weight"] = {{"k", g.k}, {"delta_w", g.delta_w}, {"Z_G", g.Z_G}, {"P_G", g.P_G},
                     {"P_G_provenance", to_string(g.P_G_provenance)}, {"G_delta_norm", g.G_delta_norm}};
    if (g.P_v) kin["weight"]["P_v"] = *g.P_v;
  }
  model["kinetic"] = kin;
  j["model"] = model;
  j["assumptions"] = checks;
  ojson k;
  if (sp) {
    k = {{"Z_W", sp->Z_W},         {"P_W", sp->P_W},         {"theta_W", sp->theta_W},
         {"sigma", m.weight.sigma}, {"R_W_tau", sp->R_W_tau}, {"C0", sp->C0},
         {"C1", sp->C1},           {"C_Lions", sp->C_Lions}};
  } else {
    k["note"] = constants_note;
  }
  k["n2"] = mom.n2;
  k["n4"] = mom.n4;
  k["h2"] = mom.h2;
  k["rho_scrM"] = mom.rho_scrM;
  k["rho_calM"] = mom.rho_calM;
  k["gH1"] = mom.gH1;
  k["cross1"] = mom.cross1;
  k["cross2"] = mom.cross2;
  if (avg) {
    k["C0_tau"] = avg->C0_tau;
    k["C1_tau"] = avg->C1_tau;
  }
  j["constants"] = k;
  j["h0"] = {{"kind", to_string(s.h0)}, {"l2_sq", c.h0_l2_sq}, {"linf", c.h0_inf}, {"Phi", c.phi0}};
  j["class"] = class_json(c.cls, c.symbol);
  ojson certs = ojson::array();
  for (const auto& r : c.certs) certs.push_back(certificate_json(r, s.a));
  j["certificates"] = certs;
  if (!c.skipped_reason.empty()) j["skipped_reason"] = c.skipped_reason;
  j["runtime_s"] = seconds_since(t0);
  c.json = std::move(j);
  return c;
}

// ---------------------------------------------------------------------------

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

namespace {

struct Pair {
  DecaySeries coarse;
  std::vector<DecaySeries> refined;
  Budget budget;
};

// Base run plus `levels` refinements, each doubling Nx and Nv and halving dt.
Pair run_with_refinement(const Model& m, const Scenario& s, RunSettings rs, int levels) {
  const PhaseGrid g = make_grid(m, s.grid);
  const KfpSolver solver(g, s.gamma);
  Pair p;
  p.coarse = run_decay(solver, initial_field(g, s.h0), rs);
  for (int l = 1; l <= levels; ++l) {
    GridSettings gs = s.grid;
    gs.Nx = s.grid.Nx << l;
    gs.Nv = s.grid.Nv << l;
    gs.X_max = g.x.cutoff;
    gs.V_max = g.v.cutoff;
    const PhaseGrid gl = make_grid(m, gs);
    const KfpSolver sl(gl, s.gamma);
    RunSettings rl = rs;
    rl.dt = std::min(p.coarse.dt / (1 << l), 0.9 * 2.0 * sl.max_transport_dt());
    p.refined.push_back(run_decay(sl, initial_field(gl, s.h0), rl));
  }
  p.budget = levels > 0 ? richardson_budget(p.coarse, p.refined.front()) : zero_budget(p.coarse);
  return p;
}

ojson diagnostics_json(const DecaySeries& s) {
  double res = 0.0;
  for (double r : s.energy_residual)
    if (std::isfinite(r)) res = std::max(res, r);
  return {{"dt", s.dt},
          {"samples", s.t.size()},
          {"max_mass_drift", s.max_mass_drift},
          {"max_l2_increase_rel", s.max_l2_increase},
          {"max_principle_slack", s.max_principle_slack},
          {"max_energy_residual", res},
          {"runtime_s", s.runtime_s}};
}

}  // namespace

Simulation simulate(const Certification& cert, const CommandOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario& s = cert.scenario;
  const Model& m = cert.model;
  Simulation out;
  RunSettings rs = s.run;
  rs.tau = s.tau;
  Pair p = run_with_refinement(m, s, rs, std::max(0, opt.refine));
  out.series = std::move(p.coarse);
  out.refined = std::move(p.refined);
  out.budget = std::move(p.budget);
  const PhaseGrid g = make_grid(m, s.grid);
  const Field h0 = initial_field(g, s.h0);
  const auto [lo, hi] = std::minmax_element(h0.begin(), h0.end());
  out.phi0 = (*hi - *lo) * (*hi - *lo);
  out.h0_l2_sq = out.series.l2_sq.front();

  std::ostringstream csv;
  csv << "t,l2_sq,linf,osc,H_tau,D_tau,energy_residual,envelope,dominated\n";
  int n_fail = 0;
  const auto& se = out.series;
  for (std::size_t k = 0; k < se.t.size(); ++k) {
    const double env = cert.l2_bound(se.t[k], out.h0_l2_sq, out.phi0);
    const int dom = se.l2_sq[k] <= env + out.budget.l2_sq[k] ? 1 : 0;
    if (!dom) ++n_fail;
    out.envelope.push_back(env);
    out.dominated.push_back(dom);
    csv << csv_number(se.t[k]) << ',' << csv_number(se.l2_sq[k]) << ',' << csv_number(se.linf[k]) << ','
        << csv_number(se.osc[k]) << ',' << csv_number(se.H_tau[k]) << ',' << csv_number(se.D_tau[k]) << ','
        << csv_number(se.energy_residual[k]) << ',' << csv_number(env) << ',' << dom << '\n';
  }
  out.all_dominated = n_fail == 0;
  out.csv = csv.str();

  ojson j;
  j["spec"] = kSchemaVersion;
  j["id"] = s.id;
  j["grid"] = {{"Nx", g.nx()},
               {"Nv", g.nv()},
               {"X_max", g.x.cutoff},
               {"V_max", g.v.cutoff},
               {"total_weight", g.total_weight()},
               {"max_transport_dt", KfpSolver(g, s.gamma).max_transport_dt()}};
  j["h0"] = {{"kind", to_string(s.h0)}, {"l2_sq", out.h0_l2_sq}, {"Phi", out.phi0}};
  j["run"] = diagnostics_json(out.series);
  j["incomplete_windows"] = out.series.incomplete_windows;
  j["window_note"] = "H_tau, D_tau and energy_residual are dropped (nan) where [t, t + tau] runs past T";
  ojson lv = ojson::array();
  for (const auto& r : out.refined) lv.push_back(diagnostics_json(r));
  j["refined"] = lv;
  j["budget"] = opt.refine > 0 ? "3 x |coarse - refined| per sample" : "none (refine = 0)";
  j["domination"] = {{"passed", out.all_dominated}, {"violations", n_fail}};

  if (opt.mc) {
    McComparison mc;
    const McSettings ms = s.mc;
    mc.mc = estimate_observable_decay(m, s.gamma, s.h0, initial_mean(g, s.h0), ms);
    RunSettings rm = s.run;
    rm.tau = s.tau;
    rm.T = mc.mc.t.back();
    rm.stride = mc.mc.t.size() > 1 ? mc.mc.t[1] - mc.mc.t[0] : rm.T;
    const Pair pm = run_with_refinement(m, s, rm, std::max(0, opt.refine));
    std::ostringstream mcsv;
    mcsv << "t,c_mc,se_mc,c_pde,budget,agree\n";
    for (std::size_t k = 0; k < mc.mc.t.size(); ++k) {
      const double pde = pm.coarse.pairing.at(k);
      const double b = pm.budget.pairing.at(k);
      const int ok = std::abs(mc.mc.c[k] - pde) <= 3.0 * mc.mc.se[k] + b ? 1 : 0;
      mc.pde.push_back(pde);
      mc.budget.push_back(b);
      mc.agree.push_back(ok);
      mc.passed = mc.passed && ok;
      mcsv << csv_number(mc.mc.t[k]) << ',' << csv_number(mc.mc.c[k]) << ',' << csv_number(mc.mc.se[k]) << ','
           << csv_number(pde) << ',' << csv_number(b) << ',' << ok << '\n';
    }
    mc.csv = mcsv.str();
    j["mc"] = {{"particles", ms.particles}, {"dt", ms.dt},          {"seed", ms.seed},
               {"blocks", ms.blocks},       {"passed", mc.passed},  {"min_ess", mc.mc.min_ess},
               {"low_ess_warning", mc.mc.low_ess}, {"runtime_s", mc.mc.runtime_s}};
    out.mc = std::move(mc);
  }
  j["passed"] = out.passed();
  j["runtime_s"] = seconds_since(t0);
  out.json = std::move(j);
  return out;
}

// ---------------------------------------------------------------------------

ojson ReportRow::to_json() const {
  ojson j;
  j["spec"] = kSchemaVersion;
  j["id"] = id;
  j["symbolic_exponent"] = symbol;
  j["class"] = cls;
  j["certified_fitted_exponent"] = certified_fit;
  j["simulated_fitted_exponent"] = simulated_fit;
  j["domination"] = domination;
  j["weak_dissipation"] = dissipation;
  j["exponent_check"] = exponent;
  j["worst_weak_dissipation_margin"] = worst_margin;
  j["verdict"] = verdict;
  if (!reason.empty()) j["reason"] = reason;
  j["runtime_certify_s"] = runtime_certify;
  j["runtime_simulate_s"] = runtime_simulate;
  return j;
}

std::string ReportRow::csv_header() {
  return "id,symbolic_exponent,class,certified_fitted_exponent,simulated_fitted_exponent,domination,"
         "weak_dissipation,exponent_check,worst_margin,verdict,runtime_certify_s,runtime_simulate_s\n";
}

std::string ReportRow::csv_row() const {
  std::ostringstream os;
  os << id << ',' << symbol << ',' << cls << ',' << csv_number(certified_fit) << ',' << csv_number(simulated_fit)
     << ',' << domination << ',' << dissipation << ',' << exponent << ',' << csv_number(worst_margin) << ','
     << verdict << ',' << csv_number(runtime_certify) << ',' << csv_number(runtime_simulate) << '\n';
  return os.str();
}

ReportRow verify(const Scenario& s, const CommandOptions& opt) {
  ReportRow row;
  row.id = s.id;
  auto t0 = std::chrono::steady_clock::now();
  const Certification cert = certify(s);
  row.runtime_certify = seconds_since(t0);
  row.symbol = cert.symbol;
  row.cls = cert.cls.symbol();
  row.certified_fit = kNaN;
  row.simulated_fit = kNaN;
  row.worst_margin = kNaN;
  if (cert.certs.empty()) {
    row.verdict = "skipped-with-reason";
    row.reason = cert.skipped_reason;
    return row;
  }
  const RateCertificate& primary = cert.certs.front();
  row.certified_fit = fit_exponent(primary).exponent;

  CommandOptions o = opt;
  o.refine = std::max(1, opt.refine);
  t0 = std::chrono::steady_clock::now();
  const Simulation sim = simulate(cert, o);
  row.runtime_simulate = seconds_since(t0);
  row.domination = sim.all_dominated ? "pass" : "fail";

  const double T = s.run.T;
  const bool stretched = cert.cls.stretched();
  const double lo = s.fit.t_lo.value_or(stretched ? 5.0 : 10.0);
  const double hi = s.fit.t_hi.value_or(stretched ? std::min(50.0, T) : T);
  const double r = cert.cls.r;
  if (cert.cls.kind == ExponentClass::Kind::Exponential) {
    row.exponent = "skipped";
  } else if (stretched) {
    row.simulated_fit = fit_stretched(sim.series, lo, hi);
    row.exponent = row.simulated_fit >= 0.7 * r && row.simulated_fit <= 1.1 ? "pass" : "fail";
  } else {
    row.simulated_fit = -fit_log_slope(sim.series, lo, hi);
    row.exponent = row.simulated_fit >= r - 0.3 ? "pass" : "fail";
  }
  if (const RateCertificate* w = cert.weak()) {
    const DissipationAudit a = weak_dissipation_check(sim.series, sim.budget, *w->kinetic->beta, sim.phi0);
    row.dissipation = a.passed() ? "pass" : "fail";
    row.worst_margin = a.worst_margin;
  }
  const bool mc_fail = sim.mc && !sim.mc->passed;
  const bool fail = row.domination == "fail" || row.dissipation == "fail" || row.exponent == "fail" || mc_fail;
  row.verdict = fail ? "fail" : "pass";
  if (mc_fail) row.reason = "PDE and ensemble autocovariances disagree";
  return row;
}

// ---------------------------------------------------------------------------

std::string tabulate_csv() {
  struct Axis {
    std::string label, param;
    ProfileKind kind;
    double value;
  };
  const Axis rows[] = {{"subexp(alpha>=1)", "alpha=2", ProfileKind::SubExp, 2.0},
                       {"subexp(alpha<1)", "alpha=0.5", ProfileKind::SubExp, 0.5},
                       {"log(p)", "p=2", ProfileKind::Log, 2.0}};
  const Axis cols[] = {{"subexp(delta>=1)", "delta=2", ProfileKind::SubExp, 2.0},
                       {"subexp(delta<1)", "delta=0.5", ProfileKind::SubExp, 0.5},
                       {"log(q)", "q=2", ProfileKind::Log, 2.0}};
  std::ostringstream os;
  os << "potential,kinetic,symbolic_exponent,class,r,fitted_exponent,note\n";
  QuadratureCfg cfg;
  for (const auto& a : rows)
    for (const auto& b : cols) {
      const ExponentClass c = table1_exponent(a.kind, a.value, b.kind, b.value);
      std::string note = a.param + " " + b.param;
      double fitted = kNaN;
      ModelSpec spec;
      spec.potential = a.kind;
      spec.potential_param = a.value;
      spec.kinetic = b.kind;
      spec.kinetic_param = b.value;
      if (c.kind == ExponentClass::Kind::Exponential) {
        note += "; rate constant not certified";
      } else {
        const Model m = make_benchmark(spec, cfg);
        if (m.strongly_confined()) {
          fitted = fit_exponent(certify_appendix_a(m, 1.0, 1.0, 0.25, 1.0, cfg)).exponent;
          note += "; Poincare-Lions route with C_PL=1 (shape only)";
        } else {
          fitted = fit_exponent(certify_weak(m, 1.0, 1.0, 0.25, cfg)).exponent;
        }
        if (c.kind == ExponentClass::Kind::AlgebraicMinus) note += "; eps-loss class";
      }
      os << a.label << ',' << b.label << ',' << table1_symbol(a.kind, a.value, b.kind, b.value) << ','
         << c.kind_name() << ',' << (c.kind == ExponentClass::Kind::Exponential ? std::string("") : csv_number(c.r))
         << ',' << (std::isnan(fitted) ? std::string("") : csv_number(fitted)) << ',' << note << '\n';
    }
  return os.str();
}

ChainDemo chain_demo(double p, double q) {
  QuadratureCfg cfg;
  ModelSpec spec;
  spec.potential = ProfileKind::Log;
  spec.potential_param = p;
  spec.kinetic = ProfileKind::Log;
  spec.kinetic_param = q;
  const Model m = make_benchmark(spec, cfg);
  const SpatialConstants sp = compute_spatial_constants(m, 1.0);
  const AveragingConstants avg =
      compute_averaging_constants(sp, compute_velocity_moments(m, cfg), m.potential.L, m.weight.theta);
  const KineticBeta kb = beta_kin(m, sp, avg, 1.0, cfg);
  if (!kb.chain) throw std::runtime_error("expected the chained kinetic route");
  std::vector<double> x, y;
  ojson table = ojson::array();
  for (double ls = 0.0; ls <= 100.0; ls += 2.0) {
    const double lb = kb.chain->log_eval(ls);
    table.push_back({ls, lb});
    if (ls >= 60.0 && ls <= 100.0) {
      x.push_back(ls);
      y.push_back(lb);
    }
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const RateCertificate cert = certify_thm3(kb, 0.25, 1.0, table1_exponent(ProfileKind::Log, p, ProfileKind::Log, q));
  ojson j;
  j["spec"] = kSchemaVersion;
  j["p"] = p;
  j["q"] = q;
  j["beta_x"] = kb.chain->beta_x()->describe();
  j["beta_v"] = kb.chain->beta_v()->describe();
  j["c"] = kb.c;
  j["C_bar"] = kb.C_bar;
  j["M"] = kb.M;
  j["M_resolved"] = kb.M_resolved;
  j["chain_slope"] = sxy / sxx;
  j["chain_slope_window_log_s"] = {60.0, 100.0};
  j["expected_slope"] = -p * q / (4.0 + 2.0 * p + 2.0 * q);
  j["envelope_fitted_exponent"] = fit_exponent(cert).exponent;
  j["log_chain"] = table;

  ChainDemo out;
  out.summary = std::move(j);
  std::ostringstream b, k, f;
  b << "s,beta_x,beta_v,beta_chained\n";
  const auto& ch = *kb.chain;
  for (double ls = -5.0; ls <= 100.0; ls += 0.5) {
    const double sv = std::exp(ls);
    b << csv_number(sv) << ',' << csv_number(std::exp(ch.beta_x()->log_eval(ls))) << ','
      << csv_number(std::exp(ch.beta_v()->log_eval(ls))) << ',' << csv_number(std::exp(ch.log_eval(ls))) << '\n';
  }
  k << "w,kstar\n";
  const KStar& ks = cert.rate->kstar();
  for (std::size_t i = 0; i < ks.log_w.size(); ++i)
    k << csv_number(std::exp(ks.log_w[i])) << ',' << csv_number(std::exp(ks.log_k[i])) << '\n';
  f << "t,F_inv\n";
  f << csv_number(0.0) << ',' << csv_number(cert.rate->inverse(0.0)) << '\n';
  for (int e = -8; e <= 120; ++e) {
    const double t = std::pow(10.0, 0.25 * e);
    f << csv_number(t) << ',' << csv_number(std::exp(cert.rate->log_inverse(t))) << '\n';
  }
  out.beta_csv = b.str();
  out.kstar_csv = k.str();
  out.finv_csv = f.str();
  return out;
}

}  // namespace hypo
