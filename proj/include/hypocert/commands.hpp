#pragma once

#include "hypocert/rates.hpp"
#include "hypocert/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hypo {

struct CommandOptions {
  std::string out_dir;  // empty: do not write files
  std::optional<std::uint64_t> seed;
  int refine = 1;  // Richardson levels; 0 disables the discretization budget
  bool mc = false;
  std::optional<double> tau;
};

// Scenario with the command-line overrides applied.
Scenario apply_overrides(Scenario s, const CommandOptions& opt);

// Raised when the model fails its assumption checks; carries the report.
class AssumptionError : public std::runtime_error {
 public:
  AssumptionError(const std::string& what, ojson report) : std::runtime_error(what), report(std::move(report)) {}
  ojson report;
};

struct Certification {
  Scenario scenario;
  Model model;
  ExponentClass cls;
  std::string symbol;
  std::vector<RateCertificate> certs;  // primary first; empty when out of scope
  std::string skipped_reason;
  double h0_l2_sq = 0.0;  // ||h0||^2 by quadrature
  double h0_inf = 0.0;
  double phi0 = 0.0;  // oscillation^2 of h0
  ojson json;

  const RateCertificate* weak() const;  // the weak-dissipation (Phi-normalized) certificate, if any
  // min over certificates of normalizer * envelope(t); +inf without certificates.
  double l2_bound(double t, double l2_sq0, double phi) const;
};

Certification certify(const Scenario& s);

struct McComparison {
  McSeries mc;
  std::vector<double> pde, budget;
  std::vector<int> agree;
  bool passed = true;
  std::string csv;
};

struct Simulation {
  DecaySeries series;
  std::vector<DecaySeries> refined;
  Budget budget;
  std::vector<double> envelope;
  std::vector<int> dominated;
  bool all_dominated = true;
  double phi0 = 0.0;
  double h0_l2_sq = 0.0;
  double dt_ratio_check = 0.0;
  std::optional<McComparison> mc;
  std::string csv;  // t, l2_sq, linf, osc, H_tau, D_tau, energy_residual, envelope, dominated
  ojson json;
  bool passed() const { return all_dominated && (!mc || mc->passed); }
};

Simulation simulate(const Certification& cert, const CommandOptions& opt);

struct ReportRow {
  std::string id;
  std::string symbol;
  std::string cls;
  double certified_fit = 0.0;
  double simulated_fit = 0.0;
  std::string domination = "skipped";
  std::string dissipation = "skipped";
  std::string exponent = "skipped";
  std::string verdict = "pass";  // pass, fail or skipped-with-reason
  std::string reason;
  double worst_margin = 0.0;
  double runtime_certify = 0.0;
  double runtime_simulate = 0.0;

  ojson to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

ReportRow verify(const Scenario& s, const CommandOptions& opt);

// Nine rows: potential class, kinetic class, symbolic rate, kind, r, fitted exponent, note.
std::string tabulate_csv();

// Chained kinetic beta of the (Log p, Log q) benchmark with its fitted slope.
struct ChainDemo {
  ojson summary;
  std::string beta_csv;   // s, beta_x, beta_v, beta_chained
  std::string kstar_csv;  // w, kstar
  std::string finv_csv;   // t, F_inv
};
ChainDemo chain_demo(double p, double q);

// CSV number formatting shared by the writers.
std::string csv_number(double x);

}  // namespace hypo
