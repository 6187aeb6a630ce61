#include "hypocert/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace hypo;

namespace {

// Writes next to the other outputs; with no --out, text goes to stdout.
void emit(const CommandOptions& opt, const std::string& name, const std::string& text) {
  if (opt.out_dir.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(opt.out_dir);
  std::ofstream f(fs::path(opt.out_dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + name);
  f << text;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

Scenario load(const std::string& path, const CommandOptions& opt) {
  if (path.empty()) throw std::invalid_argument("--scenario is required");
  return apply_overrides(load_scenario(path), opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified decay envelopes and kinetic Fokker-Planck simulations"};
  app.require_subcommand(1);

  CommandOptions opt;
  std::string scenario;
  std::uint64_t seed = 0;
  double tau = 0.0;
  double p = 2.0, q = 2.0;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--scenario", scenario, "scenario JSON file");
    sc->add_option("--out", opt.out_dir, "output directory (default: stdout)");
    sc->add_option("--seed", seed, "Monte Carlo seed override");
    sc->add_option("--refine", opt.refine, "Richardson refinement levels")->check(CLI::Range(0, 3));
    sc->add_flag("--mc", opt.mc, "run the particle cross-check");
    sc->add_option("--tau", tau, "window length override");
  };
  auto* certify_cmd = app.add_subcommand("certify", "constants and certified envelope as JSON");
  auto* simulate_cmd = app.add_subcommand("simulate", "decay series CSV and run summary");
  auto* verify_cmd = app.add_subcommand("verify", "certificate against simulation, one report row");
  auto* tabulate_cmd = app.add_subcommand("tabulate", "3x3 rate table as CSV");
  auto* chain_cmd = app.add_subcommand("chain-demo", "chained beta for the (Log p, Log q) cell");
  for (auto* sc : {certify_cmd, simulate_cmd, verify_cmd}) common(sc);
  chain_cmd->add_option("--out", opt.out_dir, "output directory (default: stdout)");
  chain_cmd->add_option("-p", p, "potential exponent")->check(CLI::PositiveNumber);
  chain_cmd->add_option("-q", q, "kinetic exponent")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  for (auto* sc : {certify_cmd, simulate_cmd, verify_cmd}) {
    if (sc->count("--seed")) opt.seed = seed;
    if (sc->count("--tau")) opt.tau = tau;
  }

  try {
    if (*certify_cmd) {
      const Scenario s = load(scenario, opt);
      emit(opt, s.id + ".certificate.json", dump(certify(s).json));
      return 0;
    }
    if (*simulate_cmd) {
      const Scenario s = load(scenario, opt);
      const Simulation sim = simulate(certify(s), opt);
      emit(opt, s.id + ".series.csv", sim.csv);
      if (!opt.out_dir.empty()) {
        emit(opt, s.id + ".simulate.json", dump(sim.json));
        if (sim.mc) emit(opt, s.id + ".mc.csv", sim.mc->csv);
      }
      return sim.passed() ? 0 : 1;
    }
    if (*verify_cmd) {
      const Scenario s = load(scenario, opt);
      const ReportRow row = verify(s, opt);
      if (opt.out_dir.empty()) {
        std::cout << dump(row.to_json());
      } else {
        emit(opt, s.id + ".report.json", dump(row.to_json()));
        emit(opt, s.id + ".report.csv", ReportRow::csv_header() + row.csv_row());
      }
      return row.verdict == "fail" ? 1 : 0;
    }
    if (*tabulate_cmd) {
      emit(opt, "table1.csv", tabulate_csv());
      return 0;
    }
    if (*chain_cmd) {
      const ChainDemo d = chain_demo(p, q);
      if (opt.out_dir.empty()) {
        std::cout << d.beta_csv << "\n" << d.kstar_csv << "\n" << d.finv_csv;
      } else {
        emit(opt, "chain.json", dump(d.summary));
        emit(opt, "chain_beta.csv", d.beta_csv);
        emit(opt, "chain_kstar.csv", d.kstar_csv);
        emit(opt, "chain_finv.csv", d.finv_csv);
      }
      return 0;
    }
  } catch (const AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n" << dump(e.report);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
