#pragma once

#include "hypocert/model.hpp"
#include "hypocert/sde.hpp"
#include "hypocert/solver.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace hypo {

using ojson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

ProfileKind profile_kind_from_string(const std::string& s);

struct FitWindow {
  std::optional<double> t_lo, t_hi;  // defaults depend on the exponent class
};

struct Scenario {
  std::string id = "scenario";
  ModelSpec model;
  double gamma = 1.0;
  double tau = 1.0;
  double a = 0.25;
  std::string regime = "auto";  // or a Regime name
  std::optional<double> C_PL;
  InitialKind h0 = InitialKind::TanhX;
  GridSettings grid;
  RunSettings run;  // run.tau is ignored in favour of tau
  McSettings mc;
  FitWindow fit;
};

// Canonical form: every field in a fixed order, optional fields only when set.
ojson to_json(const Scenario& s);
Scenario scenario_from_json(const ojson& j);

// Canonical text; parse(emit(s)) emits the same bytes.
std::string emit_scenario(const Scenario& s);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace hypo
