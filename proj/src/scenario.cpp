#include "hypocert/scenario.hpp"

#include "hypocert/rates.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hypo {

ProfileKind profile_kind_from_string(const std::string& s) {
  for (auto k : {ProfileKind::SubExp, ProfileKind::Log, ProfileKind::Gaussian})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown profile kind '" + s + "' (expected subexp, log or gaussian)");
}

namespace {

std::string beta_kind_name(BetaSpec::Kind k) { return k == BetaSpec::Kind::Poly ? "poly" : "stretched_exp"; }

BetaSpec::Kind beta_kind_from_string(const std::string& s) {
  if (s == "poly") return BetaSpec::Kind::Poly;
  if (s == "stretched_exp") return BetaSpec::Kind::StretchedExp;
  throw std::invalid_argument("unknown beta kind '" + s + "'");
}

template <class T>
void put_opt(ojson& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get_opt(const ojson& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

template <class T>
void get_to(const ojson& j, const char* key, T& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

void reject_unknown(const ojson& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, _] : j.items()) {
    bool known = false;
    for (const char* s : keys) known = known || k == s;
    if (!known) throw std::invalid_argument("unknown key '" + k + "' in " + where);
  }
}

}  // namespace

ojson to_json(const Scenario& s) {
  ojson j;
  j["spec"] = kSchemaVersion;
  j["id"] = s.id;
  ojson m;
  m["potential"] = {{"kind", to_string(s.model.potential)}, {"param", s.model.potential_param}};
  m["kinetic"] = {{"kind", to_string(s.model.kinetic)}, {"param", s.model.kinetic_param}};
  m["d"] = s.model.d;
  put_opt(m, "sigma", s.model.sigma);
  put_opt(m, "theta_W", s.model.theta_W);
  put_opt(m, "P_W", s.model.P_W);
  put_opt(m, "C_P", s.model.C_P);
  put_opt(m, "P_G", s.model.P_G);
  put_opt(m, "delta_w", s.model.delta_w);
  if (s.model.beta_v) {
    const auto& b = *s.model.beta_v;
    m["beta_v"] = {{"kind", beta_kind_name(b.kind)}, {"eta0", b.eta0}, {"eta1", b.eta1}, {"eta2", b.eta2}};
  }
  j["model"] = m;
  j["gamma"] = s.gamma;
  j["tau"] = s.tau;
  j["a"] = s.a;
  j["regime"] = s.regime;
  put_opt(j, "C_PL", s.C_PL);
  j["h0"] = to_string(s.h0);
  j["solver"] = {{"Nx", s.grid.Nx},      {"Nv", s.grid.Nv},         {"X_max", s.grid.X_max}, {"V_max", s.grid.V_max},
                 {"core", s.grid.core},  {"dt", s.run.dt},          {"T", s.run.T},          {"stride", s.run.stride}};
  j["mc"] = {{"particles", s.mc.particles}, {"dt", s.mc.dt},         {"T", s.mc.T},
             {"stride", s.mc.stride},       {"burn_in", s.mc.burn_in}, {"blocks", s.mc.blocks},
             {"seed", s.mc.seed},           {"min_ess", s.mc.min_ess}};
  ojson f = ojson::object();
  put_opt(f, "t_lo", s.fit.t_lo);
  put_opt(f, "t_hi", s.fit.t_hi);
  j["fit"] = f;
  return j;
}

Scenario scenario_from_json(const ojson& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  reject_unknown(j, {"spec", "id", "model", "gamma", "tau", "a", "regime", "C_PL", "h0", "solver", "mc", "fit"},
                 "scenario");
  if (j.contains("spec") && j.at("spec").get<int>() != kSchemaVersion)
    throw std::invalid_argument("unsupported scenario schema version");
  Scenario s;
  get_to(j, "id", s.id);
  if (!j.contains("model")) throw std::invalid_argument("scenario needs a model");
  const ojson& m = j.at("model");
  reject_unknown(m, {"potential", "kinetic", "d", "sigma", "theta_W", "P_W", "C_P", "P_G", "delta_w", "beta_v"}, "model");
  if (!m.contains("potential") || !m.contains("kinetic")) throw std::invalid_argument("model needs potential and kinetic");
  s.model.potential = profile_kind_from_string(m.at("potential").at("kind").get<std::string>());
  s.model.potential_param = m.at("potential").value("param", 0.0);
  s.model.kinetic = profile_kind_from_string(m.at("kinetic").at("kind").get<std::string>());
  s.model.kinetic_param = m.at("kinetic").value("param", 0.0);
  get_to(m, "d", s.model.d);
  get_opt(m, "sigma", s.model.sigma);
  get_opt(m, "theta_W", s.model.theta_W);
  get_opt(m, "P_W", s.model.P_W);
  get_opt(m, "C_P", s.model.C_P);
  get_opt(m, "P_G", s.model.P_G);
  get_opt(m, "delta_w", s.model.delta_w);
  if (m.contains("beta_v")) {
    const ojson& b = m.at("beta_v");
    BetaSpec bs;
    bs.kind = beta_kind_from_string(b.at("kind").get<std::string>());
    get_to(b, "eta0", bs.eta0);
    get_to(b, "eta1", bs.eta1);
    get_to(b, "eta2", bs.eta2);
    s.model.beta_v = bs;
  }
  get_to(j, "gamma", s.gamma);
  get_to(j, "tau", s.tau);
  get_to(j, "a", s.a);
  get_to(j, "regime", s.regime);
  if (s.regime != "auto") regime_from_string(s.regime);
  get_opt(j, "C_PL", s.C_PL);
  if (j.contains("h0")) s.h0 = initial_kind_from_string(j.at("h0").get<std::string>());
  if (j.contains("solver")) {
    const ojson& v = j.at("solver");
    reject_unknown(v, {"Nx", "Nv", "X_max", "V_max", "core", "dt", "T", "stride"}, "solver");
    get_to(v, "Nx", s.grid.Nx);
    get_to(v, "Nv", s.grid.Nv);
    get_to(v, "X_max", s.grid.X_max);
    get_to(v, "V_max", s.grid.V_max);
    get_to(v, "core", s.grid.core);
    get_to(v, "dt", s.run.dt);
    get_to(v, "T", s.run.T);
    get_to(v, "stride", s.run.stride);
  }
  if (j.contains("mc")) {
    const ojson& v = j.at("mc");
    reject_unknown(v, {"particles", "dt", "T", "stride", "burn_in", "blocks", "seed", "min_ess"}, "mc");
    get_to(v, "particles", s.mc.particles);
    get_to(v, "dt", s.mc.dt);
    get_to(v, "T", s.mc.T);
    get_to(v, "stride", s.mc.stride);
    get_to(v, "burn_in", s.mc.burn_in);
    get_to(v, "blocks", s.mc.blocks);
    get_to(v, "seed", s.mc.seed);
    get_to(v, "min_ess", s.mc.min_ess);
  }
  if (j.contains("fit")) {
    get_opt(j.at("fit"), "t_lo", s.fit.t_lo);
    get_opt(j.at("fit"), "t_hi", s.fit.t_hi);
  }
  if (!(s.gamma > 0.0) || !(s.tau > 0.0)) throw std::invalid_argument("gamma and tau must be positive");
  if (!(s.a > 0.0) || !(s.a <= 0.25)) throw std::invalid_argument("a must lie in (0, 1/4]");
  s.run.tau = s.tau;
  return s;
}

std::string emit_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

Scenario parse_scenario(const std::string& text) { return scenario_from_json(ojson::parse(text)); }

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace hypo
