#include <algorithm>
#include <cmath>
#include <set>

#include "hics/hibench.hpp"

namespace hics {

using nlohmann::json;

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::gaussian_hisparse:
      return "gaussian_hisparse";
    case ScenarioKind::kronecker_channel:
      return "kronecker_channel";
    case ScenarioKind::blind_deconv:
      return "blind_deconv";
    case ScenarioKind::demix_lowrank:
      return "demix_lowrank";
  }
  return "unknown";
}

const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::hiiht:
      return "hiiht";
    case SolverKind::hihtp:
      return "hihtp";
    case SolverKind::iht:
      return "iht";
    case SolverKind::htp:
      return "htp";
    case SolverKind::sdt:
      return "sdt";
    case SolverKind::dt:
      return "dt";
    case SolverKind::informed_dt:
      return "informed_dt";
  }
  return "unknown";
}

ScenarioKind parse_scenario(const std::string& name) {
  for (auto k : {ScenarioKind::gaussian_hisparse, ScenarioKind::kronecker_channel, ScenarioKind::blind_deconv,
                 ScenarioKind::demix_lowrank}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ParameterError("unknown scenario '" + name + "'");
}

SolverKind parse_solver(const std::string& name) {
  for (auto k : {SolverKind::hiiht, SolverKind::hihtp, SolverKind::iht, SolverKind::htp, SolverKind::sdt,
                 SolverKind::dt, SolverKind::informed_dt}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ParameterError("unknown solver '" + name + "'");
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"N",   "n",     "m", "M_sub", "m_sub", "E",      "N_d",
                                              "s",   "sigma", "r", "mu",    "L",     "snr_db", "subsampling_factor"};
  return names;
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ParameterError(message);
  }
}

std::string bound(const char* name, Index value, const char* lo_name, Index lo, const char* hi_name, Index hi) {
  return std::string(name) + "=" + std::to_string(value) + " outside [" + lo_name + "=" + std::to_string(lo) + ", " +
         hi_name + "=" + std::to_string(hi) + "]";
}

void check_range(const char* name, Index value, Index lo, const char* hi_name, Index hi) {
  require(value >= lo && value <= hi, bound(name, value, "min", lo, hi_name, hi));
}

void check_positive(const char* name, Index value) {
  require(value >= 1, std::string(name) + "=" + std::to_string(value) + " must be >= 1");
}

bool is_vector_solver(SolverKind k) {
  return k == SolverKind::hiiht || k == SolverKind::hihtp || k == SolverKind::iht || k == SolverKind::htp;
}

void validate_point(const ExperimentSpec& e) {
  switch (e.scenario) {
    case ScenarioKind::gaussian_hisparse:
      check_positive("N", e.N);
      check_positive("n", e.n);
      check_positive("m", e.m);
      check_range("s", e.s, 0, "N", e.N);
      check_range("sigma", e.sigma, 0, "n", e.n);
      break;
    case ScenarioKind::kronecker_channel:
      check_positive("N", e.N);
      check_positive("n", e.n);
      check_range("M_sub", e.M_sub, 1, "N", e.N);
      check_range("m_sub", e.m_sub, 1, "n", e.n);
      check_range("L", e.L, 1, "N", e.N);
      require(e.field == Field::complex, "kronecker_channel requires field 'complex'");
      break;
    case ScenarioKind::blind_deconv:
      check_positive("N", e.N);
      check_positive("E", e.E);
      check_positive("N_d", e.N_d);
      check_range("mu", e.mu, 0, "N_d", e.N_d);
      check_range("s", e.s, 0, "E", e.E);
      check_range("sigma", e.sigma, 0, "N", e.N);
      require(e.field == Field::real, "blind_deconv requires field 'real'");
      break;
    case ScenarioKind::demix_lowrank:
      check_positive("N", e.N);
      check_positive("n", e.n);
      check_positive("m", e.m);
      check_range("s", e.s, 0, "N", e.N);
      check_range("r", e.r, 1, "n", e.n);
      break;
  }
  if (e.scenario == ScenarioKind::demix_lowrank) {
    require(!is_vector_solver(e.solver),
            std::string("solver '") + to_string(e.solver) + "' does not apply to demix_lowrank (use sdt, dt or informed_dt)");
  } else {
    require(is_vector_solver(e.solver), std::string("solver '") + to_string(e.solver) + "' does not apply to " +
                                            to_string(e.scenario) + " (use hiiht, hihtp, iht or htp)");
  }
  if (e.snr_db) {
    require(!std::isnan(*e.snr_db), "snr_db must be a number");
  }
}

Index as_index(const std::string& name, double value) {
  const double r = std::round(value);
  require(std::abs(value - r) < 1e-9, "sweep value " + std::to_string(value) + " for '" + name + "' is not an integer");
  return static_cast<Index>(r);
}

}  // namespace

void ExperimentSpec::validate() const {
  require(trials >= 1, "trials=" + std::to_string(trials) + " must be >= 1");
  solver_config.validate();
  if (success_threshold) {
    require(*success_threshold > 0.0, "success_threshold must be positive");
  }
  if (!sweep_param.empty()) {
    const auto& names = sweep_parameters();
    require(std::find(names.begin(), names.end(), sweep_param) != names.end(),
            "unknown sweep parameter '" + sweep_param + "'");
    require(!grid.empty(), "sweep grid for '" + sweep_param + "' is empty");
  } else {
    require(grid.empty(), "sweep values given without a sweep parameter");
  }
  for (double v : points()) {
    validate_point(at(v));
  }
}

std::vector<double> ExperimentSpec::points() const {
  if (sweep_param.empty()) {
    return {0.0};
  }
  return grid;
}

ExperimentSpec ExperimentSpec::at(double value) const {
  ExperimentSpec e = *this;
  const std::string& p = sweep_param;
  if (p.empty()) {
    return e;
  }
  if (p == "snr_db") {
    e.snr_db = value;
  } else if (p == "subsampling_factor") {
    require(value > 0.0 && value <= 1.0, "subsampling_factor must lie in (0, 1]");
    e.M_sub = std::max<Index>(1, static_cast<Index>(std::llround(value * static_cast<double>(e.N))));
  } else {
    const Index v = as_index(p, value);
    if (p == "N") e.N = v;
    else if (p == "n") e.n = v;
    else if (p == "m") e.m = v;
    else if (p == "M_sub") e.M_sub = v;
    else if (p == "m_sub") e.m_sub = v;
    else if (p == "E") e.E = v;
    else if (p == "N_d") e.N_d = v;
    else if (p == "s") e.s = v;
    else if (p == "sigma") e.sigma = v;
    else if (p == "r") e.r = v;
    else if (p == "mu") e.mu = v;
    else if (p == "L") e.L = v;
    else throw ParameterError("unknown sweep parameter '" + p + "'");
  }
  return e;
}

double ExperimentSpec::threshold() const {
  if (success_threshold) {
    return *success_threshold;
  }
  return scenario == ScenarioKind::demix_lowrank ? 1e-3 : 1e-5;
}

// --- JSON ----------------------------------------------------------------------

json spec_to_json(const ExperimentSpec& e) {
  const auto& c = e.solver_config;
  json j{{"scenario", to_string(e.scenario)},
         {"field", to_string(e.field)},
         {"N", e.N},
         {"n", e.n},
         {"m", e.m},
         {"M_sub", e.M_sub},
         {"m_sub", e.m_sub},
         {"E", e.E},
         {"N_d", e.N_d},
         {"s", e.s},
         {"sigma", e.sigma},
         {"r", e.r},
         {"mu", e.mu},
         {"L", e.L},
         {"solver", to_string(e.solver)},
         {"solver_config",
          {{"max_iters", c.max_iters},
           {"residual_tol", c.residual_tol},
           {"step", c.step.kind == StepPolicy::Kind::constant ? "constant" : "adaptive"},
           {"tau", c.step.tau},
           {"ls_tol", c.ls_tol},
           {"ls_max_iters", c.ls_max_iters},
           {"record_trace", c.record_trace}}},
         {"noise", e.snr_db ? json{{"snr_db", *e.snr_db}} : json("none")},
         {"trials", e.trials},
         {"master_seed", e.master_seed}};
  if (!e.sweep_param.empty()) {
    j["sweep"] = {{"param", e.sweep_param}, {"values", e.grid}};
  }
  if (e.success_threshold) {
    j["success_threshold"] = *e.success_threshold;
  }
  return j;
}

namespace {

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ParameterError("key '" + key + "' has the wrong type: " + j.dump());
  }
}

Index get_index(const json& j, const std::string& key) {
  if (!j.is_number_integer()) {
    throw ParameterError("key '" + key + "' must be an integer, got " + j.dump());
  }
  return j.get<Index>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) {
    throw ParameterError((prefix.empty() ? std::string("experiment") : prefix) + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ParameterError("unknown key '" + prefix + key + "'");
    }
  }
}

SolverConfig solver_config_from_json(const json& j) {
  reject_unknown(j, {"max_iters", "residual_tol", "step", "tau", "ls_tol", "ls_max_iters", "record_trace"},
                 "solver_config.");
  SolverConfig c;
  if (j.contains("max_iters")) c.max_iters = get_index(j["max_iters"], "solver_config.max_iters");
  if (j.contains("residual_tol")) c.residual_tol = get_as<double>(j["residual_tol"], "solver_config.residual_tol");
  if (j.contains("tau")) c.step.tau = get_as<double>(j["tau"], "solver_config.tau");
  if (j.contains("step")) {
    const auto kind = get_as<std::string>(j["step"], "solver_config.step");
    if (kind == "constant") {
      c.step.kind = StepPolicy::Kind::constant;
    } else if (kind == "adaptive") {
      c.step.kind = StepPolicy::Kind::adaptive;
    } else {
      throw ParameterError("solver_config.step must be 'constant' or 'adaptive', got '" + kind + "'");
    }
  }
  if (j.contains("ls_tol")) c.ls_tol = get_as<double>(j["ls_tol"], "solver_config.ls_tol");
  if (j.contains("ls_max_iters")) c.ls_max_iters = get_index(j["ls_max_iters"], "solver_config.ls_max_iters");
  if (j.contains("record_trace")) c.record_trace = get_as<bool>(j["record_trace"], "solver_config.record_trace");
  return c;
}

}  // namespace

ExperimentSpec spec_from_json(const json& j) {
  reject_unknown(j,
                 {"scenario", "field", "N", "n", "m", "M_sub", "m_sub", "E", "N_d", "s", "sigma", "r", "mu", "L",
                  "solver", "solver_config", "noise", "trials", "master_seed", "sweep", "success_threshold"},
                 "");
  ExperimentSpec e;
  if (!j.contains("scenario")) {
    throw ParameterError("missing key 'scenario'");
  }
  e.scenario = parse_scenario(get_as<std::string>(j["scenario"], "scenario"));
  // Scenario-dependent defaults: the channel lives in the complex field.
  e.field = e.scenario == ScenarioKind::kronecker_channel ? Field::complex : Field::real;
  e.solver = e.scenario == ScenarioKind::demix_lowrank ? SolverKind::sdt : SolverKind::hihtp;
  if (j.contains("field")) {
    const auto f = get_as<std::string>(j["field"], "field");
    if (f == "real") {
      e.field = Field::real;
    } else if (f == "complex") {
      e.field = Field::complex;
    } else {
      throw ParameterError("field must be 'real' or 'complex', got '" + f + "'");
    }
  }
  const std::pair<const char*, Index*> dims[] = {{"N", &e.N},   {"n", &e.n},         {"m", &e.m},   {"M_sub", &e.M_sub},
                                                 {"m_sub", &e.m_sub}, {"E", &e.E}, {"N_d", &e.N_d}, {"s", &e.s},
                                                 {"sigma", &e.sigma}, {"r", &e.r}, {"mu", &e.mu},   {"L", &e.L}};
  for (const auto& [key, dst] : dims) {
    if (j.contains(key)) {
      *dst = get_index(j[key], key);
    }
  }
  if (j.contains("solver")) e.solver = parse_solver(get_as<std::string>(j["solver"], "solver"));
  if (j.contains("solver_config")) e.solver_config = solver_config_from_json(j["solver_config"]);
  if (j.contains("noise")) {
    const auto& nz = j["noise"];
    if (nz.is_null() || (nz.is_string() && nz.get<std::string>() == "none")) {
      e.snr_db.reset();
    } else if (nz.is_object()) {
      reject_unknown(nz, {"snr_db"}, "noise.");
      if (!nz.contains("snr_db")) {
        throw ParameterError("noise object needs 'snr_db'");
      }
      e.snr_db = get_as<double>(nz["snr_db"], "noise.snr_db");
    } else {
      throw ParameterError("noise must be \"none\" or {\"snr_db\": value}");
    }
  }
  if (j.contains("trials")) e.trials = get_index(j["trials"], "trials");
  if (j.contains("master_seed")) {
    const auto& s = j["master_seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ParameterError("master_seed must be a non-negative integer");
    }
    e.master_seed = s.get<std::uint64_t>();
  }
  if (j.contains("sweep")) {
    const auto& sw = j["sweep"];
    reject_unknown(sw, {"param", "values"}, "sweep.");
    if (sw.contains("param")) e.sweep_param = get_as<std::string>(sw["param"], "sweep.param");
    if (sw.contains("values")) e.grid = get_as<std::vector<double>>(sw["values"], "sweep.values");
  }
  if (j.contains("success_threshold")) e.success_threshold = get_as<double>(j["success_threshold"], "success_threshold");
  e.validate();
  return e;
}

}  // namespace hics
