#include <filesystem>
#include <iostream>
#include <set>

#include "hics/hibench.hpp"
#include "hics/hicli.hpp"
#include "hics/operator_io.hpp"
#include "hics/rip.hpp"

namespace hics {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) {
    throw ParameterError("'" + prefix + "' must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ParameterError("unknown key '" + prefix + "." + key + "'");
    }
  }
}

const json& section(const json& config, const std::string& name) {
  if (!config.contains(name)) {
    throw ParameterError("missing section '" + name + "'");
  }
  return config.at(name);
}

Index get_index(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) {
    throw ParameterError("missing key '" + where + "." + key + "'");
  }
  if (!j[key].is_number_integer()) {
    throw ParameterError("key '" + where + "." + key + "' must be an integer");
  }
  return j[key].get<Index>();
}

void prepare_output(const fs::path& out) { fs::create_directories(out); }

void report_warnings(const json& result, std::ostream& log) {
  if (result.contains("warnings")) {
    for (const auto& w : result["warnings"]) {
      log << "WARN: " << w.get<std::string>() << '\n';
    }
  }
}

// Runs `parse` then `execute`, mapping exceptions to exit codes.
// Bad parameters found while executing are still config errors.
template <typename Parse, typename Execute>
int guarded(std::ostream& log, const char* where, Parse&& parse, Execute&& execute) {
  try {
    parse();
  } catch (const std::exception& e) {
    log << "ERROR: config: [" << where << "] " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    return execute();
  } catch (const BudgetError& e) {
    log << "ERROR: " << e.what() << '\n';
    return kExitBudgetExceeded;
  } catch (const std::invalid_argument& e) {
    log << "ERROR: config: [" << where << "] " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    log << "ERROR: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace

int cmd_run(const json& config, const fs::path& out, std::ostream& log) {
  ExperimentSpec spec;
  return guarded(
      log, "experiment", [&] { spec = spec_from_json(section(config, "experiment")); },
      [&] {
        const double point = spec.points().front();
        const std::uint64_t seed = derive_seed(spec.master_seed, 0, 0);
        TrialOutcome outcome = run_trial(spec.at(point), seed, true);
        outcome.record.param_value = point;
        report_warnings(outcome.result, log);
        prepare_output(out);
        json result{{"spec", spec_to_json(spec)},
                    {"master_seed", spec.master_seed},
                    {"trial_seed", seed},
                    {"success", outcome.record.success},
                    {"l2_error", outcome.record.l2_error},
                    {"solver_result", outcome.result}};
        if (!std::isnan(outcome.record.channel_mse)) {
          result["channel_mse"] = outcome.record.channel_mse;
        }
        write_json_file(out / "result.json", result);
        write_text_file(out / "trials.csv", records_to_csv(spec, {outcome.record}));
        return static_cast<int>(kExitOk);
      });
}

int cmd_sweep(const json& config, const fs::path& out, std::ostream& log) {
  ExperimentSpec spec;
  return guarded(
      log, "experiment", [&] { spec = spec_from_json(section(config, "experiment")); },
      [&] {
        const SweepResult result = sweep(spec);
        for (const auto& r : result.records) {
          if (!r.error.empty()) {
            log << "WARN: trial " << r.grid_index << "/" << r.trial << " failed: " << r.error << '\n';
          }
        }
        prepare_output(out);
        write_text_file(out / "sweep.csv", records_to_csv(spec, result.records));
        write_json_file(out / "summary.json", sweep_summary_json(result));
        return static_cast<int>(kExitOk);
      });
}

// --- rip ---------------------------------------------------------------------

namespace {

struct RipRequest {
  json op_spec;
  Field field = Field::real;
  Index s = 0;
  Index sigma = 0;
  std::vector<std::string> kinds{"exact", "monte_carlo", "coherence"};
  Index mc_trials = 1000;
  std::uint64_t seed = 0;
  double budget = kDefaultSupportBudget;
  CoherenceVariant variant = CoherenceVariant::block_rip;
  Index t = 1;
};

const std::set<std::string> kRipKinds{"exact", "monte_carlo", "coherence", "flat_exact", "inherited",
                                      "incoherent_blocks"};

RipRequest parse_rip(const json& j) {
  reject_unknown(j, {"operator", "s", "sigma", "kinds", "mc_trials", "seed", "budget", "coherence_variant", "t"}, "rip");
  RipRequest r;
  if (!j.contains("operator")) {
    throw ParameterError("missing key 'rip.operator'");
  }
  r.op_spec = j["operator"];
  reject_unknown(r.op_spec, {"type", "m", "N", "n", "M", "field", "seed", "path"}, "rip.operator");
  if (!r.op_spec.contains("type")) {
    throw ParameterError("missing key 'rip.operator.type'");
  }
  const auto type = r.op_spec["type"].get<std::string>();
  if (type != "gaussian" && type != "identity" && type != "file" && type != "kronecker" && type != "hierarchical") {
    throw ParameterError("rip.operator.type must be gaussian, identity, file, kronecker or hierarchical");
  }
  if (r.op_spec.contains("field")) {
    const auto f = r.op_spec["field"].get<std::string>();
    if (f != "real" && f != "complex") {
      throw ParameterError("rip.operator.field must be 'real' or 'complex'");
    }
    r.field = f == "real" ? Field::real : Field::complex;
  }
  if (type == "file") {
    if (!r.op_spec.contains("path")) {
      throw ParameterError("missing key 'rip.operator.path'");
    }
    r.field = operator_field(read_json_file(r.op_spec["path"].get<std::string>()));
  }
  r.s = get_index(j, "s", "rip");
  r.sigma = get_index(j, "sigma", "rip");
  if (j.contains("kinds")) {
    r.kinds = j["kinds"].get<std::vector<std::string>>();
    for (const auto& k : r.kinds) {
      if (!kRipKinds.count(k)) {
        throw ParameterError("unknown RIP kind '" + k + "'");
      }
    }
  }
  if (j.contains("mc_trials")) r.mc_trials = get_index(j, "mc_trials", "rip");
  if (r.mc_trials < 1) {
    throw ParameterError("rip.mc_trials must be >= 1");
  }
  if (j.contains("seed")) r.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("budget")) r.budget = j["budget"].get<double>();
  if (j.contains("t")) r.t = get_index(j, "t", "rip");
  if (j.contains("coherence_variant")) {
    const auto v = j["coherence_variant"].get<std::string>();
    if (v == "block_rip") {
      r.variant = CoherenceVariant::block_rip;
    } else if (v == "normalized") {
      r.variant = CoherenceVariant::normalized;
    } else {
      throw ParameterError("rip.coherence_variant must be 'block_rip' or 'normalized'");
    }
  }
  return r;
}

template <typename Scalar>
struct BuiltOperator {
  std::unique_ptr<MeasurementOperator<Scalar>> op;
  const KroneckerOperator<Scalar>* kron = nullptr;
  const HierarchicalOperator<Scalar>* hier = nullptr;
};

template <typename Scalar>
BuiltOperator<Scalar> build_operator(const json& spec) {
  BuiltOperator<Scalar> b;
  const auto type = spec["type"].get<std::string>();
  const std::uint64_t seed = spec.value("seed", std::uint64_t{0});
  if (type == "file") {
    b.op = std::make_unique<DenseOperator<Scalar>>(load_dense_operator<Scalar>(spec["path"].get<std::string>()));
    return b;
  }
  const Index N = get_index(spec, "N", "rip.operator");
  const Index n = get_index(spec, "n", "rip.operator");
  if (N < 1 || n < 1) {
    throw ParameterError("rip.operator: N and n must be >= 1");
  }
  if (type == "identity") {
    b.op = std::make_unique<DenseOperator<Scalar>>(Mat<Scalar>::Identity(N * n, N * n), N, n);
  } else if (type == "gaussian") {
    const Index m = get_index(spec, "m", "rip.operator");
    if (m < 1) {
      throw ParameterError("rip.operator.m must be >= 1");
    }
    b.op = std::make_unique<DenseOperator<Scalar>>(gaussian_operator<Scalar>(m, N, n, seed));
  } else {
    const Index M = get_index(spec, "M", "rip.operator");
    const Index m = get_index(spec, "m", "rip.operator");
    if (M < 1 || m < 1) {
      throw ParameterError("rip.operator: M and m must be >= 1");
    }
    Rng rng(seed);
    Mat<Scalar> a = gaussian_matrix<Scalar>(M, N, rng) / std::sqrt(static_cast<double>(M));
    if (type == "kronecker") {
      Mat<Scalar> bm = gaussian_matrix<Scalar>(m, n, rng) / std::sqrt(static_cast<double>(m));
      auto k = std::make_unique<KroneckerOperator<Scalar>>(std::move(a), std::move(bm));
      b.kron = k.get();
      b.op = std::move(k);
    } else {
      std::vector<Mat<Scalar>> blocks;
      for (Index i = 0; i < N; ++i) {
        blocks.push_back(gaussian_matrix<Scalar>(m, n, rng) / std::sqrt(static_cast<double>(m)));
      }
      auto h = std::make_unique<HierarchicalOperator<Scalar>>(std::move(a), std::move(blocks));
      b.hier = h.get();
      b.op = std::move(h);
    }
  }
  return b;
}

template <typename Scalar>
json run_rip(const RipRequest& req) {
  const BuiltOperator<Scalar> built = build_operator<Scalar>(req.op_spec);
  const auto& op = *built.op;
  // Parameter bounds are a config problem, so check them before any work.
  if (req.s < 0 || req.s > op.block_count() || req.sigma < 0 || req.sigma > op.block_len()) {
    throw ParameterError("rip: (s, sigma) = (" + std::to_string(req.s) + ", " + std::to_string(req.sigma) +
                         ") outside [0, N=" + std::to_string(op.block_count()) + "] x [0, n=" +
                         std::to_string(op.block_len()) + "]");
  }
  const auto wants = [&](const char* k) { return std::find(req.kinds.begin(), req.kinds.end(), k) != req.kinds.end(); };
  json reports = json::object();
  std::optional<RipReport> exact, mc, coh, flat, inherited;
  if (wants("exact")) {
    exact = exact_hirip<Scalar>(op, req.s, req.sigma, req.budget);
    reports["exact"] = rip_report_to_json(*exact);
  }
  if (wants("monte_carlo")) {
    mc = mc_hirip_lower_bound<Scalar>(op, req.s, req.sigma, req.mc_trials, req.seed);
    reports["monte_carlo_lower_bound"] = rip_report_to_json(*mc);
  }
  if (wants("coherence")) {
    coh = coherence_hirip_bound<Scalar>(op, req.s, req.sigma, req.variant, req.budget);
    reports["coherence_upper_bound"] = rip_report_to_json(*coh);
  }
  if (wants("flat_exact")) {
    flat = exact_rip<Scalar>(op, req.s * req.sigma, req.budget);
    reports["flat_exact"] = rip_report_to_json(*flat);
  }
  if (wants("inherited")) {
    if (built.kron) {
      inherited = inherited_hirip_bound<Scalar>(*built.kron, req.s, req.sigma, req.budget);
    } else if (built.hier) {
      inherited = inherited_hirip_bound<Scalar>(*built.hier, req.s, req.sigma, req.budget);
    } else {
      throw ParameterError("the inherited bound needs a kronecker or hierarchical operator");
    }
    reports["inherited_upper_bound"] = rip_report_to_json(*inherited);
  }
  if (wants("incoherent_blocks")) {
    if (!built.hier) {
      throw ParameterError("the incoherent-blocks bound needs a hierarchical operator");
    }
    reports["incoherent_blocks_upper_bound"] =
        rip_report_to_json(incoherent_blocks_bound<Scalar>(*built.hier, req.s, req.sigma, req.t, req.budget));
  }

  constexpr double slack = 1e-10;
  json checks = json::array();
  bool holds = true;
  const auto check = [&](const char* name, const std::optional<RipReport>& lo, const std::optional<RipReport>& hi) {
    if (lo && hi) {
      const bool ok = lo->delta <= hi->delta + slack;
      holds = holds && ok;
      checks.push_back({{"relation", name}, {"lhs", lo->delta}, {"rhs", hi->delta}, {"holds", ok}});
    }
  };
  check("monte_carlo <= exact", mc, exact);
  check("exact <= coherence_bound", exact, coh);
  check("exact <= flat_exact", exact, flat);
  check("exact <= inherited_bound", exact, inherited);
  check("monte_carlo <= coherence_bound", mc, coh);

  return json{{"operator", req.op_spec},
              {"field", to_string(field_of<Scalar>())},
              {"blocks", {op.block_count(), op.block_len()}},
              {"rows", op.rows()},
              {"s", req.s},
              {"sigma", req.sigma},
              {"budget", req.budget},
              {"reports", reports},
              {"chain", {{"slack", slack}, {"checked", !checks.empty()}, {"holds", holds}, {"relations", checks}}}};
}

}  // namespace

int cmd_rip(const json& config, const fs::path& out, std::ostream& log) {
  RipRequest req;
  return guarded(
      log, "rip", [&] { req = parse_rip(section(config, "rip")); },
      [&] {
        const json report = req.field == Field::complex ? run_rip<cplx>(req) : run_rip<double>(req);
        if (!report["chain"]["holds"].get<bool>()) {
          log << "WARN: RIP inequality chain violated\n";
        }
        prepare_output(out);
        write_json_file(out / "rip_report.json", report);
        return static_cast<int>(kExitOk);
      });
}

// --- project -------------------------------------------------------------------

int cmd_project(const json& config, const fs::path& out, std::ostream& log) {
  json p;
  std::unique_ptr<SparsityModel> model;
  Vec<cplx> x;
  bool complex_input = false;
  return guarded(
      log, "project",
      [&] {
        p = section(config, "project");
        reject_unknown(p, {"x", "N", "n", "s", "sigma", "tree", "seed"}, "project");
        if (p.contains("tree")) {
          reject_unknown(p["tree"], {"fanouts", "sparsities"}, "project.tree");
          model = std::make_unique<TreeSparsity>(TreeSparsityProfile::uniform(
              p["tree"].at("fanouts").get<std::vector<Index>>(), p["tree"].at("sparsities").get<std::vector<Index>>()));
        } else {
          model = std::make_unique<HiSparsity>(get_index(p, "N", "project"), get_index(p, "n", "project"),
                                               get_index(p, "s", "project"), get_index(p, "sigma", "project"));
        }
        if (p.contains("x")) {
          const auto& arr = p["x"];
          x.resize(static_cast<Index>(arr.size()));
          for (std::size_t i = 0; i < arr.size(); ++i) {
            if (arr[i].is_array()) {
              complex_input = true;
              x[static_cast<Index>(i)] = cplx(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
            } else {
              x[static_cast<Index>(i)] = arr[i].get<double>();
            }
          }
        } else {
          Rng rng(p.value("seed", std::uint64_t{0}));
          x.resize(model->dim());
          for (Index i = 0; i < x.size(); ++i) {
            x[i] = rng.normal();
          }
        }
        if (x.size() != model->dim()) {
          throw DimensionError("project: x has length " + std::to_string(x.size()) + ", model dimension is " +
                               std::to_string(model->dim()));
        }
      },
      [&] {
        const Vec<cplx> proj = model_project<cplx>(*model, x);
        const auto support = model_support<cplx>(*model, x);
        json projected = complex_input ? vector_to_json<cplx>(proj) : vector_to_json<double>(proj.real());
        prepare_output(out);
        write_json_file(out / "projection.json",
                        json{{"model", model->describe()},
                             {"projected", std::move(projected)},
                             {"support", support},
                             {"hi_support", support_to_json(HiSupport::from_flat(support, model->block_len()))},
                             {"distance", (x - proj).norm()}});
        return static_cast<int>(kExitOk);
      });
}

// --- dispatch ------------------------------------------------------------------

int run_cli(const CliOptions& options, std::ostream& out, std::ostream& err) {
  if (options.subcommand == "verify") {
    return cmd_verify(VerifyOptions{options.inject_adjoint_bug}, out, err);
  }
  json config;
  try {
    config = load_config(options);
  } catch (const std::exception& e) {
    err << "ERROR: config: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (options.subcommand == "run") return cmd_run(config, options.output_path, err);
  if (options.subcommand == "sweep") return cmd_sweep(config, options.output_path, err);
  if (options.subcommand == "rip") return cmd_rip(config, options.output_path, err);
  if (options.subcommand == "project") return cmd_project(config, options.output_path, err);
  err << "ERROR: unknown subcommand '" << options.subcommand << "'\n";
  return kExitConfigError;
}

}  // namespace hics
