#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "hics/hibench.hpp"

namespace hics {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

template <typename Scalar>
SolverResult<Scalar> solve_vector(const ExperimentSpec& e, const VectorScenario<Scalar>& sc, const Vec<Scalar>& y) {
  const auto& cfg = e.solver_config;
  switch (e.solver) {
    case SolverKind::hiiht:
      return hi_iht<Scalar>(y, *sc.op, *sc.model, cfg);
    case SolverKind::hihtp:
      return hi_htp<Scalar>(y, *sc.op, *sc.model, cfg);
    case SolverKind::iht:
      return iht<Scalar>(y, *sc.op, sc.flat_sparsity, cfg);
    case SolverKind::htp:
      return htp<Scalar>(y, *sc.op, sc.flat_sparsity, cfg);
    default:
      throw ParameterError(std::string("solver '") + to_string(e.solver) + "' does not apply to vector scenarios");
  }
}

template <typename Scalar>
TrialOutcome run_vector(const ExperimentSpec& e, const VectorScenario<Scalar>& sc, std::uint64_t seed, bool keep,
                        Vec<Scalar>* estimate) {
  Vec<Scalar> y = sc.op->apply(sc.truth);
  if (e.snr_db) {
    y += snr_noise<Scalar>(y, *e.snr_db, derive_seed(seed, 3));
  }
  const SolverResult<Scalar> res = solve_vector<Scalar>(e, sc, y);
  TrialOutcome out;
  out.record = evaluate_trial<Scalar>(res.estimate.data(), sc.truth, sc.eval_blocks, sc.eval_block_len, e.threshold());
  out.record.iterations = res.iterations;
  out.record.stop_reason = to_string(res.stop_reason);
  if (keep) {
    out.result = solver_result_to_json<Scalar>(res);
  }
  if (estimate) {
    *estimate = res.estimate.data();
  }
  return out;
}

TrialOutcome run_demix(const ExperimentSpec& e, std::uint64_t seed, bool keep) {
  const DemixScenario sc = make_demix_scenario(e.N, e.n, e.s, e.r, e.m, seed);
  Eigen::VectorXd y = sc.op->apply(sc.truth);
  if (e.snr_db) {
    y += snr_noise<double>(y, *e.snr_db, derive_seed(seed, 3));
  }
  DemixMode mode = DemixMode::sdt;
  if (e.solver == SolverKind::dt) {
    mode = DemixMode::dt;
  } else if (e.solver == SolverKind::informed_dt) {
    mode = DemixMode::informed;
  }
  const std::vector<Index> known = sc.truth.nonzero_blocks();
  const DemixResult res = sdt(y, *sc.op, e.s, e.r, e.solver_config, mode, known);
  TrialOutcome out;
  out.record = evaluate_trial(res.estimate, sc.truth, e.threshold());
  out.record.iterations = res.iterations;
  out.record.stop_reason = to_string(res.stop_reason);
  if (keep) {
    out.result = demix_result_to_json(res);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  return sum / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

TrialOutcome run_trial(const ExperimentSpec& e, std::uint64_t seed, bool keep_result) {
  const auto start = Clock::now();
  TrialOutcome out;
  switch (e.scenario) {
    case ScenarioKind::gaussian_hisparse:
      if (e.field == Field::complex) {
        out = run_vector<cplx>(e, make_gaussian_scenario<cplx>(e.N, e.n, e.s, e.sigma, e.m, seed), seed, keep_result,
                               nullptr);
      } else {
        out = run_vector<double>(e, make_gaussian_scenario<double>(e.N, e.n, e.s, e.sigma, e.m, seed), seed,
                                 keep_result, nullptr);
      }
      break;
    case ScenarioKind::kronecker_channel: {
      const ChannelScenario sc = make_channel_scenario(e.N, e.n, e.M_sub, e.m_sub, e.L, seed);
      Vec<cplx> estimate;
      out = run_vector<cplx>(e, sc.base, seed, keep_result, &estimate);
      const Eigen::MatrixXcd h_hat = channel_matrix(sc.angle_basis, sc.delay_basis, estimate);
      out.record.channel_mse = (sc.channel - h_hat).squaredNorm() / static_cast<double>(e.N * e.n);
      break;
    }
    case ScenarioKind::blind_deconv: {
      const BlindDeconvScenario sc = make_blind_deconv_scenario(e.N, e.E, e.N_d, e.mu, e.s, e.sigma, seed);
      out = run_vector<double>(e, sc.base, seed, keep_result, nullptr);
      break;
    }
    case ScenarioKind::demix_lowrank:
      out = run_demix(e, seed, keep_result);
      break;
  }
  out.record.seed = seed;
  out.record.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

unsigned sweep_workers() {
  if (const char* env = std::getenv("HICS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      return static_cast<unsigned>(v);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  const auto start = Clock::now();
  const std::vector<double> points = spec.points();
  const std::size_t jobs = points.size() * static_cast<std::size_t>(spec.trials);
  std::vector<TrialRecord> records(jobs);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t k = next++; k < jobs; k = next++) {
      const auto g = static_cast<Index>(k / static_cast<std::size_t>(spec.trials));
      const auto t = static_cast<Index>(k % static_cast<std::size_t>(spec.trials));
      const double value = points[static_cast<std::size_t>(g)];
      const std::uint64_t seed =
          derive_seed(spec.master_seed, static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(t));
      TrialRecord rec;
      try {
        rec = run_trial(spec.at(value), seed).record;
      } catch (const std::exception& ex) {
        rec = TrialRecord{};
        rec.seed = seed;
        rec.error = ex.what();
        rec.l2_error = std::numeric_limits<double>::quiet_NaN();
        rec.relative_error = std::numeric_limits<double>::quiet_NaN();
      }
      rec.grid_index = g;
      rec.param_value = value;
      rec.trial = t;
      records[k] = std::move(rec);
    }
  };

  if (workers == 0) {
    workers = sweep_workers();
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }

  SweepResult out;
  out.spec = spec;
  out.records = std::move(records);
  out.points = summarize(out.records, points);
  out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

std::vector<PointSummary> summarize(const std::vector<TrialRecord>& records, const std::vector<double>& points) {
  std::vector<PointSummary> out;
  for (std::size_t g = 0; g < points.size(); ++g) {
    PointSummary p;
    p.param_value = points[g];
    std::vector<double> l2, frob, mse, zero, nonzero, iters;
    Index success = 0;
    Index support = 0;
    for (const auto& r : records) {
      if (r.grid_index != static_cast<Index>(g)) {
        continue;
      }
      ++p.trials;
      if (!r.error.empty()) {
        ++p.failures;
        continue;
      }
      success += r.success ? 1 : 0;
      support += r.support_recovered ? 1 : 0;
      l2.push_back(r.l2_error);
      if (!std::isnan(r.frobenius_error)) frob.push_back(r.frobenius_error);
      if (!std::isnan(r.channel_mse)) mse.push_back(r.channel_mse);
      zero.push_back(static_cast<double>(r.correct_zero_blocks));
      nonzero.push_back(static_cast<double>(r.correct_nonzero_blocks));
      iters.push_back(static_cast<double>(r.iterations));
    }
    if (p.trials > 0) {
      // Failed trials count as unsuccessful.
      p.success_rate = static_cast<double>(success) / static_cast<double>(p.trials);
      p.support_recovery_rate = static_cast<double>(support) / static_cast<double>(p.trials);
    }
    p.mean_l2_error = mean_of(l2);
    p.median_l2_error = median_of(l2);
    p.mean_frobenius_error = mean_of(frob);
    p.mean_channel_mse = mean_of(mse);
    p.mean_correct_zero_blocks = mean_of(zero);
    p.mean_correct_nonzero_blocks = mean_of(nonzero);
    p.mean_iterations = mean_of(iters);
    out.push_back(p);
  }
  return out;
}

std::string records_to_csv(const ExperimentSpec& spec, const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "# spec: " << spec_to_json(spec).dump() << '\n';
  os << "# master_seed: " << spec.master_seed << '\n';
  os << "grid_index,param,param_value,trial,seed,solver,l2_error,relative_error,frobenius_error,channel_mse,"
        "correct_zero_blocks,correct_nonzero_blocks,success,support_recovered,iterations,stop_reason,error\n";
  const std::string param = spec.sweep_param.empty() ? "none" : spec.sweep_param;
  for (const auto& r : records) {
    os << r.grid_index << ',' << param << ',' << format_double(r.param_value) << ',' << r.trial << ',' << r.seed << ','
       << to_string(spec.solver) << ',' << format_double(r.l2_error) << ',' << format_double(r.relative_error) << ','
       << format_double(r.frobenius_error) << ',' << format_double(r.channel_mse) << ',' << r.correct_zero_blocks
       << ',' << r.correct_nonzero_blocks << ',' << (r.success ? 1 : 0) << ',' << (r.support_recovered ? 1 : 0)
       << ',' << r.iterations << ',' << r.stop_reason << ',' << csv_escape(r.error) << '\n';
  }
  return os.str();
}

json sweep_summary_json(const SweepResult& result) {
  json pts = json::array();
  Index failures = 0;
  for (const auto& p : result.points) {
    failures += p.failures;
    pts.push_back({{"param_value", p.param_value},
                   {"trials", p.trials},
                   {"failures", p.failures},
                   {"success_rate", p.success_rate},
                   {"support_recovery_rate", p.support_recovery_rate},
                   {"mean_l2_error", finite_or_null(p.mean_l2_error)},
                   {"median_l2_error", finite_or_null(p.median_l2_error)},
                   {"mean_frobenius_error", finite_or_null(p.mean_frobenius_error)},
                   {"mean_channel_mse", finite_or_null(p.mean_channel_mse)},
                   {"mean_correct_zero_blocks", finite_or_null(p.mean_correct_zero_blocks)},
                   {"mean_correct_nonzero_blocks", finite_or_null(p.mean_correct_nonzero_blocks)},
                   {"mean_iterations", finite_or_null(p.mean_iterations)}});
  }
  double trial_time = 0.0;
  for (const auto& r : result.records) {
    trial_time += r.wall_time;
  }
  return json{{"spec", spec_to_json(result.spec)},
              {"master_seed", result.spec.master_seed},
              {"sweep_param", result.spec.sweep_param.empty() ? json(nullptr) : json(result.spec.sweep_param)},
              {"trial_count", result.records.size()},
              {"failed_trials", failures},
              {"points", std::move(pts)},
              {"timing", {{"wall_time_seconds", result.wall_time}, {"summed_trial_seconds", trial_time}}}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

}  // namespace hics
