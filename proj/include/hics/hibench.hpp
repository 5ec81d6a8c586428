#pragma once

// Seeded recovery experiments: scenario generators, noise, per-trial
// metrics and grid sweeps producing CSV tables and JSON summaries.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hics/himeasure.hpp"
#include "hics/hisignal.hpp"
#include "hics/hisolve.hpp"

namespace hics {

enum class ScenarioKind { gaussian_hisparse, kronecker_channel, blind_deconv, demix_lowrank };
enum class SolverKind { hiiht, hihtp, iht, htp, sdt, dt, informed_dt };

const char* to_string(ScenarioKind k);
const char* to_string(SolverKind k);
ScenarioKind parse_scenario(const std::string& name);
SolverKind parse_solver(const std::string& name);

/// Everything needed to reproduce an experiment. Which dimensions matter
/// depends on the scenario:
///   gaussian_hisparse  N, n, m, s, sigma (field real or complex)
///   kronecker_channel  N angles, n delays, M_sub, m_sub, L
///   blind_deconv       N signal length, E, N_d users, mu, s, sigma
///   demix_lowrank      N blocks of n x n, m, s, r
struct ExperimentSpec {
  ScenarioKind scenario = ScenarioKind::gaussian_hisparse;
  Field field = Field::real;
  Index N = 0;
  Index n = 0;
  Index m = 0;
  Index M_sub = 0;
  Index m_sub = 0;
  Index E = 0;
  Index N_d = 0;
  Index s = 0;
  Index sigma = 0;
  Index r = 0;
  Index mu = 0;
  Index L = 0;
  SolverKind solver = SolverKind::hihtp;
  SolverConfig solver_config;
  /// Measurement SNR in dB; no noise when unset.
  std::optional<double> snr_db;
  Index trials = 1;
  std::uint64_t master_seed = 0;
  /// Swept parameter and its values. Empty param means a single point.
  std::string sweep_param;
  std::vector<double> grid;
  /// Success threshold on the l2 (vector) or Frobenius (matrix) error;
  /// unset means 1e-5 / 1e-3.
  std::optional<double> success_threshold;

  /// Throws ParameterError naming the violated bound.
  void validate() const;
  /// Copy with the sweep parameter set to `value`.
  ExperimentSpec at(double value) const;
  double threshold() const;
  /// Grid values, or a single placeholder point when nothing is swept.
  std::vector<double> points() const;
};

/// Names accepted as sweep parameters.
const std::vector<std::string>& sweep_parameters();

nlohmann::json spec_to_json(const ExperimentSpec& spec);
/// Rejects unknown keys, naming them.
ExperimentSpec spec_from_json(const nlohmann::json& j);

// --- scenarios ---------------------------------------------------------------

template <typename Scalar>
struct VectorScenario {
  std::unique_ptr<MeasurementOperator<Scalar>> op;
  Vec<Scalar> truth;
  /// Block structure used for per-block metrics.
  Index eval_blocks = 1;
  Index eval_block_len = 1;
  std::unique_ptr<SparsityModel> model;
  /// Flat sparsity for the single-block baselines.
  Index flat_sparsity = 0;
};

template <typename Scalar>
VectorScenario<Scalar> make_gaussian_scenario(Index N, Index n, Index s, Index sigma, Index m, std::uint64_t seed);

/// Random (s, sigma) support with i.i.d. Gaussian values.
template <typename Scalar>
Vec<Scalar> random_hisparse(Index N, Index n, Index s, Index sigma, Rng& rng);

struct ChannelScenario {
  VectorScenario<cplx> base;
  /// Angle-delay grids: N x N and n x n unitary DFT matrices.
  Eigen::MatrixXcd angle_basis;
  Eigen::MatrixXcd delay_basis;
  std::vector<Index> angle_rows;
  std::vector<Index> delay_rows;
  /// H = A X B^T with X the N x n coefficient matrix.
  Eigen::MatrixXcd channel;
};

ChannelScenario make_channel_scenario(Index N, Index n, Index M_sub, Index m_sub, Index L, std::uint64_t seed);

/// A X B^T for the N x n matrix stored row-major in x.
Eigen::MatrixXcd channel_matrix(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Vec<cplx>& x);

struct BlindDeconvScenario {
  VectorScenario<double> base;
  std::vector<Index> active_users;
  std::vector<Eigen::VectorXd> messages;  // c_p, length E, for active users
  std::vector<Eigen::VectorXd> channels;  // h_p, length N
};

BlindDeconvScenario make_blind_deconv_scenario(Index N, Index E, Index N_d, Index mu, Index s, Index sigma,
                                               std::uint64_t seed);

struct DemixScenario {
  std::unique_ptr<GaussianDemixOperator> op;
  BlockMatrixSignal truth;
};

DemixScenario make_demix_scenario(Index N, Index n, Index s, Index r, Index m, std::uint64_t seed);

/// i.i.d. Gaussian noise with E||e||^2 = ||y||^2 10^{-snr/10}.
template <typename Scalar>
Vec<Scalar> snr_noise(const Vec<Scalar>& y_clean, double snr_db, std::uint64_t seed);

// --- metrics -----------------------------------------------------------------

struct TrialRecord {
  Index grid_index = 0;
  double param_value = 0.0;
  Index trial = 0;
  std::uint64_t seed = 0;
  double l2_error = 0.0;
  double relative_error = 0.0;
  Index correct_zero_blocks = 0;
  Index correct_nonzero_blocks = 0;
  /// Matrix scenarios only (NaN otherwise).
  double frobenius_error = std::numeric_limits<double>::quiet_NaN();
  /// Channel scenario only (NaN otherwise).
  double channel_mse = std::numeric_limits<double>::quiet_NaN();
  bool success = false;
  bool support_recovered = false;
  Index iterations = 0;
  std::string stop_reason;
  /// Non-empty when the trial threw; metrics are then meaningless.
  std::string error;
  double wall_time = 0.0;
};

/// Error metrics of a blocked vector estimate. A block counts as correct
/// when its l2 deviation is below `threshold`; success is l2 error below
/// `threshold`.
template <typename Scalar>
TrialRecord evaluate_trial(const Vec<Scalar>& estimate, const Vec<Scalar>& truth, Index block_count, Index block_len,
                           double threshold);

TrialRecord evaluate_trial(const BlockMatrixSignal& estimate, const BlockMatrixSignal& truth, double threshold);

/// Support of entries above rel_tol * max modulus.
template <typename Scalar>
std::vector<Index> numerical_support(const Vec<Scalar>& x, double rel_tol = 1e-6);

// --- execution ---------------------------------------------------------------

struct TrialOutcome {
  TrialRecord record;
  /// Solver result JSON (estimate included).
  nlohmann::json result;
};

/// One trial of `spec` (already fixed to a grid point) with the given seed.
TrialOutcome run_trial(const ExperimentSpec& spec, std::uint64_t seed, bool keep_result = false);

struct PointSummary {
  double param_value = 0.0;
  Index trials = 0;
  Index failures = 0;  // trials that threw
  double success_rate = 0.0;
  double mean_l2_error = 0.0;
  double median_l2_error = 0.0;
  double mean_frobenius_error = 0.0;
  double mean_channel_mse = 0.0;
  double mean_correct_zero_blocks = 0.0;
  double mean_correct_nonzero_blocks = 0.0;
  double support_recovery_rate = 0.0;
  double mean_iterations = 0.0;
};

struct SweepResult {
  ExperimentSpec spec;
  std::vector<TrialRecord> records;  // grid-major, then trial
  std::vector<PointSummary> points;
  double wall_time = 0.0;
};

/// Worker threads from HICS_WORKERS, default std::thread::hardware_concurrency().
unsigned sweep_workers();

SweepResult sweep(const ExperimentSpec& spec, unsigned workers = 0);

std::vector<PointSummary> summarize(const std::vector<TrialRecord>& records, const std::vector<double>& points);

/// CSV table: '#' comment lines with the spec JSON and master seed, then a
/// header row and one row per trial. Wall times are left out so that the
/// bytes depend only on the spec.
std::string records_to_csv(const ExperimentSpec& spec, const std::vector<TrialRecord>& records);

nlohmann::json sweep_summary_json(const SweepResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hics
