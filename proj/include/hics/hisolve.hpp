#pragma once

// Hard thresholding recovery: HiIHT, HiHTP (with their flat special
// cases), the least-squares step on a fixed support, and SDT for
// block-sparse low-rank signals.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hics/himeasure.hpp"
#include "hics/hisignal.hpp"

namespace hics {

struct StepPolicy {
  enum class Kind { constant, adaptive };
  Kind kind = Kind::constant;
  double tau = 1.0;

  static StepPolicy constant(double tau) { return {Kind::constant, tau}; }
  static StepPolicy adaptive() { return {Kind::adaptive, 1.0}; }
};

enum class StopReason { support_stable, residual_tol, max_iters };

const char* to_string(StopReason r);

struct SolverConfig {
  Index max_iters = 1000;
  double residual_tol = 1e-7;
  StepPolicy step;
  double ls_tol = 1e-12;
  /// 0 means 10 * |support|.
  Index ls_max_iters = 0;
  bool record_trace = false;

  void validate() const;
};

template <typename Scalar>
struct SolverResult {
  BlockedVector<Scalar> estimate{1, 1};
  Index iterations = 0;
  /// ||y - M x^t|| for t = 0..iterations.
  std::vector<double> residual_history;
  /// Support of x^t for t = 1..iterations, only with record_trace.
  std::vector<HiSupport> support_history;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
  /// Fallbacks and inner-solver problems; empty on a clean run.
  std::vector<std::string> warnings;
};

/// Step width for a gradient restricted to the current support. Constant
/// policies return tau. The adaptive one returns ||g||^2 / ||M g||^2 and
/// falls back to 1 (setting *fell_back) when that ratio is undefined.
template <typename Scalar>
double step_size(const StepPolicy& policy, const Vec<Scalar>& g_support, const MeasurementOperator<Scalar>& m,
                 bool* fell_back = nullptr);

template <typename Scalar>
struct LeastSquaresResult {
  Vec<Scalar> x;
  bool converged = true;
  Index iterations = 0;
  double residual_norm = 0.0;
  std::string warning;
};

/// argmin ||y - M x|| over x supported on `support` (flat indices). Small
/// supports (<= 64) use a dense orthogonal factorization; larger ones run
/// CGLS on the extracted columns.
template <typename Scalar>
LeastSquaresResult<Scalar> least_squares_on_support(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m,
                                                    std::span<const Index> support, double ls_tol = 1e-12,
                                                    Index ls_max_iters = 0);

template <typename Scalar>
LeastSquaresResult<Scalar> least_squares_on_support(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m,
                                                    const HiSupport& support, double ls_tol = 1e-12,
                                                    Index ls_max_iters = 0);

inline constexpr Index kDenseLeastSquaresLimit = 64;

template <typename Scalar>
SolverResult<Scalar> hi_iht(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, const SparsityModel& model,
                            const SolverConfig& config = {});

template <typename Scalar>
SolverResult<Scalar> hi_iht(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index s, Index sigma,
                            const SolverConfig& config = {});

template <typename Scalar>
SolverResult<Scalar> hi_htp(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, const SparsityModel& model,
                            const SolverConfig& config = {});

template <typename Scalar>
SolverResult<Scalar> hi_htp(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index s, Index sigma,
                            const SolverConfig& config = {});

/// Flat IHT / HTP at sparsity k: the hierarchical solvers with one block.
template <typename Scalar>
SolverResult<Scalar> iht(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index k,
                         const SolverConfig& config = {});

template <typename Scalar>
SolverResult<Scalar> htp(const Vec<Scalar>& y, const MeasurementOperator<Scalar>& m, Index k,
                         const SolverConfig& config = {});

// --- SDT ---------------------------------------------------------------------

enum class DemixMode {
  /// rank-r projection of every block plus selection of s blocks
  sdt,
  /// rank projection only
  dt,
  /// rank projection on a known block support
  informed,
};

const char* to_string(DemixMode mode);

struct DemixResult {
  BlockMatrixSignal estimate;
  Index iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
  std::vector<std::string> warnings;
};

/// Per-block exact line search step for the projected gradient block g:
/// ||g||^2 / ||A(e_i (x) g)||^2, or 1 if that is not finite.
double sdt_block_step(const DemixOperator& a, Index i, const Eigen::MatrixXcd& g);

DemixResult sdt(const Eigen::VectorXd& y, const DemixOperator& a, Index s, Index r, const SolverConfig& config = {},
                DemixMode mode = DemixMode::sdt, std::span<const Index> informed_blocks = {});

// --- guarantees --------------------------------------------------------------

enum class GuaranteeAlgorithm { hiiht, hihtp };

const char* to_string(GuaranteeAlgorithm a);

struct GuaranteeConstants {
  double rho = 0.0;
  /// +inf when not applicable.
  double tau = 0.0;
  GuaranteeAlgorithm algorithm = GuaranteeAlgorithm::hiiht;
  bool applicable = false;
  /// Admissible bound on delta_{3s,2sigma} stated with the theorem.
  double delta_threshold = 0.0;
  /// HiHTP only: rho with delta_{3s,2sigma} squared inside the root.
  double rho_squared_reading = 0.0;
};

/// Contraction factor and noise amplification of the recovery theorem.
/// The HiHTP rho is (2 d3 / (1 - d2^2))^{1/2}.
GuaranteeConstants guarantee_constants(double delta_3s_2sigma, double delta_2s_2sigma, GuaranteeAlgorithm algorithm);

// --- serialization -----------------------------------------------------------

template <typename Scalar>
nlohmann::json solver_result_to_json(const SolverResult<Scalar>& r, bool include_estimate = true);

nlohmann::json demix_result_to_json(const DemixResult& r, bool include_estimate = true);

nlohmann::json guarantee_to_json(const GuaranteeConstants& g);

}  // namespace hics
