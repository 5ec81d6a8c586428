#pragma once

// Restricted isometry constants and coherence measures. Exact values come
// from enumerating every admissible support, so everything here is meant
// for small instances; the enumeration refuses to start when the support
// count exceeds a cap.

#include <cstdint>
#include <map>
#include <string>

#include "hics/himeasure.hpp"

namespace hics {

inline constexpr double kDefaultSupportBudget = 200000.0;

enum class RipKind {
  exact,
  monte_carlo_lower_bound,
  coherence_upper_bound,
  inherited_upper_bound,
  incoherent_blocks_upper_bound,
};

const char* to_string(RipKind kind);

struct RipReport {
  double delta = 0.0;
  RipKind kind = RipKind::exact;
  std::uint64_t supports_examined = 0;
  /// Hierarchical parameters. For flat reports s holds k and sigma is 1.
  Index s = 0;
  Index sigma = 0;
  bool flat = false;
  /// Which bound formula produced `delta` (empty for exact / Monte Carlo).
  std::string variant;
  /// Intermediate quantities that enter a bound, by name.
  std::map<std::string, double> constituents;
};

/// C(n, k), saturating to +inf in double precision.
double binomial(Index n, Index k);

/// Number of (s, sigma) supports: C(N, s) C(n, sigma)^s.
double hi_support_count(Index N, Index n, Index s, Index sigma);

/// delta_{s,sigma} by enumeration of all supports of `a`, whose columns are
/// grouped into N blocks of length n.
template <typename Scalar>
RipReport exact_hirip(const Mat<Scalar>& a, Index N, Index n, Index s, Index sigma,
                      double budget = kDefaultSupportBudget);

template <typename Scalar>
RipReport exact_hirip(const MeasurementOperator<Scalar>& op, Index s, Index sigma,
                      double budget = kDefaultSupportBudget);

/// Flat delta_k (single-block view).
template <typename Scalar>
RipReport exact_rip(const Mat<Scalar>& a, Index k, double budget = kDefaultSupportBudget);

template <typename Scalar>
RipReport exact_rip(const MeasurementOperator<Scalar>& op, Index k, double budget = kDefaultSupportBudget);

/// Max of the per-support constant over `trials` random (s, sigma) supports.
template <typename Scalar>
RipReport mc_hirip_lower_bound(const Mat<Scalar>& a, Index N, Index n, Index s, Index sigma, Index trials,
                               std::uint64_t seed);

template <typename Scalar>
RipReport mc_hirip_lower_bound(const MeasurementOperator<Scalar>& op, Index s, Index sigma, Index trials,
                               std::uint64_t seed);

/// Per-support constant max(lambda_max - 1, 1 - lambda_min) of the Gram
/// matrix of the selected columns.
template <typename Scalar>
double support_rip_constant(const Mat<Scalar>& a, std::span<const Index> columns);

struct CoherenceValue {
  double value = 0.0;
  /// Columns were not unit norm (to 1e-8) and were normalized first.
  bool renormalized = false;
};

/// max_{i != j} |<a_i, a_j>|. Zero columns are rejected.
template <typename Scalar>
CoherenceValue mutual_coherence(const Mat<Scalar>& a);

/// Largest singular value over all sigma x sigma submatrices of b.
template <typename Scalar>
double sparse_singular_value(const Mat<Scalar>& b, Index sigma, double budget = kDefaultSupportBudget);

/// max over blocks of mutual_coherence(A_i).
template <typename Scalar>
CoherenceValue sub_coherence(const MeasurementOperator<Scalar>& op);

/// max_{i != j} sparse_singular_value(A_i^* A_j, sigma).
template <typename Scalar>
double sparse_block_coherence(const MeasurementOperator<Scalar>& op, Index sigma,
                              double budget = kDefaultSupportBudget);

/// Same quantity for a list of m x n block matrices.
template <typename Scalar>
double sparse_block_coherence(const std::vector<Mat<Scalar>>& blocks, Index sigma,
                              double budget = kDefaultSupportBudget);

enum class CoherenceVariant {
  /// sup_i delta_sigma(A_i) + (s - 1) mu_block
  block_rip,
  /// (sigma - 1) nu + (s - 1) mu_block, needs unit-norm columns
  normalized,
};

template <typename Scalar>
RipReport coherence_hirip_bound(const MeasurementOperator<Scalar>& op, Index s, Index sigma,
                                CoherenceVariant variant = CoherenceVariant::block_rip,
                                double budget = kDefaultSupportBudget);

/// delta_s(A) + sup_i delta_sigma(B_i) + delta_s(A) sup_i delta_sigma(B_i).
template <typename Scalar>
RipReport inherited_hirip_bound(const HierarchicalOperator<Scalar>& h, Index s, Index sigma,
                                double budget = kDefaultSupportBudget);

template <typename Scalar>
RipReport inherited_hirip_bound(const KroneckerOperator<Scalar>& h, Index s, Index sigma,
                                double budget = kDefaultSupportBudget);

/// Bound on delta_{ts,sigma}:
///   d_B + d_s(A) (1 + d_B) + t sqrt(s) d_2s(A) mu_block^{(2 sigma, 2 sigma)}(B)
/// with d_B = sup_i delta_sigma(B_i).
template <typename Scalar>
RipReport incoherent_blocks_bound(const HierarchicalOperator<Scalar>& h, Index s, Index sigma, Index t,
                                  double budget = kDefaultSupportBudget);

/// lower <= exact <= upper with additive slack.
bool rip_chain_holds(const RipReport& lower, const RipReport& exact, const RipReport& upper, double slack = 1e-10);

}  // namespace hics
