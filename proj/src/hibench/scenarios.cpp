#include <algorithm>

#include "hics/hibench.hpp"

namespace hics {

template <typename Scalar>
Vec<Scalar> random_hisparse(Index N, Index n, Index s, Index sigma, Rng& rng) {
  Vec<Scalar> x = Vec<Scalar>::Zero(N * n);
  auto blocks = rng.sample_without_replacement(N, s);
  std::sort(blocks.begin(), blocks.end());
  for (Index b : blocks) {
    auto entries = rng.sample_without_replacement(n, sigma);
    std::sort(entries.begin(), entries.end());
    for (Index e : entries) {
      x[b * n + e] = rng.gaussian<Scalar>();
    }
  }
  return x;
}

template <typename Scalar>
VectorScenario<Scalar> make_gaussian_scenario(Index N, Index n, Index s, Index sigma, Index m, std::uint64_t seed) {
  VectorScenario<Scalar> sc;
  sc.op = std::make_unique<DenseOperator<Scalar>>(gaussian_operator<Scalar>(m, N, n, derive_seed(seed, 1)));
  Rng rng(derive_seed(seed, 2));
  sc.truth = random_hisparse<Scalar>(N, n, s, sigma, rng);
  sc.eval_blocks = N;
  sc.eval_block_len = n;
  sc.model = std::make_unique<HiSparsity>(N, n, s, sigma);
  sc.flat_sparsity = s * sigma;
  return sc;
}

Eigen::MatrixXcd channel_matrix(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Vec<cplx>& x) {
  if (x.size() != a.cols() * b.cols()) {
    throw DimensionError("channel_matrix: coefficient vector length does not match the bases");
  }
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> xm(x.data(), a.cols(), b.cols());
  return a * xm * b.transpose();
}

ChannelScenario make_channel_scenario(Index N, Index n, Index M_sub, Index m_sub, Index L, std::uint64_t seed) {
  if (L < 1 || L > std::min(N, n)) {
    throw ParameterError("channel scenario: L=" + std::to_string(L) + " outside [1, min(N, n)=" +
                         std::to_string(std::min(N, n)) + "]");
  }
  if (M_sub < 1 || M_sub > N || m_sub < 1 || m_sub > n) {
    throw ParameterError("channel scenario: sub-sampled sizes must satisfy 1 <= M_sub <= N and 1 <= m_sub <= n");
  }
  ChannelScenario sc;
  Rng sampling(derive_seed(seed, 1));
  sc.angle_rows = sampling.sample_without_replacement(N, M_sub);
  std::sort(sc.angle_rows.begin(), sc.angle_rows.end());
  sc.delay_rows = sampling.sample_without_replacement(n, m_sub);
  std::sort(sc.delay_rows.begin(), sc.delay_rows.end());
  sc.angle_basis = dft_matrix(N);
  sc.delay_basis = dft_matrix(n);
  sc.base.op = std::make_unique<KroneckerOperator<cplx>>(subsampled_dft_matrix(N, sc.angle_rows),
                                                         subsampled_dft_matrix(n, sc.delay_rows));

  // L paths at distinct angles and distinct delays.
  Rng paths(derive_seed(seed, 2));
  auto angles = paths.sample_without_replacement(N, L);
  std::sort(angles.begin(), angles.end());
  const auto delays = paths.sample_without_replacement(n, L);
  sc.base.truth = Vec<cplx>::Zero(N * n);
  for (std::size_t p = 0; p < angles.size(); ++p) {
    sc.base.truth[angles[p] * n + delays[p]] = paths.complex_normal();
  }
  sc.channel = channel_matrix(sc.angle_basis, sc.delay_basis, sc.base.truth);
  sc.base.eval_blocks = N;
  sc.base.eval_block_len = n;
  // Angle sub-sampling aliases a path across angles at a fixed delay, so
  // the blocks of the model are delays: L active delays, one angle each.
  sc.base.model = std::make_unique<TransposedSparsity>(std::make_unique<HiSparsity>(n, N, L, 1), N, n);
  sc.base.flat_sparsity = L;
  return sc;
}

BlindDeconvScenario make_blind_deconv_scenario(Index N, Index E, Index N_d, Index mu, Index s, Index sigma,
                                               std::uint64_t seed) {
  if (N < 1 || E < 1 || N_d < 1) {
    throw ParameterError("blind deconvolution: N, E, N_d must be >= 1");
  }
  if (mu < 0 || mu > N_d) {
    throw ParameterError("blind deconvolution: mu=" + std::to_string(mu) + " outside [0, N_d=" + std::to_string(N_d) +
                         "]");
  }
  if (s < 0 || s > E) {
    throw ParameterError("blind deconvolution: s=" + std::to_string(s) + " outside [0, E=" + std::to_string(E) + "]");
  }
  if (sigma < 0 || sigma > N) {
    throw ParameterError("blind deconvolution: sigma=" + std::to_string(sigma) + " outside [0, N=" +
                         std::to_string(N) + "]");
  }
  BlindDeconvScenario sc;
  Rng books(derive_seed(seed, 1));
  std::vector<Eigen::MatrixXd> codebooks;
  for (Index p = 0; p < N_d; ++p) {
    codebooks.push_back(gaussian_matrix<double>(N, E, books) / std::sqrt(static_cast<double>(N)));
  }
  auto op = std::make_unique<LiftedConvolutionOperator<double>>(std::move(codebooks));

  Rng signal(derive_seed(seed, 2));
  sc.active_users = signal.sample_without_replacement(N_d, mu);
  std::sort(sc.active_users.begin(), sc.active_users.end());
  std::vector<Eigen::MatrixXd> w(static_cast<std::size_t>(N_d), Eigen::MatrixXd::Zero(E, N));
  for (Index p : sc.active_users) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(N);
    auto taps = signal.sample_without_replacement(N, sigma);
    std::sort(taps.begin(), taps.end());
    for (Index j : taps) {
      h[j] = signal.normal();
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(E);
    auto symbols = signal.sample_without_replacement(E, s);
    std::sort(symbols.begin(), symbols.end());
    for (Index e : symbols) {
      c[e] = signal.uniform() < 0.5 ? -1.0 : 1.0;
    }
    w[static_cast<std::size_t>(p)] = c * h.transpose();
    sc.messages.push_back(std::move(c));
    sc.channels.push_back(std::move(h));
  }
  sc.base.truth = op->lift(w);
  sc.base.op = std::move(op);
  sc.base.eval_blocks = N_d;
  sc.base.eval_block_len = E * N;
  sc.base.model = std::make_unique<TreeSparsity>(TreeSparsityProfile::uniform({N_d, E, N}, {mu, s, sigma}));
  sc.base.flat_sparsity = mu * s * sigma;
  return sc;
}

DemixScenario make_demix_scenario(Index N, Index n, Index s, Index r, Index m, std::uint64_t seed) {
  if (s < 0 || s > N) {
    throw ParameterError("demix scenario: s=" + std::to_string(s) + " outside [0, N=" + std::to_string(N) + "]");
  }
  if (r < 1 || r > n) {
    throw ParameterError("demix scenario: r=" + std::to_string(r) + " outside [1, n=" + std::to_string(n) + "]");
  }
  DemixScenario sc;
  sc.op = std::make_unique<GaussianDemixOperator>(gaussian_demix_operator(m, N, n, n, derive_seed(seed, 1)));
  Rng rng(derive_seed(seed, 2));
  sc.truth = BlockMatrixSignal::zeros(N, n, n, r, s);
  auto blocks = rng.sample_without_replacement(N, s);
  std::sort(blocks.begin(), blocks.end());
  for (Index b : blocks) {
    const Eigen::MatrixXcd u = gaussian_matrix<cplx>(n, r, rng);
    const Eigen::MatrixXcd v = gaussian_matrix<cplx>(n, r, rng);
    Eigen::MatrixXcd x = u * v.adjoint();
    x /= x.norm();
    sc.truth.blocks[static_cast<std::size_t>(b)] = std::move(x);
  }
  return sc;
}

template <typename Scalar>
Vec<Scalar> snr_noise(const Vec<Scalar>& y_clean, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) {
    if (snr_db > 0) {
      return Vec<Scalar>::Zero(y_clean.size());
    }
    throw ParameterError("snr_noise: SNR must not be -inf or NaN");
  }
  const double power = y_clean.squaredNorm();
  if (power == 0.0) {
    throw ParameterError("snr_noise: clean measurements are zero, SNR is undefined");
  }
  const double per_entry = power * std::pow(10.0, -snr_db / 10.0) / static_cast<double>(y_clean.size());
  const double scale = std::sqrt(per_entry);
  Rng rng(seed);
  Vec<Scalar> e(y_clean.size());
  for (Index i = 0; i < e.size(); ++i) {
    e[i] = scale * rng.gaussian<Scalar>();
  }
  return e;
}

template Vec<double> random_hisparse<double>(Index, Index, Index, Index, Rng&);
template Vec<cplx> random_hisparse<cplx>(Index, Index, Index, Index, Rng&);
template VectorScenario<double> make_gaussian_scenario<double>(Index, Index, Index, Index, Index, std::uint64_t);
template VectorScenario<cplx> make_gaussian_scenario<cplx>(Index, Index, Index, Index, Index, std::uint64_t);
template Vec<double> snr_noise<double>(const Vec<double>&, double, std::uint64_t);
template Vec<cplx> snr_noise<cplx>(const Vec<cplx>&, double, std::uint64_t);

}  // namespace hics
