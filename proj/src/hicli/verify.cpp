#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "../himeasure/combinations.hpp"
#include "hics/hibench.hpp"
#include "hics/hicli.hpp"
#include "hics/rip.hpp"

namespace hics {

namespace {

// Wraps an operator; with `flip` the adjoint comes back negated.
template <typename Scalar>
class AdjointProbe final : public MeasurementOperator<Scalar> {
 public:
  AdjointProbe(const MeasurementOperator<Scalar>& inner, bool flip)
      : MeasurementOperator<Scalar>(inner.block_count(), inner.block_len()), inner_(inner), flip_(flip) {}

  Index rows() const override { return inner_.rows(); }
  Vec<Scalar> apply(const Vec<Scalar>& x) const override { return inner_.apply(x); }
  Vec<Scalar> adjoint_apply(const Vec<Scalar>& y) const override {
    Vec<Scalar> z = inner_.adjoint_apply(y);
    return flip_ ? Vec<Scalar>(-z) : z;
  }

 private:
  const MeasurementOperator<Scalar>& inner_;
  bool flip_;
};

template <typename Scalar>
Vec<Scalar> random_vec(Index len, Rng& rng) {
  Vec<Scalar> v(len);
  for (Index i = 0; i < len; ++i) {
    v[i] = rng.gaussian<Scalar>();
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// |<Ax, y> - <x, A^* y>| relative to ||Ax|| ||y||, over a few random pairs.
template <typename Scalar>
PropertyResult adjoint_check(const std::string& name, const MeasurementOperator<Scalar>& op, bool flip,
                             std::uint64_t seed) {
  const AdjointProbe<Scalar> probe(op, flip);
  Rng rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const Vec<Scalar> x = random_vec<Scalar>(op.cols(), rng);
    const Vec<Scalar> y = random_vec<Scalar>(op.rows(), rng);
    const Vec<Scalar> ax = probe.apply(x);
    const Scalar lhs = y.dot(ax);  // conjugates y
    const Scalar rhs = probe.adjoint_apply(y).dot(x);
    worst = std::max(worst, std::abs(lhs - rhs) / (ax.norm() * y.norm()));
  }
  return {name, worst <= 1e-10, "relative mismatch " + fmt(worst)};
}

PropertyResult demix_adjoint_check(bool flip) {
  const GaussianDemixOperator op = gaussian_demix_operator(20, 3, 2, 2, 7);
  Rng rng(8);
  double worst = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    BlockMatrixSignal x = BlockMatrixSignal::zeros(3, 2, 2, 2, 3);
    for (auto& b : x.blocks) {
      for (Index k = 0; k < b.size(); ++k) {
        b.data()[k] = rng.complex_normal();
      }
    }
    const Eigen::VectorXd y = random_vec<double>(20, rng);
    const Eigen::VectorXd ax = op.apply(x);
    BlockMatrixSignal aty = op.adjoint_apply(y);
    if (flip) {
      aty = cplx(-1.0) * aty;
    }
    // Real inner product on the embedding: Re <X, A^* y>.
    double rhs = 0.0;
    for (Index i = 0; i < 3; ++i) {
      rhs += (aty.blocks[static_cast<std::size_t>(i)].conjugate().cwiseProduct(x.blocks[static_cast<std::size_t>(i)]))
                 .sum()
                 .real();
    }
    worst = std::max(worst, std::abs(ax.dot(y) - rhs) / (ax.norm() * y.norm()));
  }
  return {"adjoint_consistency.demix", worst <= 1e-10, "relative mismatch " + fmt(worst)};
}

PropertyResult hi_threshold_optimal() {
  const Index N = 4, n = 3, s = 2, sigma = 2;
  Rng rng(11);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd z = random_vec<double>(N * n, rng);
    const BlockedVector<double> p = hi_threshold(BlockedVector<double>(z, N, n), s, sigma);
    // Best captured energy over all supports.
    double best = 0.0;
    for (const auto& blocks : detail::combinations(N, s)) {
      double e = 0.0;
      for (Index b : blocks) {
        double bb = 0.0;
        for (const auto& in : detail::combinations(n, sigma)) {
          double v = 0.0;
          for (Index k : in) v += z[b * n + k] * z[b * n + k];
          bb = std::max(bb, v);
        }
        e += bb;
      }
      best = std::max(best, e);
    }
    worst = std::max(worst, std::abs(p.data().squaredNorm() - best));
  }
  return {"hi_threshold.matches_enumeration", worst <= 1e-12, "energy gap " + fmt(worst)};
}

PropertyResult hi_threshold_idempotent() {
  Rng rng(12);
  const Eigen::VectorXcd z = random_vec<cplx>(30, rng);
  const auto p = hi_threshold(BlockedVector<cplx>(z, 5, 6), 2, 3);
  const auto pp = hi_threshold(p, 2, 3);
  const double gap = (p.data() - pp.data()).norm();
  const bool structured = hi_support(p, 2, 3).is_hierarchical(2, 3);
  return {"hi_threshold.idempotent", gap == 0.0 && structured, "gap " + fmt(gap)};
}

PropertyResult tree_matches_two_level() {
  Rng rng(13);
  const Eigen::VectorXd z = random_vec<double>(24, rng);
  const Eigen::VectorXd a = tree_threshold(z, TreeSparsityProfile::two_level(4, 6, 2, 3));
  const Eigen::VectorXd b = hi_threshold(BlockedVector<double>(z, 4, 6), 2, 3).data();
  return {"tree_threshold.two_level_equals_hi_threshold", (a - b).norm() == 0.0, "gap " + fmt((a - b).norm())};
}

PropertyResult kronecker_dense() {
  Rng rng(14);
  const Eigen::MatrixXcd a = gaussian_matrix<cplx>(3, 4, rng);
  const Eigen::MatrixXcd b = gaussian_matrix<cplx>(2, 5, rng);
  const KroneckerOperator<cplx> op(a, b);
  const double gap = (op.to_dense() - kronecker_product<cplx>(a, b)).norm();
  return {"kronecker.matches_dense_product", gap <= 1e-12, "gap " + fmt(gap)};
}

PropertyResult dft_unitary() {
  const Eigen::MatrixXcd f = dft_matrix(8);
  const double gap = (f.adjoint() * f - Eigen::MatrixXcd::Identity(8, 8)).norm();
  return {"dft.unitary", gap <= 1e-12, "gap " + fmt(gap)};
}

PropertyResult rip_chain() {
  const DenseOperator<double> op = gaussian_operator<double>(10, 4, 3, 15);
  const RipReport lo = mc_hirip_lower_bound<double>(op, 2, 2, 50, 16);
  const RipReport ex = exact_hirip<double>(op, 2, 2);
  const RipReport up = coherence_hirip_bound<double>(op, 2, 2);
  return {"rip.lower_exact_upper_chain", rip_chain_holds(lo, ex, up),
          fmt(lo.delta) + " <= " + fmt(ex.delta) + " <= " + fmt(up.delta)};
}

PropertyResult rip_flat_dominates() {
  const DenseOperator<double> op = gaussian_operator<double>(10, 4, 3, 17);
  const double hi = exact_hirip<double>(op, 2, 2).delta;
  const double flat = exact_rip<double>(op, 4).delta;
  return {"rip.hierarchical_below_flat", hi <= flat + 1e-12, fmt(hi) + " vs " + fmt(flat)};
}

PropertyResult hihtp_recovers() {
  const auto sc = make_gaussian_scenario<double>(8, 6, 2, 2, 40, 18);
  const auto r = hi_htp<double>(sc.op->apply(sc.truth), *sc.op, 2, 2);
  const double err = (r.estimate.data() - sc.truth).norm();
  return {"hihtp.noiseless_recovery", err <= 1e-8, "error " + fmt(err)};
}

PropertyResult trial_deterministic() {
  ExperimentSpec spec;
  spec.N = 6;
  spec.n = 5;
  spec.m = 25;
  spec.s = 2;
  spec.sigma = 2;
  spec.solver = SolverKind::hiiht;
  spec.solver_config.max_iters = 50;
  const auto a = run_trial(spec, 19).record;
  const auto b = run_trial(spec, 19).record;
  const bool same = a.l2_error == b.l2_error && a.iterations == b.iterations;
  return {"experiment.seed_determinism", same, "l2 " + fmt(a.l2_error) + " vs " + fmt(b.l2_error)};
}

}  // namespace

std::vector<PropertyResult> run_verify_suite(const VerifyOptions& options) {
  const bool flip = options.inject_adjoint_bug;
  std::vector<PropertyResult> out;
  const auto guard = [&](const std::string& name, const std::function<PropertyResult()>& f) {
    try {
      out.push_back(f());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };

  guard("adjoint_consistency.dense", [&] {
    return adjoint_check<double>("adjoint_consistency.dense", gaussian_operator<double>(12, 4, 5, 1), flip, 101);
  });
  guard("adjoint_consistency.kronecker", [&] {
    Rng rng(2);
    const KroneckerOperator<cplx> op(gaussian_matrix<cplx>(3, 4, rng), gaussian_matrix<cplx>(5, 6, rng));
    return adjoint_check<cplx>("adjoint_consistency.kronecker", op, flip, 102);
  });
  guard("adjoint_consistency.hierarchical", [&] {
    Rng rng(3);
    std::vector<Mat<cplx>> blocks;
    for (int i = 0; i < 4; ++i) blocks.push_back(gaussian_matrix<cplx>(3, 5, rng));
    const HierarchicalOperator<cplx> op(gaussian_matrix<cplx>(2, 4, rng), std::move(blocks));
    return adjoint_check<cplx>("adjoint_consistency.hierarchical", op, flip, 103);
  });
  guard("adjoint_consistency.subsampled_fourier", [&] {
    return adjoint_check<cplx>("adjoint_consistency.subsampled_fourier", subsampled_fourier_operator(16, 6, 4), flip,
                               104);
  });
  guard("adjoint_consistency.lifted_convolution", [&] {
    Rng rng(5);
    std::vector<Mat<double>> codebooks;
    for (int p = 0; p < 3; ++p) codebooks.push_back(gaussian_matrix<double>(9, 4, rng));
    return adjoint_check<double>("adjoint_consistency.lifted_convolution", LiftedConvolutionOperator<double>(codebooks),
                                 flip, 105);
  });
  guard("adjoint_consistency.demix", [&] { return demix_adjoint_check(flip); });
  guard("hi_threshold.matches_enumeration", hi_threshold_optimal);
  guard("hi_threshold.idempotent", hi_threshold_idempotent);
  guard("tree_threshold.two_level_equals_hi_threshold", tree_matches_two_level);
  guard("kronecker.matches_dense_product", kronecker_dense);
  guard("dft.unitary", dft_unitary);
  guard("rip.lower_exact_upper_chain", rip_chain);
  guard("rip.hierarchical_below_flat", rip_flat_dominates);
  guard("hihtp.noiseless_recovery", hihtp_recovers);
  guard("experiment.seed_determinism", trial_deterministic);
  return out;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  const auto results = run_verify_suite(options);
  Index failed = 0;
  for (const auto& r : results) {
    if (r.passed) {
      out << "PASS " << r.name << '\n';
    } else {
      out << "FAIL " << r.name << ": " << r.detail << '\n';
      err << "ERROR: property '" << r.name << "' failed: " << r.detail << '\n';
      ++failed;
    }
  }
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " properties passed\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

}  // namespace hics
