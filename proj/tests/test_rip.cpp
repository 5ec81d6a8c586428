#include <doctest.h>

#include "hics/operator_io.hpp"
#include "hics/rip.hpp"
#include "oracles.hpp"

using namespace hics;

namespace {

Eigen::MatrixXd normalized_cols(Eigen::MatrixXd m) {
  m.colwise().normalize();
  return m;
}

// Blocks E_i C with E_i isometric embeddings into mutually orthogonal
// coordinate subspaces: block i writes to rows [i p, (i+1) p).
Eigen::MatrixXd orthogonal_embedding(const Eigen::MatrixXd& c, Index N) {
  const Index p = c.rows();
  const Index n = c.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N * p, N * n);
  for (Index i = 0; i < N; ++i) a.block(i * p, i * n, p, n) = c;
  return a;
}

double brute_sparse_sv(const Eigen::MatrixXd& b, Index sigma) {
  double best = 0.0;
  for (const auto& r : oracle::subsets(b.rows(), sigma)) {
    for (const auto& c : oracle::subsets(b.cols(), sigma)) {
      best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXd>(b(r, c)).singularValues()[0]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("support counts") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(5, 0) == 1.0);
  CHECK(binomial(5, 6) == 0.0);
  CHECK(binomial(60, 30) == doctest::Approx(1.1826458156486115e17));
  CHECK(hi_support_count(4, 5, 2, 2) == 6.0 * 100.0);
}

TEST_CASE("mutual coherence") {
  CHECK(mutual_coherence<double>(Eigen::MatrixXd::Identity(4, 4)).value == 0.0);
  Eigen::MatrixXd dup = Eigen::MatrixXd::Identity(3, 3);
  dup.col(2) = dup.col(0);
  CHECK(mutual_coherence<double>(dup).value == doctest::Approx(1.0));

  Rng rng(1);
  const Eigen::MatrixXd a = normalized_cols(oracle::random_mat<double>(4, 6, rng));
  double scan = 0.0;
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j)
      if (i != j) scan = std::max(scan, std::abs(a.col(i).dot(a.col(j))));
  const CoherenceValue mu = mutual_coherence<double>(a);
  CHECK(mu.value == doctest::Approx(scan).epsilon(1e-14));
  CHECK_FALSE(mu.renormalized);

  const CoherenceValue scaled = mutual_coherence<double>(Eigen::MatrixXd(3.0 * a));
  CHECK(scaled.renormalized);
  CHECK(scaled.value == doctest::Approx(scan).epsilon(1e-12));

  Eigen::MatrixXd zero = a;
  zero.col(3).setZero();
  CHECK_THROWS_AS(mutual_coherence<double>(zero), std::invalid_argument);
}

TEST_CASE("sparse singular value") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << -4.0, 2.0, 1.0;
  CHECK(sparse_singular_value<double>(d, 1) == 4.0);

  Rng rng(2);
  const Eigen::MatrixXd b = oracle::random_mat<double>(4, 4, rng);
  CHECK(sparse_singular_value<double>(b, 4) ==
        doctest::Approx(Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues()[0]).epsilon(1e-12));
  CHECK(sparse_singular_value<double>(b, 2) == doctest::Approx(brute_sparse_sv(b, 2)).epsilon(1e-12));
  CHECK(sparse_singular_value<double>(b, 0) == 0.0);
  CHECK_THROWS_AS(sparse_singular_value<double>(b, 5), std::invalid_argument);
  CHECK_THROWS_AS(sparse_singular_value<double>(oracle::random_mat<double>(30, 30, rng), 8), BudgetError);
}

TEST_CASE("sub-coherence and block coherence") {
  Rng rng(3);
  SUBCASE("orthonormal blocks") {
    const DenseOperator<double> op(Eigen::MatrixXd::Identity(6, 6), 2, 3);
    CHECK(sub_coherence<double>(op).value == 0.0);
    CHECK(sparse_block_coherence<double>(op, 2) == 0.0);
  }
  SUBCASE("duplicated column in one block") {
    Eigen::MatrixXd m = normalized_cols(oracle::random_mat<double>(5, 6, rng));
    m.col(4) = m.col(3);
    CHECK(sub_coherence<double>(DenseOperator<double>(m, 2, 3)).value == doctest::Approx(1.0));
  }
  SUBCASE("random blocks against per-block oracles") {
    const Eigen::MatrixXd m = normalized_cols(oracle::random_mat<double>(5, 9, rng));
    const DenseOperator<double> op(m, 3, 3);
    double nu = 0.0;
    double mu = 0.0;
    for (Index i = 0; i < 3; ++i) {
      const Eigen::MatrixXd bi = m.middleCols(i * 3, 3);
      const Eigen::MatrixXd g = bi.transpose() * bi;
      for (Index r = 0; r < 3; ++r)
        for (Index c = r + 1; c < 3; ++c) nu = std::max(nu, std::abs(g(r, c)));
      for (Index j = 0; j < 3; ++j) {
        if (j != i) mu = std::max(mu, brute_sparse_sv(bi.transpose() * m.middleCols(j * 3, 3), 2));
      }
    }
    CHECK(sub_coherence<double>(op).value == doctest::Approx(nu).epsilon(1e-12));
    CHECK(sparse_block_coherence<double>(op, 2) == doctest::Approx(mu).epsilon(1e-12));
  }
  SUBCASE("orthogonal subspaces and single block") {
    const Eigen::MatrixXd c = oracle::random_mat<double>(3, 4, rng);
    CHECK(sparse_block_coherence<double>(DenseOperator<double>(orthogonal_embedding(c, 3), 3, 4), 2) == 0.0);
    CHECK(sparse_block_coherence<double>(DenseOperator<double>(c), 2) == 0.0);
  }
}

TEST_CASE("exact HiRIP") {
  Rng rng(4);
  SUBCASE("orthonormal columns") {
    const DenseOperator<cplx> op(Eigen::MatrixXcd::Identity(12, 12), 3, 4);
    const RipReport r = exact_hirip<cplx>(op, 2, 3);
    CHECK(r.delta <= 1e-14);
    CHECK(r.kind == RipKind::exact);
    CHECK(r.supports_examined == 3 * 16);
  }
  SUBCASE("matches brute force and stays below flat") {
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::MatrixXd a = oracle::random_mat<double>(8, 12, rng) / std::sqrt(8.0);
      const double exact = exact_hirip<double>(a, 3, 4, 2, 2).delta;
      CHECK(exact == doctest::Approx(oracle::hirip<double>(a, 3, 4, 2, 2)).epsilon(1e-12));
      const double flat = exact_rip<double>(a, 4).delta;
      CHECK(flat == doctest::Approx(oracle::flat_rip<double>(a, 4)).epsilon(1e-12));
      CHECK(exact <= flat + 1e-10);
    }
  }
  SUBCASE("complex brute force") {
    const Eigen::MatrixXcd a = oracle::random_mat<cplx>(6, 9, rng) / std::sqrt(6.0);
    CHECK(exact_hirip<cplx>(a, 3, 3, 2, 1).delta == doctest::Approx(oracle::hirip<cplx>(a, 3, 3, 2, 1)).epsilon(1e-12));
  }
  SUBCASE("duplicated column") {
    Eigen::MatrixXd a = normalized_cols(oracle::random_mat<double>(6, 8, rng));
    a.col(1) = a.col(0);
    CHECK(exact_hirip<double>(a, 2, 4, 1, 2).delta >= 1.0 - 1e-12);
  }
  SUBCASE("budget and bounds") {
    const DenseOperator<double> big = gaussian_operator<double>(10, 20, 10, 5);
    try {
      exact_hirip<double>(big, 4, 3);
      FAIL("expected a budget error");
    } catch (const BudgetError& e) {
      CHECK(e.count() == hi_support_count(20, 10, 4, 3));
      CHECK(e.cap() == kDefaultSupportBudget);
    }
    CHECK_THROWS_AS(exact_hirip<double>(big, 21, 1), std::invalid_argument);
    CHECK(exact_hirip<double>(big, 2, 2, 1e9).supports_examined == static_cast<std::uint64_t>(hi_support_count(20, 10, 2, 2)));
  }
}

TEST_CASE("Monte Carlo lower bound") {
  Rng rng(5);
  const DenseOperator<double> op = gaussian_operator<double>(8, 3, 3, 6);
  const double exact = exact_hirip<double>(op, 1, 2).delta;
  // 9 supports; 400 draws cover all of them.
  CHECK(mc_hirip_lower_bound<double>(op, 1, 2, 400, 7).delta == doctest::Approx(exact).epsilon(1e-14));
  double prev = 0.0;
  for (Index trials : {1, 3, 10, 100}) {
    const double d = mc_hirip_lower_bound<double>(op, 2, 2, trials, 8).delta;
    CHECK(d >= prev);
    CHECK(d <= exact_hirip<double>(op, 2, 2).delta + 1e-12);
    prev = d;
  }
  CHECK(mc_hirip_lower_bound<double>(op, 2, 2, 10, 8).delta == mc_hirip_lower_bound<double>(op, 2, 2, 10, 8).delta);
  CHECK(mc_hirip_lower_bound<double>(DenseOperator<double>(Eigen::MatrixXd::Identity(9, 9), 3, 3), 2, 2, 20, 1).delta <=
        1e-14);
  CHECK_THROWS_AS(mc_hirip_lower_bound<double>(op, 1, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("coherence bound") {
  Rng rng(6);
  SUBCASE("dominates the exact constant") {
    for (int rep = 0; rep < 10; ++rep) {
      const DenseOperator<double> op = gaussian_operator<double>(20, 4, 4, 100 + static_cast<std::uint64_t>(rep));
      const RipReport ex = exact_hirip<double>(op, 2, 2);
      const RipReport up = coherence_hirip_bound<double>(op, 2, 2);
      CHECK(ex.delta <= up.delta + 1e-10);
      CHECK(up.variant == "block_rip");
    }
  }
  SUBCASE("s = 1 reduces to the block RIP") {
    const DenseOperator<double> op = gaussian_operator<double>(10, 3, 4, 9);
    double sup = 0.0;
    for (Index i = 0; i < 3; ++i) sup = std::max(sup, oracle::flat_rip<double>(op.block_operator(i), 2));
    CHECK(coherence_hirip_bound<double>(op, 1, 2).delta == doctest::Approx(sup).epsilon(1e-12));
  }
  SUBCASE("orthogonal embedding is independent of s") {
    const Eigen::MatrixXd c = oracle::random_mat<double>(5, 4, rng) / std::sqrt(5.0);
    const DenseOperator<double> op(orthogonal_embedding(c, 4), 4, 4);
    const double dc = oracle::flat_rip<double>(c, 2);
    for (Index s = 1; s <= 4; ++s) {
      CHECK(coherence_hirip_bound<double>(op, s, 2).delta == doctest::Approx(dc).epsilon(1e-12));
      CHECK(exact_hirip<double>(op, s, 2).delta <= dc + 1e-10);
    }
  }
  SUBCASE("normalized variant") {
    const Eigen::MatrixXd m = normalized_cols(oracle::random_mat<double>(12, 12, rng));
    const DenseOperator<double> op(m, 3, 4);
    const RipReport r = coherence_hirip_bound<double>(op, 2, 2, CoherenceVariant::normalized);
    CHECK(r.variant == "normalized");
    CHECK(r.delta == doctest::Approx(r.constituents.at("sub_coherence") + r.constituents.at("mu_block")));
    CHECK(exact_hirip<double>(op, 2, 2).delta <= r.delta + 1e-10);
    CHECK_THROWS_AS(coherence_hirip_bound<double>(DenseOperator<double>(Eigen::MatrixXd(2.0 * m), 3, 4), 2, 2,
                                                  CoherenceVariant::normalized),
                    std::invalid_argument);
  }
}

TEST_CASE("inherited bound") {
  Rng rng(7);
  SUBCASE("orthonormal factors") {
    const auto k = kronecker_operator<double>(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(4, 4));
    CHECK(inherited_hirip_bound<double>(k, 2, 2).delta <= 1e-14);
  }
  SUBCASE("formula with isometric blocks") {
    const Eigen::MatrixXd a = oracle::random_mat<double>(4, 3, rng) / 2.0;
    const auto k = kronecker_operator<double>(a, Eigen::MatrixXd::Identity(3, 3));
    CHECK(inherited_hirip_bound<double>(k, 2, 2).delta == doctest::Approx(oracle::flat_rip<double>(a, 2)).epsilon(1e-12));
  }
  SUBCASE("dominates the exact constant") {
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::MatrixXd a = oracle::random_mat<double>(6, 4, rng) / std::sqrt(6.0);
      const Eigen::MatrixXd b = oracle::random_mat<double>(6, 4, rng) / std::sqrt(6.0);
      const auto k = kronecker_operator<double>(a, b);
      const RipReport bound = inherited_hirip_bound<double>(k, 2, 2);
      CHECK(exact_hirip<double>(k, 2, 2).delta <= bound.delta + 1e-10);
      const double da = oracle::flat_rip<double>(a, 2);
      const double db = oracle::flat_rip<double>(b, 2);
      CHECK(bound.delta == doctest::Approx(da + db + da * db).epsilon(1e-12));

      std::vector<Eigen::MatrixXd> blocks;
      for (int i = 0; i < 4; ++i) blocks.push_back(oracle::random_mat<double>(6, 4, rng) / std::sqrt(6.0));
      const auto h = hierarchical_operator<double>(a, blocks);
      CHECK(exact_hirip<double>(h, 2, 2).delta <= inherited_hirip_bound<double>(h, 2, 2).delta + 1e-10);
    }
  }
}

TEST_CASE("incoherent blocks bound") {
  Rng rng(8);
  SUBCASE("all constituents orthonormal") {
    std::vector<Eigen::MatrixXd> blocks;
    for (Index i = 0; i < 4; ++i) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(16, 4);
      b.middleRows(i * 4, 4).setIdentity();
      blocks.push_back(b);
    }
    const auto h = hierarchical_operator<double>(Eigen::MatrixXd::Identity(4, 4), blocks);
    CHECK(incoherent_blocks_bound<double>(h, 2, 2, 2).delta <= 1e-14);
  }
  SUBCASE("orthogonal subspaces make t irrelevant") {
    const Eigen::MatrixXd c = oracle::random_mat<double>(5, 4, rng) / std::sqrt(5.0);
    std::vector<Eigen::MatrixXd> blocks;
    for (Index i = 0; i < 4; ++i) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(20, 4);
      b.middleRows(i * 5, 5) = c;
      blocks.push_back(b);
    }
    const auto h = hierarchical_operator<double>(oracle::random_mat<double>(3, 4, rng) / std::sqrt(3.0), blocks);
    const double t1 = incoherent_blocks_bound<double>(h, 1, 1, 1).delta;
    for (Index t = 2; t <= 4; ++t) CHECK(incoherent_blocks_bound<double>(h, 1, 1, t).delta == doctest::Approx(t1));
    CHECK(incoherent_blocks_bound<double>(h, 1, 1, 1).constituents.at("mu_block_2sigma_unmixed") <= 1e-14);
  }
  SUBCASE("dominates the exact constant") {
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::MatrixXd a = oracle::random_mat<double>(6, 4, rng) / std::sqrt(6.0);
      std::vector<Eigen::MatrixXd> blocks;
      for (int i = 0; i < 4; ++i) blocks.push_back(oracle::random_mat<double>(8, 4, rng) / std::sqrt(8.0));
      const auto h = hierarchical_operator<double>(a, blocks);
      for (Index t = 1; t <= 2; ++t) {
        const RipReport r = incoherent_blocks_bound<double>(h, 2, 2, t);
        CHECK(r.s == 2 * t);
        CHECK(exact_hirip<double>(h, 2 * t, 2).delta <= r.delta + 1e-10);
      }
      CHECK(incoherent_blocks_bound<double>(h, 2, 2, 1).delta >= inherited_hirip_bound<double>(h, 2, 2).delta - 1e-12);
    }
  }
  SUBCASE("parameter checks") {
    std::vector<Eigen::MatrixXd> blocks(4, Eigen::MatrixXd::Identity(4, 4));
    const auto h = hierarchical_operator<double>(Eigen::MatrixXd::Identity(4, 4), blocks);
    CHECK_THROWS_AS(incoherent_blocks_bound<double>(h, 2, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(incoherent_blocks_bound<double>(h, 3, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(incoherent_blocks_bound<double>(h, 1, 3, 1), std::invalid_argument);
  }
}

TEST_CASE("sigma-RIP of the blocks from the HiRIP") {
  Rng rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd a = normalized_cols(oracle::random_mat<double>(3, 4, rng));
    std::vector<Eigen::MatrixXd> blocks;
    double sup = 0.0;
    for (int i = 0; i < 4; ++i) {
      blocks.push_back(oracle::random_mat<double>(5, 4, rng) / std::sqrt(5.0));
      sup = std::max(sup, oracle::flat_rip<double>(blocks.back(), 2));
    }
    const auto h = hierarchical_operator<double>(a, blocks);
    CHECK(sup <= exact_hirip<double>(h, 1, 2).delta + 1e-10);
  }
}

TEST_CASE("RIP implies a nuclear norm isometry") {
  Rng rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd a = oracle::random_mat<double>(8, 6, rng) / std::sqrt(8.0);
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Index s = 2;
    // Positive definite X on a principal s x s block.
    auto rows = rng.sample_without_replacement(6, 2 * s);
    const std::vector<Index> S(rows.begin(), rows.begin() + s);
    const std::vector<Index> T(rows.begin() + s, rows.end());
    const Eigen::MatrixXd g = oracle::random_mat<double>(s, s, rng);
    const Eigen::MatrixXd pd = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(s, s);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 6);
    x(S, S) = pd;
    const double nuc = pd.trace();
    CHECK(std::abs((ata.cwiseProduct(x)).sum() - nuc) <= oracle::flat_rip<double>(a, s) * nuc + 1e-12);

    // Disjoint row and column sets.
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(6, 6);
    y(S, T) = oracle::random_mat<double>(s, s, rng);
    const double ynuc = Eigen::JacobiSVD<Eigen::MatrixXd>(y).singularValues().sum();
    CHECK(std::abs((ata.cwiseProduct(y)).sum()) <= oracle::flat_rip<double>(a, 2 * s) * ynuc + 1e-12);
  }
}

TEST_CASE("Kronecker RIP floor") {
  // The floor needs unit-norm columns: then (A (x) B)(u (x) e_j) has the norm of A u.
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd a = normalized_cols(oracle::random_mat<double>(4, 3, rng));
    const Eigen::MatrixXd b = normalized_cols(oracle::random_mat<double>(4, 3, rng));
    const double dk = exact_rip<double>(kronecker_operator<double>(a, b), 2).delta;
    CHECK(dk >= std::max(oracle::flat_rip<double>(a, 2), oracle::flat_rip<double>(b, 2)) - 1e-10);
  }
}

TEST_CASE("reports") {
  const DenseOperator<double> op = gaussian_operator<double>(12, 4, 4, 12);
  const RipReport lo = mc_hirip_lower_bound<double>(op, 2, 2, 30, 1);
  const RipReport ex = exact_hirip<double>(op, 2, 2);
  const RipReport up = coherence_hirip_bound<double>(op, 2, 2);
  CHECK(rip_chain_holds(lo, ex, up));
  RipReport broken = up;
  broken.delta = ex.delta - 1e-6;
  CHECK_FALSE(rip_chain_holds(lo, ex, broken));

  const RipReport back = rip_report_from_json(rip_report_to_json(up));
  CHECK(back.delta == up.delta);
  CHECK(back.kind == up.kind);
  CHECK(back.variant == up.variant);
  CHECK(back.constituents == up.constituents);
  CHECK(std::string(to_string(RipKind::monte_carlo_lower_bound)) == "monte_carlo_lower_bound");
}
