#include <doctest.h>

#include "hics/hisignal.hpp"
#include "oracles.hpp"

using namespace hics;

namespace {

BlockMatrixSignal random_block_signal(Index N, Index rows, Index cols, Rng& rng, Index rank = -1) {
  BlockMatrixSignal x = BlockMatrixSignal::zeros(N, rows, cols, rank < 0 ? std::min(rows, cols) : rank, N);
  for (auto& b : x.blocks) {
    if (rank < 0) {
      b = oracle::random_mat<cplx>(rows, cols, rng);
    } else {
      b = oracle::random_mat<cplx>(rows, rank, rng) * oracle::random_mat<cplx>(rank, cols, rng);
    }
  }
  return x;
}

double distance(const BlockMatrixSignal& a, const BlockMatrixSignal& b) { return (a - b).frobenius_norm(); }

}  // namespace

TEST_CASE("blocked vector layout") {
  BlockedVector<double> x(Eigen::VectorXd::LinSpaced(6, 0, 5), 3, 2);
  CHECK(x.block(1)[0] == 2.0);
  CHECK(x.block(2)[1] == 5.0);
  CHECK_THROWS_AS(BlockedVector<double>(Eigen::VectorXd::Zero(5), 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(BlockedVector<double>(0, 2), std::invalid_argument);
}

TEST_CASE("top_k_threshold") {
  CHECK(top_k_threshold<double>(Eigen::Vector3d::Zero(), 2) == Eigen::Vector3d::Zero());
  CHECK(top_k_threshold<double>(Eigen::Vector3d(3, -1, 2), 2) == Eigen::Vector3d(3, 0, 2));
  CHECK_THROWS_AS(top_k_threshold<double>(Eigen::Vector3d(1, 2, 3), 4), std::invalid_argument);

  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::VectorXd z = oracle::random_vec<double>(6, rng);
    const Eigen::VectorXd p = top_k_threshold<double>(z, 3);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : oracle::subsets(6, 3)) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(6);
      for (Index i : c) r[i] = z[i];
      best = std::min(best, (z - r).norm());
    }
    CHECK((z - p).norm() == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("hi_threshold examples") {
  SUBCASE("fixes hierarchically sparse input") {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(12);
    z[1] = 3;
    z[2] = -1;
    z[9] = 2;
    const auto p = hi_threshold(BlockedVector<double>(z, 4, 3), 2, 2);
    CHECK(p.data() == z);
  }
  SUBCASE("all-ones tie goes to the lowest index") {
    const auto p = hi_threshold(BlockedVector<double>(Eigen::VectorXd::Ones(6), 3, 2), 1, 1);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
    expected[0] = 1;
    CHECK(p.data() == expected);
  }
  SUBCASE("parameter bounds") {
    BlockedVector<double> z(Eigen::VectorXd::Ones(6), 3, 2);
    CHECK_THROWS_AS(hi_threshold(z, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(hi_threshold(z, 1, 3), std::invalid_argument);
    CHECK(hi_threshold(z, 0, 1).data().isZero());
    CHECK(hi_threshold(z, 2, 0).data().isZero());
  }
  SUBCASE("random instance matches enumeration") {
    Rng rng(2);
    const Eigen::VectorXd z = oracle::random_vec<double>(20, rng);
    const auto p = hi_threshold(BlockedVector<double>(z, 4, 5), 2, 2);
    CHECK((z - p.data()).norm() == doctest::Approx(oracle::best_hisparse_distance<double>(z, 4, 5, 2, 2)).epsilon(1e-12));
  }
}

TEST_CASE("hi_threshold properties over random instances") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Index N = 1 + rng.index(5);
    const Index n = 1 + rng.index(6);
    const Index s = rng.index(std::min<Index>(2, N) + 1);
    const Index sigma = rng.index(std::min<Index>(3, n) + 1);
    const bool complex = rep % 2 == 1;
    CAPTURE(N);
    CAPTURE(n);
    CAPTURE(s);
    CAPTURE(sigma);
    if (complex) {
      const Eigen::VectorXcd z = oracle::random_vec<cplx>(N * n, rng);
      const auto p = hi_threshold(BlockedVector<cplx>(z, N, n), s, sigma);
      CHECK(std::abs((z - p.data()).norm() - oracle::best_hisparse_distance<cplx>(z, N, n, s, sigma)) <= 1e-12);
      CHECK(hi_threshold(p, s, sigma).data() == p.data());
      CHECK(p.norm() <= z.norm() + 1e-15);
    } else {
      const Eigen::VectorXd z = oracle::random_vec<double>(N * n, rng);
      const auto p = hi_threshold(BlockedVector<double>(z, N, n), s, sigma);
      CHECK(std::abs((z - p.data()).norm() - oracle::best_hisparse_distance<double>(z, N, n, s, sigma)) <= 1e-12);
      CHECK(hi_threshold(p, s, sigma).data() == p.data());
      const HiSupport supp = hi_support(p, s, sigma);
      CHECK(supp.block_count() <= s);
      for (const auto& [b, entries] : supp.entries) CHECK(static_cast<Index>(entries.size()) <= sigma);
      // Norm is preserved only when nothing was cut.
      const bool sparse_input = (z - p.data()).norm() == 0.0;
      CHECK((p.norm() < z.norm()) != sparse_input);
    }
  }
}

TEST_CASE("hi_support") {
  CHECK(hi_support(BlockedVector<double>(4, 5), 2, 2).empty());
  BlockedVector<double> one(4, 5);
  one.block(2)[3] = -0.5;
  HiSupport expected;
  expected.entries[2] = {3};
  CHECK(hi_support(one, 1, 1) == expected);
  CHECK(hi_support(one, 3, 4) == expected);

  Rng rng(4);
  const BlockedVector<double> z(oracle::random_vec<double>(20, rng), 4, 5);
  const HiSupport supp = hi_support(z, 2, 3);
  const auto p = hi_threshold(z, 2, 3);
  for (Index b = 0; b < 4; ++b) {
    for (Index e = 0; e < 5; ++e) {
      CHECK(supp.contains(b, e) == (p.block(b)[e] != 0.0));
    }
  }
  CHECK(HiSupport::from_flat(supp.flat(5), 5) == supp);
}

TEST_CASE("tree_threshold") {
  Rng rng(5);
  SUBCASE("two-level profile equals hi_threshold") {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::VectorXd z = oracle::random_vec<double>(20, rng);
      const Eigen::VectorXd a = tree_threshold<double>(z, TreeSparsityProfile::two_level(4, 5, 2, 2));
      CHECK(a == hi_threshold(BlockedVector<double>(z, 4, 5), 2, 2).data());
    }
  }
  SUBCASE("single node equals top-k") {
    const Eigen::VectorXcd z = oracle::random_vec<cplx>(7, rng);
    CHECK(tree_threshold<cplx>(z, TreeSparsityProfile::uniform({7}, {3})) == top_k_threshold<cplx>(z, 3));
  }
  SUBCASE("three levels with unit sparsities keep the best single entry") {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::VectorXd z = oracle::random_vec<double>(8, rng);
      const Eigen::VectorXd p = tree_threshold<double>(z, TreeSparsityProfile::uniform({2, 2, 2}, {1, 1, 1}));
      double best = std::numeric_limits<double>::infinity();
      Index arg = -1;
      for (Index i = 0; i < 8; ++i) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(8);
        r[i] = z[i];
        if ((z - r).norm() < best) {
          best = (z - r).norm();
          arg = i;
        }
      }
      CHECK((p.array() != 0.0).count() == 1);
      CHECK(p[arg] == z[arg]);
    }
  }
  SUBCASE("idempotent") {
    const TreeSparsityProfile prof = TreeSparsityProfile::uniform({3, 4, 5}, {2, 2, 3});
    const Eigen::VectorXd z = oracle::random_vec<double>(60, rng);
    const Eigen::VectorXd p = tree_threshold<double>(z, prof);
    CHECK(tree_threshold<double>(p, prof) == p);
    CHECK((p.array() != 0.0).count() <= 2 * 2 * 3);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(tree_threshold<double>(Eigen::VectorXd::Ones(5), TreeSparsityProfile::two_level(2, 2, 1, 1)),
                    std::invalid_argument);
  }
  SUBCASE("profile invariants") {
    CHECK_THROWS_AS(TreeSparsityProfile::uniform({3}, {4}), std::invalid_argument);
    CHECK(TreeSparsityProfile::uniform({3, 4, 5}, {1, 1, 1}).leaf_count() == 60);
    CHECK(TreeSparsityProfile::uniform({3, 4, 5}, {1, 1, 1}).depth() == 3);
  }
}

TEST_CASE("restrict_to_support") {
  Rng rng(6);
  const BlockedVector<double> x(oracle::random_vec<double>(12, rng), 3, 4);
  HiSupport full;
  for (Index b = 0; b < 3; ++b) full.entries[b] = {0, 1, 2, 3};
  CHECK(restrict_to_support(x, full).data() == x.data());
  CHECK(restrict_to_support(x, HiSupport{}).data().isZero());

  HiSupport omega;
  omega.entries[0] = {1};
  omega.entries[2] = {0, 3};
  const auto r = restrict_to_support(x, omega);
  for (Index b = 0; b < 3; ++b) {
    for (Index e = 0; e < 4; ++e) {
      CHECK(r.block(b)[e] == (omega.contains(b, e) ? x.block(b)[e] : 0.0));
    }
  }
  CHECK(restrict_to_support(r, omega).data() == r.data());

  HiSupport bad;
  bad.entries[3] = {0};
  CHECK_THROWS_AS(restrict_to_support(x, bad), std::invalid_argument);
  bad.entries.clear();
  bad.entries[0] = {4};
  CHECK_THROWS_AS(restrict_to_support(x, bad), std::invalid_argument);
}

TEST_CASE("rank_project") {
  Rng rng(7);
  const Eigen::VectorXcd u = oracle::random_vec<cplx>(4, rng);
  const Eigen::VectorXcd v = oracle::random_vec<cplx>(3, rng);
  const Eigen::MatrixXcd rho = u * v.adjoint();
  CHECK((rank_project(rho, 1) - rho).norm() <= 1e-12);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d.diagonal() << 3.0, 2.0, 1.0;
  Eigen::MatrixXcd expected = d;
  expected(2, 2) = 0.0;
  CHECK((rank_project(d, 2) - expected).norm() <= 1e-12);

  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXcd m = oracle::random_mat<cplx>(4, 4, rng);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
    const Eigen::MatrixXcd p = rank_project(m, 2);
    CHECK((m - p).norm() == doctest::Approx(std::hypot(sv[2], sv[3])).epsilon(1e-10));
    CHECK(numerical_rank(p) <= 2);
  }
  CHECK(rank_project(d, 0).isZero());
  CHECK_THROWS_AS(rank_project(d, -1), std::invalid_argument);
}

TEST_CASE("demix_threshold") {
  Rng rng(8);
  SUBCASE("fixes block-sparse low-rank input") {
    BlockMatrixSignal x = random_block_signal(4, 3, 3, rng, 1);
    x.blocks[1].setZero();
    x.blocks[3].setZero();
    CHECK(distance(demix_threshold(x, 2, 1), x) <= 1e-12);
  }
  SUBCASE("keeps the blocks of largest norm") {
    BlockMatrixSignal x = BlockMatrixSignal::zeros(3, 2, 2, 1, 2);
    x.blocks[0](0, 0) = 5;
    x.blocks[1](0, 0) = 1;
    x.blocks[2](0, 0) = 3;
    CHECK(demix_threshold(x, 2, 1).nonzero_blocks() == std::vector<Index>{0, 2});
  }
  SUBCASE("matches block x SVD enumeration") {
    for (int rep = 0; rep < 50; ++rep) {
      const BlockMatrixSignal x = random_block_signal(3, 2, 2, rng);
      double best = std::numeric_limits<double>::infinity();
      for (Index keep = 0; keep < 3; ++keep) {
        double d2 = 0.0;
        for (Index i = 0; i < 3; ++i) {
          const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(x.blocks[static_cast<std::size_t>(i)]).singularValues();
          d2 += i == keep ? sv[1] * sv[1] : sv.squaredNorm();
        }
        best = std::min(best, std::sqrt(d2));
      }
      const BlockMatrixSignal p = demix_threshold(x, 1, 1);
      CHECK(distance(p, x) == doctest::Approx(best).epsilon(1e-12));
      CHECK(distance(demix_threshold(p, 1, 1), p) <= 1e-12);
      CHECK(p.nonzero_blocks().size() <= 1);
      for (const auto& b : p.blocks) CHECK(numerical_rank(b) <= 1);
    }
  }
  SUBCASE("bounds") {
    const BlockMatrixSignal x = random_block_signal(3, 2, 2, rng);
    CHECK_THROWS_AS(demix_threshold(x, 4, 1), std::invalid_argument);
  }
}

TEST_CASE("tangent_project") {
  Rng rng(9);
  BlockMatrixSignal x = random_block_signal(3, 4, 4, rng, 1);
  x.blocks[1].setZero();
  const BlockMatrixSignal g = random_block_signal(3, 4, 4, rng);
  const BlockMatrixSignal h = random_block_signal(3, 4, 4, rng);
  const BlockMatrixSignal pg = tangent_project(x, g);

  CHECK((pg.blocks[1] - g.blocks[1]).norm() == 0.0);
  CHECK(distance(tangent_project(x, x), x) <= 1e-12);
  CHECK(distance(tangent_project(x, pg), pg) <= 1e-12);

  const cplx alpha(0.7, -1.3);
  const cplx beta(-2.1, 0.4);
  const BlockMatrixSignal lhs = tangent_project(x, alpha * g + beta * h);
  const BlockMatrixSignal rhs = alpha * pg + beta * tangent_project(x, h);
  CHECK(distance(lhs, rhs) <= 1e-12 * (1.0 + lhs.frobenius_norm()));

  // The complement (I - P_U) G (I - P_V) is orthogonal to the tangent part.
  const Eigen::MatrixXcd rest = g.blocks[0] - pg.blocks[0];
  CHECK(std::abs((rest.adjoint() * pg.blocks[0]).trace()) <= 1e-10);

  const BlockMatrixSignal wrong = random_block_signal(3, 4, 3, rng);
  CHECK_THROWS_AS(tangent_project(x, wrong), std::invalid_argument);
}

TEST_CASE("transposed sparsity model") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Index rows = 2 + trial % 4;
    const Index cols = 3 + trial % 3;
    const Eigen::VectorXd z = oracle::random_vec<double>(rows * cols, rng);
    // Transpose by hand, threshold with blocks along columns, transpose back.
    Eigen::VectorXd zt(rows * cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) zt[j * rows + i] = z[i * cols + j];
    const Eigen::VectorXd pt = hi_threshold(BlockedVector<double>(zt, cols, rows), 2, 1).data();
    Eigen::VectorXd expected(rows * cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) expected[i * cols + j] = pt[j * rows + i];
    const TransposedSparsity model(std::make_unique<HiSparsity>(cols, rows, 2, 1), rows, cols);
    CHECK(model_project<double>(model, z) == expected);
    const auto idx = model.select(squared_moduli<double>(z));
    CHECK(std::is_sorted(idx.begin(), idx.end()));
  }
  CHECK_THROWS_AS(TransposedSparsity(std::make_unique<HiSparsity>(3, 3, 1, 1), 2, 4), std::invalid_argument);
}
