#include <doctest.h>

#include <cstdlib>
#include <set>

#include "hics/hibench.hpp"
#include "oracles.hpp"

using namespace hics;

namespace {

ExperimentSpec small_gaussian_spec() {
  ExperimentSpec spec;
  spec.scenario = ScenarioKind::gaussian_hisparse;
  spec.N = 8;
  spec.n = 6;
  spec.m = 30;
  spec.s = 2;
  spec.sigma = 2;
  spec.trials = 3;
  spec.master_seed = 77;
  spec.sweep_param = "m";
  spec.grid = {15, 30};
  return spec;
}

}  // namespace

TEST_CASE("gaussian scenario") {
  std::set<std::vector<Index>> supports;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto sc = make_gaussian_scenario<double>(10, 8, 3, 2, 20, seed);
    const auto supp = numerical_support<double>(sc.truth, 0.0);
    CHECK(HiSupport::from_flat(supp, 8).is_hierarchical(3, 2));
    CHECK(HiSupport::from_flat(supp, 8).block_count() == 3);
    CHECK(hi_threshold(BlockedVector<double>(sc.truth, 10, 8), 3, 2).data() == sc.truth);
    supports.insert(supp);
  }
  CHECK(supports.size() >= 99);
  const auto a = make_gaussian_scenario<cplx>(4, 5, 2, 2, 10, 3);
  const auto b = make_gaussian_scenario<cplx>(4, 5, 2, 2, 10, 3);
  CHECK(a.truth == b.truth);
  CHECK(a.op->to_dense() == b.op->to_dense());
}

TEST_CASE("channel scenario") {
  SUBCASE("single path") {
    const ChannelScenario sc = make_channel_scenario(16, 8, 4, 4, 1, 1);
    CHECK((sc.base.truth.array() != cplx(0)).count() == 1);
  }
  SUBCASE("measurements are the sub-sampled channel matrix") {
    const ChannelScenario sc = make_channel_scenario(16, 8, 6, 5, 3, 2);
    const Eigen::MatrixXcd a = dft_matrix(16);
    const Eigen::MatrixXcd b = dft_matrix(8);
    Eigen::MatrixXcd x(16, 8);
    for (Index i = 0; i < 16; ++i) x.row(i) = sc.base.truth.segment(i * 8, 8).transpose();
    const Eigen::MatrixXcd h = a * x * b.transpose();
    CHECK((sc.channel - h).norm() <= 1e-12);
    const double scale = std::sqrt(16.0 / 6.0) * std::sqrt(8.0 / 5.0);
    const Eigen::MatrixXcd ph = scale * h(sc.angle_rows, sc.delay_rows);
    Eigen::VectorXcd expected(30);
    for (Index i = 0; i < 6; ++i) expected.segment(i * 5, 5) = ph.row(i).transpose();
    CHECK((sc.base.op->apply(sc.base.truth) - expected).norm() <= 1e-10);
    // Distinct angles, one delay each.
    const auto supp = HiSupport::from_flat(numerical_support<cplx>(sc.base.truth, 0.0), 8);
    CHECK(supp.block_count() == 3);
    CHECK(supp.is_hierarchical(3, 1));
    std::set<Index> delays;
    for (const auto& [angle, entries] : supp.entries) delays.insert(entries.front());
    CHECK(delays.size() == 3);
    CHECK(model_project<cplx>(*sc.base.model, sc.base.truth) == sc.base.truth);
  }
  SUBCASE("model keeps one angle per delay") {
    const ChannelScenario sc = make_channel_scenario(4, 3, 2, 3, 2, 1);
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(12);
    // Two strong entries at delay 0 (angles 0, 1), a weaker one at delay 2.
    z[0 * 3 + 0] = 5.0;
    z[1 * 3 + 0] = 4.0;
    z[3 * 3 + 2] = 1.0;
    const Eigen::VectorXcd p = model_project<cplx>(*sc.base.model, z);
    CHECK(p[0] == cplx(5.0));
    CHECK(p[3] == cplx(0.0));
    CHECK(p[11] == cplx(1.0));
  }
  SUBCASE("full sampling is recovered exactly") {
    const ChannelScenario sc = make_channel_scenario(16, 8, 16, 8, 3, 3);
    const auto r = hi_htp<cplx>(sc.base.op->apply(sc.base.truth), *sc.base.op, *sc.base.model);
    CHECK((r.estimate.data() - sc.base.truth).norm() <= 1e-10);
  }
  SUBCASE("bounds") {
    CHECK_THROWS_AS(make_channel_scenario(4, 4, 2, 2, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_channel_scenario(8, 2, 2, 2, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_channel_scenario(4, 4, 5, 2, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("blind deconvolution scenario") {
  const BlindDeconvScenario sc = make_blind_deconv_scenario(16, 4, 5, 2, 2, 3, 4);
  const auto& op = dynamic_cast<const LiftedConvolutionOperator<double>&>(*sc.base.op);
  Eigen::VectorXd direct = Eigen::VectorXd::Zero(16);
  for (std::size_t k = 0; k < sc.active_users.size(); ++k) {
    const Eigen::VectorXd bc = op.codebooks()[static_cast<std::size_t>(sc.active_users[k])] * sc.messages[k];
    direct += oracle::circ_conv<double>(sc.channels[k], bc);
    CHECK((sc.messages[k].array().abs() == 1.0).count() == 2);
    CHECK((sc.channels[k].array() != 0.0).count() == 3);
  }
  CHECK((sc.base.op->apply(sc.base.truth) - direct).norm() <= 1e-10);
  CHECK(sc.active_users.size() == 2);
  const auto w = op.unlift(sc.base.truth);
  for (Index p = 0; p < 5; ++p) {
    const bool active = std::find(sc.active_users.begin(), sc.active_users.end(), p) != sc.active_users.end();
    CHECK(w[static_cast<std::size_t>(p)].isZero(0.0) != active);
  }
  CHECK(model_project<double>(*sc.base.model, sc.base.truth) == sc.base.truth);

  // Single user, identity codebook, delta channel: y = c.
  const LiftedConvolutionOperator<double> id({Eigen::MatrixXd::Identity(5, 5)});
  const Eigen::VectorXd c = (Eigen::VectorXd(5) << 1, -1, 0, 1, 0).finished();
  Eigen::VectorXd h = Eigen::VectorXd::Zero(5);
  h[0] = 1.0;
  CHECK(id.apply(id.lift({Eigen::MatrixXd(c * h.transpose())})) == c);
  CHECK_THROWS_AS(make_blind_deconv_scenario(16, 4, 5, 6, 2, 3, 4), std::invalid_argument);
}

TEST_CASE("demix scenario") {
  const DemixScenario sc = make_demix_scenario(6, 4, 2, 1, 200, 5);
  CHECK(sc.truth.nonzero_blocks().size() == 2);
  CHECK((demix_threshold(sc.truth, 2, 1) - sc.truth).frobenius_norm() <= 1e-12);
  for (Index b : sc.truth.nonzero_blocks()) {
    CHECK(sc.truth.blocks[static_cast<std::size_t>(b)].norm() == doctest::Approx(1.0));
  }
  // 2 blocks x 2 * 16 real parameters = 64 unknowns; m = 200 is overdetermined.
  SolverConfig cfg;
  cfg.max_iters = 2000;
  const auto supp = sc.truth.nonzero_blocks();
  const DemixResult r = sdt(sc.op->apply(sc.truth), *sc.op, 2, 1, cfg, DemixMode::informed, supp);
  CHECK((r.estimate - sc.truth).frobenius_norm() <= 1e-6);
}

TEST_CASE("snr noise") {
  Rng rng(6);
  const Eigen::VectorXcd y = oracle::random_vec<cplx>(50, rng);
  CHECK(snr_noise<cplx>(y, std::numeric_limits<double>::infinity(), 1).isZero(0.0));
  double mean_db = 0.0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const Eigen::VectorXcd e = snr_noise<cplx>(y, 10.0, t);
    mean_db += 10.0 * std::log10(y.squaredNorm() / e.squaredNorm());
  }
  mean_db /= 1000.0;
  CHECK(std::abs(mean_db - 10.0) <= 0.5);
  const Eigen::VectorXcd e1 = snr_noise<cplx>(y, 10.0, 9);
  const Eigen::VectorXcd e2 = snr_noise<cplx>(Eigen::VectorXcd(2.0 * y), 10.0, 9);
  CHECK((e2 - 2.0 * e1).norm() <= 1e-12);
  CHECK(snr_noise<cplx>(y, 10.0, 9) == e1);
  CHECK_THROWS_AS(snr_noise<double>(Eigen::VectorXd::Zero(5), 10.0, 1), std::invalid_argument);
}

TEST_CASE("evaluate_trial") {
  Rng rng(7);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(20);
  truth.segment(0, 5) = oracle::random_vec<double>(5, rng);
  truth.segment(10, 5) = oracle::random_vec<double>(5, rng);

  const TrialRecord exact = evaluate_trial<double>(truth, truth, 4, 5, 1e-5);
  CHECK(exact.success);
  CHECK(exact.l2_error == 0.0);
  CHECK(exact.correct_zero_blocks == 2);
  CHECK(exact.correct_nonzero_blocks == 2);
  CHECK(exact.support_recovered);

  const TrialRecord zero = evaluate_trial<double>(Eigen::VectorXd::Zero(20), truth, 4, 5, 1e-5);
  CHECK_FALSE(zero.success);
  CHECK(zero.correct_zero_blocks == 2);
  CHECK(zero.correct_nonzero_blocks == 0);

  Eigen::VectorXd bump = oracle::random_vec<double>(20, rng);
  bump *= 1e-6 / bump.norm();
  const TrialRecord close = evaluate_trial<double>(Eigen::VectorXd(truth + bump), truth, 4, 5, 1e-5);
  CHECK(close.success);
  CHECK(close.success == (close.l2_error < 1e-5));

  const DemixScenario sc = make_demix_scenario(4, 3, 2, 1, 10, 8);
  const TrialRecord m = evaluate_trial(BlockMatrixSignal::zeros(4, 3, 3, 1, 2), sc.truth, 1e-3);
  CHECK(m.correct_zero_blocks == 2);
  CHECK(m.correct_nonzero_blocks == 0);
  CHECK(m.frobenius_error == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(evaluate_trial<double>(truth, truth, 3, 5, 1e-5), std::invalid_argument);
}

TEST_CASE("experiment spec") {
  ExperimentSpec spec = small_gaussian_spec();
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.at(15).m == 15);
  CHECK(spec.threshold() == 1e-5);
  const ExperimentSpec back = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(back).dump() == spec_to_json(spec).dump());

  ExperimentSpec bad = spec;
  bad.sigma = 7;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sigma"), std::invalid_argument);
  bad = spec;
  bad.grid.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.sweep_param = "bogus";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  nlohmann::json j = spec_to_json(spec);
  j["unexpected"] = 1;
  CHECK_THROWS_WITH_AS(spec_from_json(j), doctest::Contains("unexpected"), std::invalid_argument);

  ExperimentSpec ch;
  ch.scenario = ScenarioKind::kronecker_channel;
  ch.field = Field::complex;
  ch.N = 16;
  ch.n = 8;
  ch.M_sub = 4;
  ch.m_sub = 8;
  ch.L = 2;
  ch.solver = SolverKind::hiiht;
  ch.sweep_param = "subsampling_factor";
  ch.grid = {0.5};
  CHECK(ch.at(0.5).M_sub == 8);
  CHECK(ch.at(0.25).M_sub == 4);
}

TEST_CASE("sweep") {
  const ExperimentSpec spec = small_gaussian_spec();
  const SweepResult a = sweep(spec, 1);
  CHECK(a.records.size() == 6);
  std::set<std::uint64_t> seeds;
  for (const auto& r : a.records) {
    seeds.insert(r.seed);
    CHECK(r.error.empty());
    CHECK(r.success == (r.l2_error < spec.threshold()));
  }
  CHECK(seeds.size() == 6);
  CHECK(a.points.size() == 2);
  CHECK(a.points[1].success_rate >= a.points[0].success_rate);

  const SweepResult b = sweep(spec, 3);
  CHECK(records_to_csv(spec, a.records) == records_to_csv(spec, b.records));
  const std::string csv = records_to_csv(spec, a.records);
  CHECK(csv.rfind("# spec: ", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 1 + 6);

  ExperimentSpec one = spec;
  one.sweep_param.clear();
  one.grid.clear();
  one.trials = 1;
  CHECK(sweep(one, 1).records.size() == 1);

  // Per-trial failures are recorded, not thrown: zero measurements with finite SNR.
  ExperimentSpec noisy = spec;
  noisy.s = 0;
  noisy.snr_db = 10.0;
  const SweepResult c = sweep(noisy, 1);
  for (const auto& r : c.records) CHECK_FALSE(r.error.empty());
  CHECK(c.points[0].failures == 3);

  const auto json = sweep_summary_json(a);
  CHECK(json["points"].size() == 2);
  CHECK(json.contains("spec"));
}

TEST_CASE("worker count") {
  setenv("HICS_WORKERS", "3", 1);
  CHECK(sweep_workers() == 3);
  unsetenv("HICS_WORKERS");
  CHECK(sweep_workers() >= 1);
}

TEST_CASE("run_trial across scenarios") {
  ExperimentSpec ch;
  ch.scenario = ScenarioKind::kronecker_channel;
  ch.field = Field::complex;
  ch.N = 16;
  ch.n = 8;
  ch.M_sub = 16;
  ch.m_sub = 8;
  ch.L = 2;
  ch.solver = SolverKind::hihtp;
  const TrialRecord rc = run_trial(ch, 1).record;
  CHECK(rc.success);
  CHECK(rc.channel_mse <= 1e-20);

  ExperimentSpec bd;
  bd.scenario = ScenarioKind::blind_deconv;
  bd.N = 32;
  bd.E = 4;
  bd.N_d = 3;
  bd.mu = 1;
  bd.s = 1;
  bd.sigma = 1;
  const TrialRecord rb = run_trial(bd, 2).record;
  CHECK(rb.error.empty());
  CHECK(std::isnan(rb.frobenius_error));

  ExperimentSpec dm;
  dm.scenario = ScenarioKind::demix_lowrank;
  dm.solver = SolverKind::informed_dt;
  dm.N = 4;
  dm.n = 3;
  dm.s = 1;
  dm.r = 1;
  dm.m = 80;
  const TrialRecord rd = run_trial(dm, 3).record;
  CHECK(rd.success);
  CHECK(rd.frobenius_error < 1e-3);
}
