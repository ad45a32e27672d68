#include <doctest.h>

#include <cmath>

#include "locsim/covariance.hpp"
#include "locsim/synth.hpp"

using namespace locsim;

namespace {

Scenario small_scenario(int num_samples = 4, double noise_power = 0.5,
                        int num_antennas = 4) {
  Scenario s;
  SensingNode node;
  node.num_antennas = num_antennas;
  node.position = Vec3(5, 0, 6);
  s.nodes.push_back(node);
  node.position = Vec3(15, 0, 6);
  s.nodes.push_back(node);

  TargetSource t;
  t.position = Vec3(7.8, 0, 0);
  t.channel_variances = {1.0, 1.0};
  t.waveform.tone_index = 1;
  s.targets.push_back(t);
  t.position = Vec3(12.0, 0, 0);
  t.channel_variances = {1.0, 1.0};
  t.waveform.tone_index = 2;
  s.targets.push_back(t);

  s.grid = SearchGrid::line({0, 0, 0}, {20, 0, 0}, 0.5);
  s.noise_power = noise_power;
  s.num_samples = num_samples;
  s.seed = 99;
  return s;
}

}  // namespace

TEST_CASE("channel draws have the requested second moments") {
  Rng rng = Rng(123).stream(5);
  const int draws = 1000000;

  SUBCASE("unit variance modulus") {
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      const Eigen::VectorXcd alpha = draw_channel(rng, {1.0});
      sum += std::norm(alpha(0));
    }
    CHECK(sum / draws > 0.99);
    CHECK(sum / draws < 1.01);
  }

  SUBCASE("per-coordinate scaling") {
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const Eigen::VectorXcd alpha = draw_channel(rng, {1.0, 4.0});
      s1 += std::norm(alpha(0));
      s2 += std::norm(alpha(1));
    }
    const double ratio = s2 / s1;
    CHECK(ratio > 4.0 * 0.95);
    CHECK(ratio < 4.0 * 1.05);
  }
}

TEST_CASE("channel draws are deterministic per stream") {
  Rng a = Rng(7).stream(3);
  Rng b = Rng(7).stream(3);
  const Eigen::VectorXcd va = draw_channel(a, {1.0, 2.0, 3.0});
  const Eigen::VectorXcd vb = draw_channel(b, {1.0, 2.0, 3.0});
  CHECK(va == vb);

  // consuming the parent does not shift the children
  Rng parent(7);
  parent.bits();
  parent.bits();
  Rng c = parent.stream(3);
  const Eigen::VectorXcd vc = draw_channel(c, {1.0, 2.0, 3.0});
  CHECK(va == vc);
}

TEST_CASE("channel draw rejects non-positive variances") {
  Rng rng(1);
  CHECK_THROWS_AS(draw_channel(rng, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(draw_channel(rng, {-1.0}), ValidationError);
}

TEST_CASE("waveforms are unit modulus with zero mean") {
  Rng rng(11);

  SUBCASE("tone modulus is exactly 1") {
    WaveformSpec spec;
    spec.tone_index = 3;
    const WaveformSequence seq(spec, rng);
    for (int n = 1; n <= 200; ++n) {
      CHECK(std::abs(seq.sample(n, rng)) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  SUBCASE("qpsk empirical mean is tiny") {
    WaveformSpec spec;
    spec.kind = WaveformSpec::Kind::qpsk;
    const WaveformSequence seq(spec, rng);
    cdouble sum = 0.0;
    double worst_modulus_error = 0.0;
    const int draws = 1000000;
    for (int n = 1; n <= draws; ++n) {
      const cdouble s = seq.sample(n, rng);
      worst_modulus_error =
          std::max(worst_modulus_error, std::abs(std::abs(s) - 1.0));
      sum += s;
    }
    CHECK(worst_modulus_error < 1e-15);
    CHECK(std::abs(sum) / draws <= 2e-3);
  }

  SUBCASE("distinct tones decorrelate over whole periods") {
    WaveformSpec s1, s2;
    s1.tone_index = 1;
    s2.tone_index = 2;
    const WaveformSequence w1(s1, rng), w2(s2, rng);
    cdouble corr = 0.0;
    const int n_s = 640;  // multiple of the 64-sample period
    for (int n = 1; n <= n_s; ++n) {
      corr += w1.sample(n, rng) * std::conj(w2.sample(n, rng));
    }
    CHECK(std::abs(corr) / n_s < 1e-10);
  }
}

TEST_CASE("noiseless snapshots follow the stacked model entry-wise") {
  Scenario scenario = small_scenario(1, 1e-30);
  scenario.targets.resize(1);
  Rng rng = Rng(scenario.seed).stream(0);
  const SampleBatch batch = synthesize(scenario, rng);

  // replay the documented draw order to predict the snapshot
  Rng replay = Rng(scenario.seed).stream(0);
  const Eigen::VectorXcd alpha =
      draw_channel(replay, scenario.targets[0].channel_variances);
  const WaveformSequence wf(scenario.targets[0].waveform, replay);
  const cdouble s1 = wf.sample(1, replay);

  REQUIRE(batch.realized_channels.has_value());
  CHECK((*batch.realized_channels - alpha).norm() == 0.0);

  const double sqrt_nr = std::sqrt(4.0);
  for (int l = 0; l < 2; ++l) {
    const Eigen::VectorXcd a_l =
        steering_vector(scenario.nodes[l], scenario.targets[0].position);
    const Eigen::VectorXcd expected = sqrt_nr * alpha(l) * s1 * a_l;
    CHECK((batch.y_node(l, 0) - expected).norm() < 1e-12);
  }
}

TEST_CASE("noiseless snapshots stay in the steering span") {
  Scenario scenario = small_scenario(4, 1e-30);
  const SampleBatch batch = synthesize(scenario);

  Eigen::MatrixXcd basis(batch.stacked_dim(), 4);  // [A_1 A_2], L columns each
  int col = 0;
  for (const auto& target : scenario.targets) {
    for (int l = 0; l < 2; ++l) {
      basis.col(col).setZero();
      basis.col(col).segment(l * 4, 4) =
          steering_vector(scenario.nodes[l], target.position);
      ++col;
    }
  }
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(basis)
                                 .householderQ() *
                             Eigen::MatrixXcd::Identity(batch.stacked_dim(), 4);
  for (int n = 0; n < batch.num_samples(); ++n) {
    const Eigen::VectorXcd y = batch.y(n);
    const Eigen::VectorXcd residual = y - q * (q.adjoint() * y);
    CHECK(residual.norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("snapshot stacking partitions by node") {
  const Scenario scenario = small_scenario();
  const SampleBatch batch = synthesize(scenario);
  CHECK(batch.stacked_dim() == 8);
  CHECK(batch.snapshots.rows() == 8);
  for (int n = 0; n < batch.num_samples(); ++n) {
    Eigen::VectorXcd restacked(8);
    restacked << batch.y_node(0, n), batch.y_node(1, n);
    CHECK((restacked - batch.y(n)).norm() == 0.0);
  }
}

TEST_CASE("synthesis is bit-identical under a fixed seed") {
  const Scenario scenario = small_scenario();
  const SampleBatch b1 = synthesize(scenario);
  const SampleBatch b2 = synthesize(scenario);
  CHECK(b1.snapshots == b2.snapshots);
  CHECK(*b1.realized_channels == *b2.realized_channels);
}

TEST_CASE("per-sample channel redraw omits the realized channels") {
  Scenario scenario = small_scenario();
  scenario.channel_redraw = ChannelRedraw::per_sample;
  const SampleBatch batch = synthesize(scenario);
  CHECK(!batch.realized_channels.has_value());
  CHECK(batch.snapshots.allFinite());
}

TEST_CASE("sample covariance approaches the realized-channel analytic form") {
  Scenario scenario = small_scenario(100000, 0.5, 8);
  const SampleBatch batch = synthesize(scenario);
  const CovarianceMatrix empirical = scm(batch);
  const CovarianceMatrix analytic =
      analytic_covariance(scenario, batch.realized_channels);
  const double rel = (empirical.matrix - analytic.matrix).norm() /
                     analytic.matrix.norm();
  CHECK(rel <= 5e-2);

  // per-node blocks inherit the same structure
  const auto blocks = per_node_scm(batch);
  for (int l = 0; l < 2; ++l) {
    const Eigen::MatrixXcd expected =
        analytic.matrix.block(l * 8, l * 8, 8, 8);
    CHECK((blocks[l] - expected).norm() / expected.norm() <= 5e-2);
  }
}

TEST_CASE("scenario validation catches inconsistent SNR") {
  Scenario scenario = small_scenario();
  scenario.snr_db = 3.0;  // actual is 10*log10(1/0.5) = 3.0103
  CHECK_THROWS_AS(scenario.validate(), ValidationError);
  scenario.snr_db = 10.0 * std::log10(1.0 / 0.5);
  CHECK_NOTHROW(scenario.validate());
}

TEST_CASE("derived SNR averages over nodes and targets") {
  Scenario scenario = small_scenario(4, 2.0);
  scenario.targets[0].channel_variances = {1.0, 3.0};
  scenario.targets[1].channel_variances = {2.0, 2.0};
  CHECK(scenario.derived_snr_linear() == doctest::Approx(1.0));
}
