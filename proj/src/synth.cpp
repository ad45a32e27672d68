#include "locsim/synth.hpp"

#include <cmath>
#include <string>

namespace locsim {

double Scenario::derived_snr_linear() const {
  double sum = 0.0;
  for (const auto& target : targets) {
    for (double v : target.channel_variances) sum += v;
  }
  const double lk = static_cast<double>(num_nodes()) * num_targets();
  return sum / lk / noise_power;
}

void Scenario::validate() const {
  if (nodes.empty()) throw ValidationError("scenario needs at least one node");
  if (targets.empty()) throw ValidationError("scenario needs at least one target");
  if (num_samples < 1) throw ValidationError("num_samples must be >= 1");
  if (!(noise_power > 0.0)) throw ValidationError("noise power must be positive");
  for (const auto& node : nodes) node.validate();
  grid.validate();
  for (size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    if (t.channel_variances.size() != nodes.size()) {
      throw ValidationError("target " + std::to_string(k) +
                            " needs one channel variance per node");
    }
    for (double v : t.channel_variances) {
      if (!(v > 0.0)) {
        throw ValidationError("channel variances must be positive");
      }
    }
    if (t.waveform.kind == WaveformSpec::Kind::tone) {
      if (t.waveform.num_tones < 1 || t.waveform.tone_index < 0) {
        throw ValidationError("tone waveform needs num_tones >= 1 and tone_index >= 0");
      }
    }
  }
  if (snr_db.has_value()) {
    const double declared = std::pow(10.0, *snr_db / 10.0);
    const double derived = derived_snr_linear();
    if (std::abs(derived - declared) > 1e-9 * std::max(1.0, declared)) {
      throw ValidationError("declared SNR disagrees with channel variances and noise power");
    }
  }
}

WaveformSequence::WaveformSequence(const WaveformSpec& spec, Rng& rng)
    : spec_(spec) {
  if (spec_.kind == WaveformSpec::Kind::tone) {
    initial_phase_ = 2.0 * M_PI * rng.uniform();
  }
}

cdouble WaveformSequence::sample(int n, Rng& rng) const {
  if (spec_.kind == WaveformSpec::Kind::tone) {
    const double phase =
        initial_phase_ +
        2.0 * M_PI * spec_.tone_index * static_cast<double>(n) / spec_.num_tones;
    return std::polar(1.0, phase);
  }
  // QPSK: one of the four unit-modulus corner symbols per sample.
  const std::uint64_t b = rng.bits();
  const double re = (b & 1) ? M_SQRT1_2 : -M_SQRT1_2;
  const double im = (b & 2) ? M_SQRT1_2 : -M_SQRT1_2;
  return {re, im};
}

Eigen::VectorXcd draw_channel(Rng& rng, const std::vector<double>& variances) {
  Eigen::VectorXcd alpha(static_cast<int>(variances.size()));
  for (size_t l = 0; l < variances.size(); ++l) {
    if (!(variances[l] > 0.0)) {
      throw ValidationError("channel variances must be positive");
    }
    alpha(static_cast<int>(l)) = rng.complex_normal(variances[l]);
  }
  return alpha;
}

SampleBatch synthesize(const Scenario& scenario, Rng& rng) {
  scenario.validate();
  const int n_l = scenario.num_nodes();
  const int n_k = scenario.num_targets();
  const int n_r = scenario.nodes[0].num_antennas;
  const int n_s = scenario.num_samples;
  const int dim = n_r * n_l;
  const double sqrt_nr = std::sqrt(static_cast<double>(n_r));
  const bool per_trial = scenario.channel_redraw == ChannelRedraw::per_trial;

  // Per-target steering towards the true positions.
  std::vector<Eigen::MatrixXcd> a(n_k);  // N_R x L, column l = a_l(p_k)
  for (int k = 0; k < n_k; ++k) {
    a[k].resize(n_r, n_l);
    for (int l = 0; l < n_l; ++l) {
      a[k].col(l) = steering_vector(scenario.nodes[l], scenario.targets[k].position);
    }
  }

  // Draw order is part of the contract: channels, then waveform phases,
  // then per-sample symbols, then noise.
  Eigen::MatrixXcd alpha(n_l, n_k);
  if (per_trial) {
    for (int k = 0; k < n_k; ++k) {
      alpha.col(k) = draw_channel(rng, scenario.targets[k].channel_variances);
    }
  }
  std::vector<WaveformSequence> waveforms;
  waveforms.reserve(n_k);
  for (int k = 0; k < n_k; ++k) {
    waveforms.emplace_back(scenario.targets[k].waveform, rng);
  }

  SampleBatch batch;
  batch.num_antennas = n_r;
  batch.num_nodes = n_l;
  batch.snapshots = Eigen::MatrixXcd::Zero(dim, n_s);
  for (int n = 0; n < n_s; ++n) {
    if (!per_trial) {
      for (int k = 0; k < n_k; ++k) {
        alpha.col(k) = draw_channel(rng, scenario.targets[k].channel_variances);
      }
    }
    for (int k = 0; k < n_k; ++k) {
      const cdouble s = waveforms[k].sample(n + 1, rng);
      for (int l = 0; l < n_l; ++l) {
        batch.snapshots.col(n).segment(l * n_r, n_r) +=
            sqrt_nr * alpha(l, k) * s * a[k].col(l);
      }
    }
  }
  const double noise_sigma2 = scenario.noise_power;
  for (int n = 0; n < n_s; ++n) {
    for (int i = 0; i < dim; ++i) {
      batch.snapshots(i, n) += rng.complex_normal(noise_sigma2);
    }
  }
  if (per_trial) batch.realized_channels = alpha;
  return batch;
}

SampleBatch synthesize(const Scenario& scenario) {
  Rng rng = Rng(scenario.seed).stream(0);
  return synthesize(scenario, rng);
}

}  // namespace locsim
