#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "locsim/geometry.hpp"
#include "locsim/rng.hpp"

namespace locsim {

struct WaveformSpec {
  enum class Kind { tone, qpsk };
  Kind kind = Kind::tone;
  int tone_index = 1;  // cycles completed every num_tones samples
  int num_tones = 64;
};

struct TargetSource {
  Vec3 position = Vec3::Zero();
  std::vector<double> channel_variances;  // one per node, > 0
  WaveformSpec waveform;
};

enum class ChannelRedraw { per_trial, per_sample };

struct Scenario {
  std::vector<SensingNode> nodes;
  std::vector<TargetSource> targets;
  SearchGrid grid;
  double noise_power = 1.0;        // sigma_v^2
  std::optional<double> snr_db;    // declared SNR; must match the derived one
  int num_samples = 1;
  std::uint64_t seed = 0;
  ChannelRedraw channel_redraw = ChannelRedraw::per_trial;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_targets() const { return static_cast<int>(targets.size()); }

  /// Mean over nodes and targets of channel variance / noise power.
  double derived_snr_linear() const;

  void validate() const;
};

/// One realized transmit sequence. Tones get a uniform random initial phase
/// at construction; QPSK symbols are drawn per sample.
class WaveformSequence {
 public:
  WaveformSequence(const WaveformSpec& spec, Rng& rng);

  /// n is 1-based; |sample| = 1 always.
  cdouble sample(int n, Rng& rng) const;

 private:
  WaveformSpec spec_;
  double initial_phase_ = 0.0;
};

/// Stacked snapshots. Column n holds y(n); node l owns the rows
/// [l*N_R, (l+1)*N_R), node 0 first.
struct SampleBatch {
  Eigen::MatrixXcd snapshots;
  int num_antennas = 0;
  int num_nodes = 0;
  /// L x K channel coefficients of the batch, present when channels are
  /// drawn once per batch.
  std::optional<Eigen::MatrixXcd> realized_channels;

  int num_samples() const { return static_cast<int>(snapshots.cols()); }
  int stacked_dim() const { return num_antennas * num_nodes; }
  auto y(int n) const { return snapshots.col(n); }
  auto y_node(int l, int n) const {
    return snapshots.col(n).segment(l * num_antennas, num_antennas);
  }
};

/// Draw one complex Gaussian channel coefficient per node.
Eigen::VectorXcd draw_channel(Rng& rng, const std::vector<double>& variances);

SampleBatch synthesize(const Scenario& scenario, Rng& rng);

/// Convenience overload drawing from stream 0 of the scenario seed.
SampleBatch synthesize(const Scenario& scenario);

}  // namespace locsim
