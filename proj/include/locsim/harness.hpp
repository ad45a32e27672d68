#pragma once

#include <vector>

#include "locsim/metrics.hpp"

namespace locsim {

enum class SweepAxis { num_samples, snr_db, num_antennas };

std::string sweep_axis_name(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::num_samples;
  std::vector<double> values;  // nonempty, strictly increasing
  std::vector<Estimator> estimators;
  int trials = 1;

  void validate() const;
};

/// Copy of the scenario with the axis value applied. Changing the SNR keeps
/// the channel variances and rescales the noise power.
Scenario apply_sweep_value(const Scenario& base, SweepAxis axis, double value);

struct SweepRow {
  Estimator estimator;
  SweepAxis axis;
  double axis_value;
  EstimatorStats stats;
};

/// One Monte-Carlo report per axis value, flattened to rows in
/// (axis value, estimator) order.
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec,
                                const MonteCarloOptions& options = {});

}  // namespace locsim
