#pragma once

#include <map>
#include <string>
#include <vector>

#include "locsim/estimators.hpp"

namespace locsim {

struct Peak {
  int index = -1;
  Vec3 position = Vec3::Zero();
  double value = 0.0;
};

/// Peaks sorted by descending value; ties broken by lowest grid index.
struct PeakSet {
  std::vector<Peak> peaks;
};

/// Strict local maxima over the grid adjacency, highest first. A plateau
/// with no strict maximum falls back to the global maximum at its lowest
/// index.
PeakSet find_peaks(const PowerSpectrum& spectrum, int max_peaks);

struct TargetScore {
  double squared_error = 0.0;
  bool matched = false;  // received its own peak in the assignment
  int peak_index = -1;   // into PeakSet::peaks, also set for unmatched targets
};

/// Matches the strongest peaks to the true positions by minimum total
/// squared distance (exhaustive for up to 6 targets, greedy with pairwise
/// refinement beyond). Targets left without a peak score the distance to
/// the nearest peak and stay unmatched.
std::vector<TargetScore> assign_and_score(const PeakSet& peaks,
                                          const std::vector<Vec3>& truth);

struct EstimatorStats {
  double mse = 0.0;           // mean per-trial mean squared error, m^2
  double std_error = 0.0;     // sample standard error of the per-trial scores
  double resolve_rate = 0.0;  // mean fraction of targets with a matched peak
                              // within one grid step of the truth
  int trials = 0;
  int failures = 0;
  std::vector<double> per_trial_mse;       // one entry per trial, NaN = failed
  std::vector<double> per_trial_resolved;  // fraction per trial, NaN = failed
};

struct MonteCarloReport {
  std::map<Estimator, EstimatorStats> per_estimator;
  std::string config_echo;
};

struct MonteCarloOptions {
  TerminationRule isr_termination;
  double mvdr_loading = -1.0;  // < 0 applies the default loading policy
  double bs_det_floor = 1e-300;
};

/// Runs synthesize -> spectrum -> peaks -> score on independent per-trial
/// streams of scenario.seed. Estimator failures in a trial are counted, not
/// fatal.
MonteCarloReport monte_carlo_mse(const Scenario& scenario,
                                 const std::vector<Estimator>& estimators,
                                 int trials,
                                 const MonteCarloOptions& options = {});

}  // namespace locsim
