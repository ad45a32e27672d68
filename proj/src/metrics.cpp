#include "locsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace locsim {

namespace {

constexpr int kBruteForceLimit = 6;

// Minimum-total-cost injective assignment of peaks to targets, exhaustive.
void assign_exhaustive(const Eigen::MatrixXd& cost, int peak, std::vector<int>& current,
                       std::vector<char>& used, double so_far,
                       double& best, std::vector<int>& best_assign) {
  const int n_peaks = static_cast<int>(cost.rows());
  const int n_targets = static_cast<int>(cost.cols());
  if (so_far >= best) return;
  if (peak == n_peaks) {
    best = so_far;
    best_assign = current;
    return;
  }
  for (int t = 0; t < n_targets; ++t) {
    if (used[t]) continue;
    used[t] = 1;
    current[peak] = t;
    assign_exhaustive(cost, peak + 1, current, used, so_far + cost(peak, t),
                      best, best_assign);
    used[t] = 0;
  }
  current[peak] = -1;
}

// Greedy closest-pair matching followed by pairwise swap refinement.
std::vector<int> assign_greedy(const Eigen::MatrixXd& cost) {
  const int n_peaks = static_cast<int>(cost.rows());
  const int n_targets = static_cast<int>(cost.cols());
  std::vector<int> assign(n_peaks, -1);
  std::vector<char> peak_used(n_peaks, 0), target_used(n_targets, 0);
  for (int round = 0; round < n_peaks; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bp = -1, bt = -1;
    for (int p = 0; p < n_peaks; ++p) {
      if (peak_used[p]) continue;
      for (int t = 0; t < n_targets; ++t) {
        if (target_used[t]) continue;
        if (cost(p, t) < best) {
          best = cost(p, t);
          bp = p;
          bt = t;
        }
      }
    }
    assign[bp] = bt;
    peak_used[bp] = 1;
    target_used[bt] = 1;
  }
  bool improved = true;
  while (improved) {
    improved = false;
    for (int p = 0; p < n_peaks; ++p) {
      for (int q = p + 1; q < n_peaks; ++q) {
        const double now = cost(p, assign[p]) + cost(q, assign[q]);
        const double swapped = cost(p, assign[q]) + cost(q, assign[p]);
        if (swapped + 1e-15 < now) {
          std::swap(assign[p], assign[q]);
          improved = true;
        }
      }
    }
  }
  return assign;
}

}  // namespace

PeakSet find_peaks(const PowerSpectrum& spectrum, int max_peaks) {
  if (spectrum.grid == nullptr) {
    throw ValidationError("spectrum carries no grid");
  }
  const SearchGrid& grid = *spectrum.grid;
  const int n = static_cast<int>(spectrum.values.size());
  if (n != grid.size()) throw ValidationError("spectrum/grid size mismatch");
  if (max_peaks < 1) throw ValidationError("max_peaks must be >= 1");

  PeakSet set;
  std::vector<int> adjacent;
  for (int i = 0; i < n; ++i) {
    grid.neighbors(i, adjacent);
    bool is_peak = true;
    for (int j : adjacent) {
      if (!(spectrum.values[i] > spectrum.values[j])) {
        is_peak = false;
        break;
      }
    }
    if (is_peak) {
      set.peaks.push_back({i, grid.points[i], spectrum.values[i]});
    }
  }
  if (set.peaks.empty()) {
    // Plateau: fall back to the global maximum, lowest index on ties.
    int arg = 0;
    for (int i = 1; i < n; ++i) {
      if (spectrum.values[i] > spectrum.values[arg]) arg = i;
    }
    set.peaks.push_back({arg, grid.points[arg], spectrum.values[arg]});
  }
  std::sort(set.peaks.begin(), set.peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
  });
  if (static_cast<int>(set.peaks.size()) > max_peaks) {
    set.peaks.resize(max_peaks);
  }
  return set;
}

std::vector<TargetScore> assign_and_score(const PeakSet& peaks,
                                          const std::vector<Vec3>& truth) {
  if (peaks.peaks.empty()) throw ValidationError("cannot score an empty peak set");
  if (truth.empty()) throw ValidationError("cannot score without targets");
  const int n_targets = static_cast<int>(truth.size());
  const int n_peaks = std::min(static_cast<int>(peaks.peaks.size()), n_targets);

  Eigen::MatrixXd cost(n_peaks, n_targets);
  for (int p = 0; p < n_peaks; ++p) {
    for (int t = 0; t < n_targets; ++t) {
      cost(p, t) = (peaks.peaks[p].position - truth[t]).squaredNorm();
    }
  }

  std::vector<int> assign;
  if (n_targets <= kBruteForceLimit) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> current(n_peaks, -1);
    std::vector<char> used(n_targets, 0);
    assign_exhaustive(cost, 0, current, used, 0.0, best, assign);
  } else {
    assign = assign_greedy(cost);
  }

  std::vector<TargetScore> scores(n_targets);
  for (int p = 0; p < n_peaks; ++p) {
    TargetScore& s = scores[assign[p]];
    s.squared_error = cost(p, assign[p]);
    s.matched = true;
    s.peak_index = p;
  }
  // Targets beyond the available peaks score their nearest peak, unmatched.
  for (int t = 0; t < n_targets; ++t) {
    if (scores[t].matched) continue;
    double best = std::numeric_limits<double>::infinity();
    int best_peak = -1;
    for (size_t p = 0; p < peaks.peaks.size(); ++p) {
      const double d = (peaks.peaks[p].position - truth[t]).squaredNorm();
      if (d < best) {
        best = d;
        best_peak = static_cast<int>(p);
      }
    }
    scores[t].squared_error = best;
    scores[t].matched = false;
    scores[t].peak_index = best_peak;
  }
  return scores;
}

MonteCarloReport monte_carlo_mse(const Scenario& scenario,
                                 const std::vector<Estimator>& estimators,
                                 int trials, const MonteCarloOptions& options) {
  scenario.validate();
  if (trials < 1) throw ValidationError("need at least one trial");
  if (estimators.empty()) throw ValidationError("no estimators requested");

  const SteeringSet steering = build_steering_set(scenario.nodes, scenario.grid);
  std::vector<Vec3> truth;
  for (const auto& t : scenario.targets) truth.push_back(t.position);
  const int n_targets = static_cast<int>(truth.size());
  const double resolve_dist = scenario.grid.step() + 1e-9;
  const Rng root(scenario.seed);

  struct TrialCell {
    double mse = std::numeric_limits<double>::quiet_NaN();
    double resolved = 0.0;
    bool failed = false;
  };
  std::vector<std::vector<TrialCell>> cells(estimators.size(),
                                            std::vector<TrialCell>(trials));

#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = root.stream(static_cast<std::uint64_t>(trial));
    const SampleBatch batch = synthesize(scenario, rng);
    for (size_t e = 0; e < estimators.size(); ++e) {
      TrialCell& cell = cells[e][trial];
      try {
        PowerSpectrum spectrum;
        switch (estimators[e]) {
          case Estimator::mvdr: {
            const double loading =
                options.mvdr_loading >= 0.0
                    ? options.mvdr_loading
                    : default_mvdr_loading(batch, scenario.noise_power);
            spectrum = mvdr_spectrum(batch, steering, scenario.grid, loading);
            break;
          }
          case Estimator::bs: {
            BsOptions bs_options;
            bs_options.det_floor = options.bs_det_floor;
            spectrum = bs_spectrum(batch, steering, scenario.grid, n_targets,
                                   bs_options);
            break;
          }
          case Estimator::isr: {
            spectrum = isr_spectrum(batch, steering, scenario.grid,
                                    scenario.noise_power,
                                    options.isr_termination)
                           .first;
            break;
          }
        }
        const PeakSet peaks = find_peaks(spectrum, n_targets);
        const auto scores = assign_and_score(peaks, truth);
        double sum_sq = 0.0;
        int resolved = 0;
        for (const auto& s : scores) {
          sum_sq += s.squared_error;
          if (s.matched && s.squared_error <= resolve_dist * resolve_dist) {
            ++resolved;
          }
        }
        cell.mse = sum_sq / n_targets;
        cell.resolved = static_cast<double>(resolved) / n_targets;
      } catch (const std::exception&) {
        cell.failed = true;
      }
    }
  }

  MonteCarloReport report;
  for (size_t e = 0; e < estimators.size(); ++e) {
    EstimatorStats stats;
    stats.trials = trials;
    stats.per_trial_mse.resize(trials);
    stats.per_trial_resolved.resize(trials);
    int ok = 0;
    double mean = 0.0, mean_resolved = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const TrialCell& cell = cells[e][trial];
      if (cell.failed) {
        ++stats.failures;
        stats.per_trial_mse[trial] = std::numeric_limits<double>::quiet_NaN();
        stats.per_trial_resolved[trial] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      stats.per_trial_mse[trial] = cell.mse;
      stats.per_trial_resolved[trial] = cell.resolved;
      mean += cell.mse;
      mean_resolved += cell.resolved;
      ++ok;
    }
    if (ok > 0) {
      mean /= ok;
      mean_resolved /= ok;
      double var = 0.0;
      for (int trial = 0; trial < trials; ++trial) {
        const double v = stats.per_trial_mse[trial];
        if (std::isnan(v)) continue;
        var += (v - mean) * (v - mean);
      }
      var = ok > 1 ? var / (ok - 1) : 0.0;
      stats.mse = mean;
      stats.std_error = std::sqrt(var / ok);
      stats.resolve_rate = mean_resolved;
    }
    report.per_estimator[estimators[e]] = std::move(stats);
  }

  std::ostringstream echo;
  echo << "L=" << scenario.num_nodes() << " K=" << scenario.num_targets()
       << " N_R=" << scenario.nodes[0].num_antennas
       << " N_s=" << scenario.num_samples << " N_G=" << scenario.grid.size()
       << " noise=" << scenario.noise_power << " seed=" << scenario.seed
       << " trials=" << trials;
  report.config_echo = echo.str();
  return report;
}

}  // namespace locsim
