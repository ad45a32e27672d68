#include "locsim/harness.hpp"

#include <cmath>

namespace locsim {

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::num_samples: return "num_samples";
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::num_antennas: return "num_antennas";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "num_samples") return SweepAxis::num_samples;
  if (name == "snr_db") return SweepAxis::snr_db;
  if (name == "num_antennas") return SweepAxis::num_antennas;
  throw ValidationError("unknown sweep axis '" + name +
                        "' (expected num_samples, snr_db or num_antennas)");
}

void SweepSpec::validate() const {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  for (size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw ValidationError("sweep values must be strictly increasing");
    }
  }
  if (estimators.empty()) throw ValidationError("sweep needs estimators");
  if (trials < 1) throw ValidationError("sweep needs at least one trial");
}

namespace {

int as_positive_int(double value, const std::string& what) {
  const int n = static_cast<int>(std::llround(value));
  if (n < 1 || std::abs(value - n) > 1e-9) {
    throw ValidationError(what + " must be a positive integer, got " +
                          std::to_string(value));
  }
  return n;
}

}  // namespace

Scenario apply_sweep_value(const Scenario& base, SweepAxis axis, double value) {
  Scenario scenario = base;
  switch (axis) {
    case SweepAxis::num_samples:
      scenario.num_samples = as_positive_int(value, "num_samples");
      break;
    case SweepAxis::num_antennas: {
      const int n_r = as_positive_int(value, "num_antennas");
      for (auto& node : scenario.nodes) node.num_antennas = n_r;
      break;
    }
    case SweepAxis::snr_db: {
      double sum = 0.0;
      size_t count = 0;
      for (const auto& t : scenario.targets) {
        for (double v : t.channel_variances) {
          sum += v;
          ++count;
        }
      }
      const double mean_variance = sum / static_cast<double>(count);
      scenario.snr_db = value;
      scenario.noise_power = mean_variance / std::pow(10.0, value / 10.0);
      break;
    }
  }
  return scenario;
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec,
                                const MonteCarloOptions& options) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    const Scenario scenario = apply_sweep_value(base, spec.axis, value);
    const MonteCarloReport report =
        monte_carlo_mse(scenario, spec.estimators, spec.trials, options);
    for (const Estimator estimator : spec.estimators) {
      rows.push_back({estimator, spec.axis, value,
                      report.per_estimator.at(estimator)});
    }
  }
  return rows;
}

}  // namespace locsim
