// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "locsim/csv.hpp"
#include "locsim/harness.hpp"
#include "locsim/reference.hpp"
#include "locsim/scenario_io.hpp"

using namespace locsim;

namespace {

std::filesystem::path scenario_dir() {
#ifdef LOCSIM_SCENARIO_DIR
  return LOCSIM_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

bool report(int number, const std::string& name, bool ok,
            const std::string& detail, double seconds) {
  std::printf("criterion %d %-28s %s  (%s) [%.1fs]\n", number, name.c_str(),
              ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  return ok;
}

double fraction_fully_resolved(const EstimatorStats& stats) {
  int both = 0, counted = 0;
  for (double r : stats.per_trial_resolved) {
    if (std::isnan(r)) {
      ++counted;  // a failed trial counts as unresolved
      continue;
    }
    ++counted;
    if (r >= 1.0) ++both;
  }
  return counted > 0 ? static_cast<double>(both) / counted : 0.0;
}

// Paired per-trial gap: mean(other - isr) must exceed its standard error.
bool gap_exceeds_standard_error(const EstimatorStats& isr,
                                const EstimatorStats& other) {
  std::vector<double> diff;
  for (size_t t = 0; t < isr.per_trial_mse.size(); ++t) {
    const double a = isr.per_trial_mse[t];
    const double b = other.per_trial_mse[t];
    if (std::isnan(a) || std::isnan(b)) continue;
    diff.push_back(b - a);
  }
  if (diff.size() < 2) return false;
  double mean = 0.0;
  for (double d : diff) mean += d;
  mean /= diff.size();
  double var = 0.0;
  for (double d : diff) var += (d - mean) * (d - mean);
  var /= (diff.size() - 1);
  const double se = std::sqrt(var / diff.size());
  return mean > se;
}

SampleBatch random_batch(int num_nodes, int num_antennas, int num_samples,
                         std::uint64_t seed) {
  SampleBatch batch;
  batch.num_nodes = num_nodes;
  batch.num_antennas = num_antennas;
  batch.snapshots.resize(num_nodes * num_antennas, num_samples);
  Rng rng(seed);
  for (int n = 0; n < num_samples; ++n) {
    for (int i = 0; i < batch.stacked_dim(); ++i) {
      batch.snapshots(i, n) = rng.complex_normal(1.0);
    }
  }
  return batch;
}

Eigen::MatrixXcd random_psd(int dim, std::uint64_t seed, double ridge) {
  Rng rng(seed);
  Eigen::MatrixXcd z(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) z(r, c) = rng.complex_normal(1.0);
  }
  Eigen::MatrixXcd m = z * z.adjoint() / dim;
  m.diagonal().array() += ridge;
  symmetrize(m);
  return m;
}

// --- criterion 1: close-target resolution, linear area -------------------

bool criterion_resolution() {
  Timer timer;
  const Scenario scenario =
      load_scenario(scenario_dir() / "scenario1_fig2.json");
  const std::vector<Estimator> all = {Estimator::mvdr, Estimator::bs,
                                      Estimator::isr};
  const MonteCarloReport report_mc = monte_carlo_mse(scenario, all, 50);

  const double isr = fraction_fully_resolved(report_mc.per_estimator.at(Estimator::isr));
  const double mvdr = fraction_fully_resolved(report_mc.per_estimator.at(Estimator::mvdr));
  const double bs = fraction_fully_resolved(report_mc.per_estimator.at(Estimator::bs));
  const double seconds = timer.seconds();

  const bool ok = isr >= 0.80 && mvdr < 0.50 && bs < 0.50 && seconds <= 300.0;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "isr %.2f >= 0.80, mvdr %.2f < 0.50, bs %.2f < 0.50",
                isr, mvdr, bs);
  return report(1, "close-target resolution", ok, detail, seconds);
}

// --- criterion 2: error ordering vs sample count --------------------------

bool criterion_mse_ordering() {
  Timer timer;
  const Scenario base = load_scenario(scenario_dir() / "scenario1_fig4.json");
  SweepSpec spec;
  spec.axis = SweepAxis::num_samples;
  spec.values = {2, 4, 8};
  spec.estimators = {Estimator::mvdr, Estimator::bs, Estimator::isr};
  spec.trials = 200;
  const std::vector<SweepRow> rows = run_sweep(base, spec);

  bool ok = true;
  std::string detail;
  for (double value : spec.values) {
    const EstimatorStats *isr = nullptr, *mvdr = nullptr, *bs = nullptr;
    for (const auto& row : rows) {
      if (row.axis_value != value) continue;
      if (row.estimator == Estimator::isr) isr = &row.stats;
      if (row.estimator == Estimator::mvdr) mvdr = &row.stats;
      if (row.estimator == Estimator::bs) bs = &row.stats;
    }
    const bool point_ok = isr->mse <= mvdr->mse && isr->mse <= bs->mse &&
                          gap_exceeds_standard_error(*isr, *mvdr) &&
                          gap_exceeds_standard_error(*isr, *bs);
    ok = ok && point_ok;
    char buffer[96];
    std::snprintf(buffer, sizeof(buffer), "N_s=%g isr %.3g mvdr %.3g bs %.3g; ",
                  value, isr->mse, mvdr->mse, bs->mse);
    detail += buffer;
  }
  return report(2, "error ordering vs samples", ok, detail, timer.seconds());
}

// --- criterion 3: eight-target resolve rate -------------------------------

bool criterion_eight_targets() {
  Timer timer;
  const Scenario scenario =
      load_scenario(scenario_dir() / "scenario1_fig3.json");
  const std::vector<Estimator> all = {Estimator::mvdr, Estimator::bs,
                                      Estimator::isr};
  const MonteCarloReport mc = monte_carlo_mse(scenario, all, 30);
  const double isr = mc.per_estimator.at(Estimator::isr).resolve_rate;
  const double mvdr = mc.per_estimator.at(Estimator::mvdr).resolve_rate;
  const double bs = mc.per_estimator.at(Estimator::bs).resolve_rate;

  const bool ok = isr >= 0.8 && mvdr < isr && bs < isr;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "resolve_rate isr %.2f >= 0.8, mvdr %.2f, bs %.2f", isr, mvdr,
                bs);
  return report(3, "eight-target resolve rate", ok, detail, timer.seconds());
}

// --- criterion 4: algebraic oracles ---------------------------------------

bool criterion_oracles() {
  Timer timer;
  const std::vector<SensingNode> nodes = {
      {{5, 0, 6}, {1, 0, 0}, 3, 0.5}, {{15, 0, 6}, {1, 0, 0}, 3, 0.5}};
  const SearchGrid grid = SearchGrid::line({2, 0, 0}, {18, 0, 0}, 4.0);
  const SteeringSet steering = build_steering_set(nodes, grid);
  const int dim = 6;

  // (a) interference-form vs full-form weighted least squares
  double worst_wls = 0.0;
  {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
      const int i0 = static_cast<int>(rng.bits() % grid.size());
      const Eigen::MatrixXcd a = ref::dense_steering_matrix(steering, i0);
      const Eigen::MatrixXcd r_in = random_psd(dim, rng.bits(), 0.1);
      const Eigen::MatrixXcd lambda = random_psd(2, rng.bits(), 0.01);
      const Eigen::MatrixXcd r = r_in + a * lambda * a.adjoint();
      Eigen::VectorXcd y(dim);
      for (int i = 0; i < dim; ++i) y(i) = rng.complex_normal(1.0);

      const Eigen::MatrixXcd r_in_inv = r_in.inverse();
      const Eigen::MatrixXcd r_inv = r.inverse();
      const Eigen::VectorXcd x_in =
          (a.adjoint() * r_in_inv * a).inverse() * a.adjoint() * r_in_inv * y;
      const Eigen::VectorXcd x_full =
          (a.adjoint() * r_inv * a).inverse() * a.adjoint() * r_inv * y;
      worst_wls = std::max(worst_wls, (x_in - x_full).norm() / x_full.norm());
    }
  }
  const bool ok_a = worst_wls <= 1e-8;

  // (b) one full cycle against the straight-line reference (L=2, N_R=3,
  // N_G=5, N_s=2)
  double worst_cycle = 0.0;
  {
    const SampleBatch batch = random_batch(2, 3, 2, 4242);
    const double sigma2 = 0.6;
    const ref::IsrTrace trace = ref::isr_run(batch, steering, sigma2, 1);
    IsrState state = isr_init(batch, sigma2);
    isr_update_x(state, batch, steering);
    isr_update_lambda(state);
    isr_update_r(state, steering, sigma2);
    for (int i = 0; i < grid.size(); ++i) {
      worst_cycle = std::max(worst_cycle, (state.x_hat[i] - trace.x_hat[i]).norm());
      worst_cycle = std::max(worst_cycle,
                             (state.lambda_hat[i] - trace.lambda_hat[i]).norm());
    }
    worst_cycle = std::max(worst_cycle, (state.r_hat.matrix - trace.r_hat).norm());
    const std::vector<double> power = isr_power(state, 3);
    for (int i = 0; i < grid.size(); ++i) {
      worst_cycle = std::max(worst_cycle, std::abs(power[i] - trace.power[i]));
    }
  }
  const bool ok_b = worst_cycle <= 1e-10;

  // (c) beam-space spectrum against the direct evaluation
  double worst_bs = 0.0;
  {
    CovarianceMatrix cov;
    cov.matrix = random_psd(dim, 777, 1.0);
    const PowerSpectrum fast = bs_spectrum_from_cov(cov, steering, grid, 2);
    const std::vector<double> slow =
        ref::bs_spectrum_from_cov(cov.matrix, steering, 2);
    for (int i = 0; i < grid.size(); ++i) {
      worst_bs = std::max(worst_bs,
                          std::abs(fast.values[i] - slow[i]) / std::abs(slow[i]));
    }
  }
  const bool ok_c = worst_bs <= 1e-8;

  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "wls %.1e <= 1e-8, cycle %.1e <= 1e-10, bs %.1e <= 1e-8",
                worst_wls, worst_cycle, worst_bs);
  return report(4, "algebraic oracles", ok_a && ok_b && ok_c, detail,
                timer.seconds());
}

// --- criterion 5: covariance consistency -----------------------------------

bool criterion_consistency() {
  Timer timer;
  Scenario scenario;
  SensingNode node;
  node.num_antennas = 8;
  node.position = Vec3(5, 0, 6);
  scenario.nodes.push_back(node);
  node.position = Vec3(15, 0, 6);
  scenario.nodes.push_back(node);
  TargetSource t;
  t.position = Vec3(7.8, 0, 0);
  t.channel_variances = {1.0, 1.0};
  t.waveform.tone_index = 1;
  scenario.targets.push_back(t);
  t.position = Vec3(12.0, 0, 0);
  t.waveform.tone_index = 2;
  scenario.targets.push_back(t);
  scenario.grid = SearchGrid::line({0, 0, 0}, {20, 0, 0}, 0.5);
  scenario.noise_power = 0.5;
  scenario.num_samples = 100000;
  scenario.seed = 31415;

  const SampleBatch batch = synthesize(scenario);
  const CovarianceMatrix empirical = scm(batch);
  const CovarianceMatrix analytic =
      analytic_covariance(scenario, batch.realized_channels);
  const double rel =
      (empirical.matrix - analytic.matrix).norm() / analytic.matrix.norm();

  char detail[64];
  std::snprintf(detail, sizeof(detail), "relative Frobenius %.3f <= 0.05", rel);
  return report(5, "covariance consistency", rel <= 5e-2, detail,
                timer.seconds());
}

// --- criterion 6: invariant suite ------------------------------------------

bool criterion_invariants() {
  Timer timer;
  bool ok = true;
  std::string detail;

  // steering norms and per-point orthonormality on both bundled geometries
  for (const char* name : {"scenario1_fig2.json", "scenario2_fig5.json"}) {
    const Scenario scenario = load_scenario(scenario_dir() / name);
    const SteeringSet steering =
        build_steering_set(scenario.nodes, scenario.grid);
    double worst = 0.0;
    const int n_l = steering.num_nodes();
    for (int i = 0; i < steering.num_points(); ++i) {
      for (int l = 0; l < n_l; ++l) {
        worst = std::max(worst, std::abs(steering.a(l, i).norm() - 1.0));
      }
      const Eigen::MatrixXcd a_i = ref::dense_steering_matrix(steering, i);
      worst = std::max(worst, (a_i.adjoint() * a_i -
                               Eigen::MatrixXcd::Identity(n_l, n_l))
                                  .norm());
    }
    if (worst > 1e-10) {
      ok = false;
      detail += std::string(name) + " steering off; ";
    }
  }

  // Hermitian and PSD sample covariances
  {
    const SampleBatch batch = random_batch(2, 4, 6, 999);
    for (const CovarianceMatrix& cov : {scm(batch), block_diag_scm(batch)}) {
      if ((cov.matrix - cov.matrix.adjoint()).norm() > 1e-10) ok = false;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
      if (es.eigenvalues().minCoeff() <
          -1e-8 * cov.matrix.trace().real() / cov.dim()) {
        ok = false;
        detail += "covariance not PSD; ";
      }
    }
  }

  // reconstruction identity after a full run
  {
    const std::vector<SensingNode> nodes = {
        {{5, 0, 6}, {1, 0, 0}, 4, 0.5}, {{15, 0, 6}, {1, 0, 0}, 4, 0.5}};
    const SearchGrid grid = SearchGrid::line({2, 0, 0}, {18, 0, 0}, 2.0);
    const SteeringSet steering = build_steering_set(nodes, grid);
    const SampleBatch batch = random_batch(2, 4, 3, 1234);
    TerminationRule rule;
    rule.max_iterations = 5;
    const auto [spectrum, state] =
        isr_spectrum(batch, steering, grid, 0.4, rule);
    Eigen::MatrixXcd expected = 0.4 * Eigen::MatrixXcd::Identity(8, 8);
    for (int i = 0; i < grid.size(); ++i) {
      const Eigen::MatrixXcd a_i = ref::dense_steering_matrix(steering, i);
      expected += a_i * state.lambda_hat[i] * a_i.adjoint();
    }
    if ((state.r_hat.matrix - expected).norm() / expected.norm() > 1e-8) {
      ok = false;
      detail += "reconstruction identity broken; ";
    }

    // permutation invariance of the three spectra
    const int n_g = grid.size();
    SearchGrid reversed = grid;
    SteeringSet reversed_steering = steering;
    for (int i = 0; i < n_g; ++i) {
      reversed.points[i] = grid.points[n_g - 1 - i];
      for (int l = 0; l < 2; ++l) {
        reversed_steering.per_node[l].col(i) = steering.per_node[l].col(n_g - 1 - i);
      }
    }
    const auto permuted_matches = [&](const std::vector<double>& base,
                                      const std::vector<double>& perm) {
      for (int i = 0; i < n_g; ++i) {
        const double scale = std::max(1e-300, std::abs(base[n_g - 1 - i]));
        if (std::abs(perm[i] - base[n_g - 1 - i]) / scale > 1e-10) return false;
      }
      return true;
    };
    if (!permuted_matches(
            mvdr_spectrum(batch, steering, grid, 0.4).values,
            mvdr_spectrum(batch, reversed_steering, reversed, 0.4).values) ||
        !permuted_matches(
            bs_spectrum(batch, steering, grid, 2).values,
            bs_spectrum(batch, reversed_steering, reversed, 2).values) ||
        !permuted_matches(
            isr_spectrum(batch, steering, grid, 0.4, rule).first.values,
            isr_spectrum(batch, reversed_steering, reversed, 0.4, rule)
                .first.values)) {
      ok = false;
      detail += "permutation invariance broken; ";
    }
  }

  // determinism under a fixed seed
  {
    const Scenario scenario =
        load_scenario(scenario_dir() / "scenario1_fig2.json");
    const SampleBatch b1 = synthesize(scenario);
    const SampleBatch b2 = synthesize(scenario);
    if (b1.snapshots != b2.snapshots) {
      ok = false;
      detail += "synthesis not deterministic; ";
    }
    Scenario small = scenario;
    small.nodes[0].num_antennas = 8;
    small.nodes[1].num_antennas = 8;
    const MonteCarloReport r1 =
        monte_carlo_mse(small, {Estimator::isr}, 4);
    const MonteCarloReport r2 =
        monte_carlo_mse(small, {Estimator::isr}, 4);
    if (r1.per_estimator.at(Estimator::isr).per_trial_mse !=
        r2.per_estimator.at(Estimator::isr).per_trial_mse) {
      ok = false;
      detail += "monte carlo not deterministic; ";
    }
  }

  if (detail.empty()) detail = "steering, PSD, reconstruction, permutation, determinism";
  return report(6, "invariant suite", ok, detail, timer.seconds());
}

// --- criterion 7: exactness on a noiseless on-grid target ------------------

bool criterion_trivial_exactness() {
  Timer timer;
  bool ok = true;
  std::string detail;

  // linear geometry
  {
    Scenario scenario;
    SensingNode node;
    node.num_antennas = 64;
    node.position = Vec3(5, 0, 6);
    scenario.nodes.push_back(node);
    node.position = Vec3(15, 0, 6);
    scenario.nodes.push_back(node);
    scenario.grid = SearchGrid::line({0, 0, 0}, {20, 0, 0}, 0.1);
    TargetSource t;
    t.position = scenario.grid.points[78];  // x = 7.8, exactly on the grid
    t.channel_variances = {1.0, 1.0};
    scenario.targets.push_back(t);
    scenario.noise_power = 1e-6;
    scenario.num_samples = 2;
    scenario.seed = 20101;

    const MonteCarloReport mc = monte_carlo_mse(scenario, {Estimator::isr}, 1);
    const EstimatorStats& stats = mc.per_estimator.at(Estimator::isr);
    if (stats.mse != 0.0 || stats.resolve_rate != 1.0) {
      ok = false;
      detail += "line geometry off; ";
    }
  }

  // square geometry
  {
    Scenario scenario;
    SensingNode node;
    node.num_antennas = 32;
    for (const Vec3& p : {Vec3(0, 10, 6), Vec3(10, 20, 6), Vec3(20, 10, 6),
                          Vec3(10, 0, 6)}) {
      node.position = p;
      scenario.nodes.push_back(node);
    }
    scenario.grid = SearchGrid::rectangle(1, 19, 1, 19, 0.5);
    TargetSource t;
    t.position = scenario.grid.points[13 * 37 + 8];  // (5.0, 7.5)
    t.channel_variances = {1.0, 1.0, 1.0, 1.0};
    scenario.targets.push_back(t);
    scenario.noise_power = 1e-6;
    scenario.num_samples = 2;
    scenario.seed = 20102;

    const MonteCarloReport mc = monte_carlo_mse(scenario, {Estimator::isr}, 1);
    const EstimatorStats& stats = mc.per_estimator.at(Estimator::isr);
    if (stats.mse != 0.0 || stats.resolve_rate != 1.0) {
      ok = false;
      detail += "square geometry off; ";
    }
  }

  if (detail.empty()) detail = "mse exactly 0 on both geometries";
  return report(7, "noiseless exactness", ok, detail, timer.seconds());
}

}  // namespace

int main() {
  bool all = true;
  all &= criterion_resolution();
  all &= criterion_mse_ordering();
  all &= criterion_eight_targets();
  all &= criterion_oracles();
  all &= criterion_consistency();
  all &= criterion_invariants();
  all &= criterion_trivial_exactness();
  std::printf("%s\n", all ? "all criteria passed" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
