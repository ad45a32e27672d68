#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "locsim/csv.hpp"
#include "locsim/scenario_io.hpp"
#include "locsim/svg.hpp"

namespace {

using namespace locsim;

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  std::string estimator = "all";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  int isr_max_iter = 15;
  double isr_tol = 1e-3;
  double mvdr_loading = -1.0;  // <0: automatic
  double bs_det_floor = 1e-300;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_estimator = true) {
  cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the scenario seed");
  cmd->add_option("--threads", args.threads,
                  "worker count (LOCSIM_THREADS overrides)");
  if (needs_estimator) {
    cmd->add_option("--estimator", args.estimator, "mvdr, bs, isr or all")
        ->check(CLI::IsMember({"mvdr", "bs", "isr", "all"}));
    cmd->add_option("--isr-max-iter", args.isr_max_iter, "iteration cap");
    cmd->add_option("--isr-tol", args.isr_tol,
                    "relative spectrum-change tolerance");
    cmd->add_option("--mvdr-loading", args.mvdr_loading,
                    "diagonal loading (negative = automatic)");
    cmd->add_option("--bs-det-floor", args.bs_det_floor,
                    "determinant clamp floor");
    cmd->add_flag("--plot", args.plot, "emit SVG plots next to the CSVs");
  }
}

void apply_threads(int flag_threads) {
  int n = flag_threads;
  if (const char* env = std::getenv("LOCSIM_THREADS"); env && *env) {
    n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
}

std::vector<Estimator> parse_estimators(const std::string& name) {
  if (name == "mvdr") return {Estimator::mvdr};
  if (name == "bs") return {Estimator::bs};
  if (name == "isr") return {Estimator::isr};
  return {Estimator::mvdr, Estimator::bs, Estimator::isr};
}

Scenario load(const CommonArgs& args) {
  Scenario scenario = load_scenario(args.scenario_path);
  if (args.seed) scenario.seed = *args.seed;
  return scenario;
}

PowerSpectrum compute_spectrum(Estimator estimator, const SampleBatch& batch,
                               const SteeringSet& steering,
                               const Scenario& scenario,
                               const CommonArgs& args) {
  switch (estimator) {
    case Estimator::mvdr: {
      const double loading =
          args.mvdr_loading >= 0.0
              ? args.mvdr_loading
              : default_mvdr_loading(batch, scenario.noise_power);
      return mvdr_spectrum(batch, steering, scenario.grid, loading);
    }
    case Estimator::bs: {
      BsOptions options;
      options.det_floor = args.bs_det_floor;
      return bs_spectrum(batch, steering, scenario.grid,
                         scenario.num_targets(), options);
    }
    case Estimator::isr:
    default: {
      TerminationRule rule{args.isr_max_iter, args.isr_tol};
      return isr_spectrum(batch, steering, scenario.grid, scenario.noise_power,
                          rule)
          .first;
    }
  }
}

int run_synth(const CommonArgs& args, bool dump_scm, bool dump_bscm) {
  const Scenario scenario = load(args);
  const SampleBatch batch = synthesize(scenario);
  const std::filesystem::path out(args.out_dir);
  write_snapshots_csv(out / "snapshots.csv", batch);
  if (dump_scm) dump_covariance(scm(batch), out / "scm.bin");
  if (dump_bscm) dump_covariance(block_diag_scm(batch), out / "bscm.bin");
  std::cout << "wrote " << (out / "snapshots.csv").string() << " ("
            << batch.stacked_dim() << " x " << batch.num_samples() << ")\n";
  return 0;
}

int run_spectrum(const CommonArgs& args) {
  const Scenario scenario = load(args);
  const SteeringSet steering = build_steering_set(scenario.nodes, scenario.grid);
  const SampleBatch batch = synthesize(scenario);
  const std::filesystem::path out(args.out_dir);

  std::vector<std::pair<std::string, std::vector<double>>> line_series;
  for (Estimator estimator : parse_estimators(args.estimator)) {
    const PowerSpectrum spectrum =
        compute_spectrum(estimator, batch, steering, scenario, args);
    const std::string name = estimator_name(estimator);
    write_spectrum_csv(out / ("spectrum_" + name + ".csv"), spectrum);
    std::cout << "wrote " << (out / ("spectrum_" + name + ".csv")).string()
              << "\n";
    if (args.plot) {
      if (scenario.grid.descriptor.kind == SearchGrid::Kind::rect) {
        write_heatmap_svg(out / ("spectrum_" + name + ".svg"), scenario.grid,
                          spectrum.values, name + " power spectrum");
        std::cout << "wrote " << (out / ("spectrum_" + name + ".svg")).string()
                  << "\n";
      } else {
        line_series.emplace_back(name, spectrum.values);
      }
    }
  }
  if (!line_series.empty()) {
    write_spectrum_line_svg(out / "spectrum.svg", scenario.grid, line_series);
    std::cout << "wrote " << (out / "spectrum.svg").string() << "\n";
  }
  return 0;
}

void print_report(const std::vector<SweepRow>& rows) {
  for (const auto& row : rows) {
    std::cout << estimator_name(row.estimator) << "  "
              << sweep_axis_name(row.axis) << "=" << row.axis_value
              << "  mse=" << row.stats.mse << " m^2 (+/- "
              << row.stats.std_error << ")  resolve_rate="
              << row.stats.resolve_rate;
    if (row.stats.failures > 0) std::cout << "  failures=" << row.stats.failures;
    std::cout << "\n";
  }
}

MonteCarloOptions make_mc_options(const CommonArgs& args) {
  MonteCarloOptions options;
  options.isr_termination = TerminationRule{args.isr_max_iter, args.isr_tol};
  options.mvdr_loading = args.mvdr_loading;
  options.bs_det_floor = args.bs_det_floor;
  return options;
}

int run_mse(const CommonArgs& args, int trials, bool paper_scale) {
  const Scenario scenario = load(args);
  if (paper_scale) trials = 10000;
  const auto estimators = parse_estimators(args.estimator);
  const MonteCarloReport report =
      monte_carlo_mse(scenario, estimators, trials, make_mc_options(args));

  std::vector<SweepRow> rows;
  for (Estimator estimator : estimators) {
    rows.push_back({estimator, SweepAxis::num_samples,
                    static_cast<double>(scenario.num_samples),
                    report.per_estimator.at(estimator)});
  }
  const std::filesystem::path out(args.out_dir);
  write_mse_csv(out / "mse.csv", rows);
  std::cout << report.config_echo << "\n";
  print_report(rows);
  std::cout << "wrote " << (out / "mse.csv").string() << "\n";
  return 0;
}

int run_sweep_cmd(const CommonArgs& args, const std::string& axis,
                  std::vector<double> values, int trials, bool paper_scale,
                  bool plot) {
  const Scenario scenario = load(args);
  SweepSpec spec;
  spec.axis = parse_sweep_axis(axis);
  spec.values = std::move(values);
  spec.estimators = parse_estimators(args.estimator);
  spec.trials = paper_scale ? 10000 : trials;
  const std::vector<SweepRow> rows =
      run_sweep(scenario, spec, make_mc_options(args));

  const std::filesystem::path out(args.out_dir);
  write_mse_csv(out / "sweep.csv", rows);
  print_report(rows);
  std::cout << "wrote " << (out / "sweep.csv").string() << "\n";

  if (plot) {
    std::vector<SvgSeries> series;
    for (Estimator estimator : spec.estimators) {
      SvgSeries s;
      s.label = estimator_name(estimator);
      for (const auto& row : rows) {
        if (row.estimator != estimator) continue;
        s.x.push_back(row.axis_value);
        s.y.push_back(std::log10(std::max(row.stats.mse, 1e-12)));
      }
      series.push_back(std::move(s));
    }
    write_line_chart_svg(out / "sweep.svg", series, sweep_axis_name(spec.axis),
                         "log10 MSE (m^2)", "localization error");
    std::cout << "wrote " << (out / "sweep.svg").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative passive localization simulator"};
  app.require_subcommand(1);

  CommonArgs synth_args, spectrum_args, mse_args, sweep_args;
  bool dump_scm = false, dump_bscm = false;
  int mse_trials = 200, sweep_trials = 200;
  bool mse_paper = false, sweep_paper = false;
  std::string sweep_axis = "num_samples";
  std::vector<double> sweep_values;

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "synthesize one snapshot batch");
  add_common(synth_cmd, synth_args, false);
  synth_cmd->add_flag("--dump-scm", dump_scm, "dump the sample covariance");
  synth_cmd->add_flag("--dump-bscm", dump_bscm,
                      "dump the block-diagonal sample covariance");

  CLI::App* spectrum_cmd =
      app.add_subcommand("spectrum", "estimate power spectra for one batch");
  add_common(spectrum_cmd, spectrum_args);

  CLI::App* mse_cmd =
      app.add_subcommand("mse", "Monte-Carlo localization error at the "
                                "scenario settings");
  add_common(mse_cmd, mse_args);
  mse_cmd->add_option("--trials", mse_trials, "Monte-Carlo trials");
  mse_cmd->add_flag("--paper-scale", mse_paper, "run 10000 trials");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Monte-Carlo error across an axis");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--axis", sweep_axis,
                        "num_samples, snr_db or num_antennas");
  sweep_cmd->add_option("--values", sweep_values, "axis values, increasing")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--trials", sweep_trials, "Monte-Carlo trials per value");
  sweep_cmd->add_flag("--paper-scale", sweep_paper, "run 10000 trials");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      apply_threads(synth_args.threads);
      return run_synth(synth_args, dump_scm, dump_bscm);
    }
    if (spectrum_cmd->parsed()) {
      apply_threads(spectrum_args.threads);
      return run_spectrum(spectrum_args);
    }
    if (mse_cmd->parsed()) {
      apply_threads(mse_args.threads);
      return run_mse(mse_args, mse_trials, mse_paper);
    }
    if (sweep_cmd->parsed()) {
      apply_threads(sweep_args.threads);
      return run_sweep_cmd(sweep_args, sweep_axis, sweep_values, sweep_trials,
                           sweep_paper, sweep_args.plot);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
