#include "locsim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace locsim {

namespace {

constexpr double kConditionLimit = 1e12;

// Column-chunked triangular back-substitution; chunks are independent, so
// the loop parallelizes without changing any result bits.
Eigen::MatrixXcd chunked_solve(const Eigen::LLT<Eigen::MatrixXcd>& llt,
                               const Eigen::MatrixXcd& rhs) {
  Eigen::MatrixXcd out(rhs.rows(), rhs.cols());
  const int cols = static_cast<int>(rhs.cols());
  const int chunk = 64;
  const int n_chunks = (cols + chunk - 1) / chunk;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n_chunks; ++c) {
    const int c0 = c * chunk;
    const int w = std::min(chunk, cols - c0);
    out.middleCols(c0, w) = llt.solve(rhs.middleCols(c0, w));
  }
  return out;
}

std::vector<int> gather_flags(const std::vector<char>& flags) {
  std::vector<int> out;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

void check_dims(const SteeringSet& steering, const SearchGrid& grid) {
  if (steering.num_points() != grid.size()) {
    throw ValidationError("steering set and grid sizes disagree");
  }
}

}  // namespace

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::mvdr: return "mvdr";
    case Estimator::bs: return "bs";
    case Estimator::isr: return "isr";
  }
  return "unknown";
}

double default_mvdr_loading(const SampleBatch& batch, double sigma_v2) {
  return batch.num_samples() >= batch.num_antennas ? 0.0 : sigma_v2;
}

PowerSpectrum mvdr_spectrum_from_blocks(const std::vector<Eigen::MatrixXcd>& blocks,
                                        const SteeringSet& steering,
                                        const SearchGrid& grid, double loading) {
  check_dims(steering, grid);
  if (loading < 0.0) throw ValidationError("diagonal loading must be nonnegative");
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  if (static_cast<int>(blocks.size()) != n_l) {
    throw ValidationError("need one covariance block per node");
  }

  std::vector<double> denom(n_g, 0.0);
  for (int l = 0; l < n_l; ++l) {
    if (blocks[l].rows() != n_r || blocks[l].cols() != n_r) {
      throw ValidationError("covariance block has the wrong shape");
    }
    Eigen::MatrixXcd m = blocks[l];
    m.diagonal().array() += loading;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    const double max_eig = es.eigenvalues().maxCoeff();
    if (!(min_eig > 0.0) || min_eig <= max_eig * 1e-13) {
      throw NumericalError(
          "sample covariance block " + std::to_string(l) +
          " is numerically singular (fewer samples than antennas?); "
          "add diagonal loading, e.g. the noise power sigma_v^2");
    }
    const Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Cholesky factorization of block " +
                           std::to_string(l) + " failed; increase loading");
    }
    const Eigen::MatrixXcd solved = chunked_solve(llt, steering.per_node[l]);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_g; ++i) {
      denom[i] += steering.a(l, i).dot(solved.col(i)).real();
    }
  }

  PowerSpectrum spectrum;
  spectrum.estimator = Estimator::mvdr;
  spectrum.grid = &grid;
  spectrum.loading = loading;
  spectrum.values.resize(n_g);
  for (int i = 0; i < n_g; ++i) {
    if (!(denom[i] > 0.0) || !std::isfinite(denom[i])) {
      throw NumericalError("MVDR denominator not positive at grid point " +
                           std::to_string(i));
    }
    spectrum.values[i] = 1.0 / denom[i];
  }
  return spectrum;
}

PowerSpectrum mvdr_spectrum(const SampleBatch& batch, const SteeringSet& steering,
                            const SearchGrid& grid, double loading) {
  return mvdr_spectrum_from_blocks(per_node_scm(batch), steering, grid, loading);
}

PowerSpectrum bs_spectrum_from_cov(const CovarianceMatrix& cov,
                                   const SteeringSet& steering,
                                   const SearchGrid& grid, int num_targets,
                                   const BsOptions& options) {
  check_dims(steering, grid);
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  const int dim = n_r * n_l;
  if (num_targets < 1) throw ValidationError("need at least one target");
  if (num_targets * n_l >= dim) {
    throw ValidationError(
        "invalid subspace: K*L = " + std::to_string(num_targets * n_l) +
        " leaves no noise subspace in dimension " + std::to_string(dim));
  }
  if (cov.dim() != dim) throw ValidationError("covariance dimension mismatch");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the sample covariance failed");
  }
  // Eigenvalues come out ascending: the leading columns span the noise
  // subspace (everything beyond the K*L strongest directions).
  const int noise_dim = dim - num_targets * n_l;
  const Eigen::MatrixXcd u_noise = es.eigenvectors().leftCols(noise_dim);

  // c[l] holds U_n^H applied to node l's steering columns.
  std::vector<Eigen::MatrixXcd> c(n_l);
  for (int l = 0; l < n_l; ++l) {
    c[l] = u_noise.middleRows(l * n_r, n_r).adjoint() * steering.per_node[l];
  }

  PowerSpectrum spectrum;
  spectrum.estimator = Estimator::bs;
  spectrum.grid = &grid;
  spectrum.values.resize(n_g);
  std::vector<char> clamped(n_g, 0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_g; ++i) {
    Eigen::MatrixXcd b(noise_dim, n_l);
    for (int l = 0; l < n_l; ++l) b.col(l) = c[l].col(i);
    const Eigen::MatrixXcd gram = b.adjoint() * b;
    const double det = gram.determinant().real();
    if (det < options.det_floor) {
      spectrum.values[i] = 1.0 / options.det_floor;
      clamped[i] = 1;
    } else {
      spectrum.values[i] = 1.0 / det;
    }
  }
  spectrum.clamped_points = gather_flags(clamped);
  return spectrum;
}

PowerSpectrum bs_spectrum(const SampleBatch& batch, const SteeringSet& steering,
                          const SearchGrid& grid, int num_targets,
                          const BsOptions& options) {
  return bs_spectrum_from_cov(scm(batch), steering, grid, num_targets, options);
}

IsrState isr_init(const SampleBatch& batch, double sigma_v2) {
  if (!(sigma_v2 > 0.0)) throw ValidationError("noise power must be positive");
  IsrState state;
  state.r_hat = block_diag_scm(batch);
  state.r_hat.matrix.diagonal().array() += sigma_v2;
  state.r_hat.loading = sigma_v2;
  state.iteration = 0;
  return state;
}

void isr_update_x(IsrState& state, const SampleBatch& batch,
                  const SteeringSet& steering) {
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  const int n_s = batch.num_samples();
  const int dim = n_r * n_l;
  if (batch.num_nodes != n_l || batch.num_antennas != n_r) {
    throw ValidationError("batch and steering set disagree on array layout");
  }
  if (state.r_hat.dim() != dim) {
    throw ValidationError("covariance iterate has the wrong dimension");
  }

  const Eigen::LLT<Eigen::MatrixXcd> llt(state.r_hat.matrix);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("covariance iterate is not positive definite");
  }

  // One factorization serves every right-hand side of the iteration:
  // solved[l] carries R^-1 applied to node l's embedded steering columns,
  // w carries R^-1 y(n).
  std::vector<Eigen::MatrixXcd> solved(n_l);
  {
    Eigen::MatrixXcd embedded = Eigen::MatrixXcd::Zero(dim, n_g);
    for (int l = 0; l < n_l; ++l) {
      embedded.setZero();
      embedded.middleRows(l * n_r, n_r) = steering.per_node[l];
      solved[l] = chunked_solve(llt, embedded);
    }
  }
  const Eigen::MatrixXcd w = chunked_solve(llt, batch.snapshots);

  state.x_hat.assign(n_g, Eigen::MatrixXcd());
  std::vector<char> flagged(n_g, 0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_g; ++i) {
    Eigen::MatrixXcd g(n_l, n_l);
    for (int lp = 0; lp < n_l; ++lp) {
      const auto col = solved[lp].col(i);
      for (int l = 0; l < n_l; ++l) {
        g(l, lp) = steering.a(l, i).dot(col.segment(l * n_r, n_r));
      }
    }
    g = ((g + g.adjoint()) * 0.5).eval();

    Eigen::MatrixXcd z(n_l, n_s);
    for (int n = 0; n < n_s; ++n) {
      const auto wn = w.col(n);
      for (int l = 0; l < n_l; ++l) {
        z(l, n) = steering.a(l, i).dot(wn.segment(l * n_r, n_r));
      }
    }

    // Rank-truncated least-squares solve of g * x = z.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    const Eigen::VectorXd evals = es.eigenvalues();
    const double max_eig = evals(n_l - 1);
    const double cutoff = std::max(max_eig, 0.0) * 1e-14;
    if (!(evals(0) > 0.0) || max_eig > kConditionLimit * evals(0)) {
      flagged[i] = 1;
    }
    Eigen::VectorXcd inv(n_l);
    for (int j = 0; j < n_l; ++j) {
      inv(j) = evals(j) > cutoff ? cdouble(1.0 / evals(j), 0.0) : cdouble(0.0, 0.0);
    }
    state.x_hat[i] = es.eigenvectors() * inv.asDiagonal() *
                     es.eigenvectors().adjoint() * z;
  }
  state.ill_conditioned = gather_flags(flagged);
}

void isr_update_lambda(IsrState& state) {
  if (state.x_hat.empty()) {
    throw ValidationError("source estimates must be updated before the covariances");
  }
  const int n_g = static_cast<int>(state.x_hat.size());
  const double n_s = static_cast<double>(state.x_hat[0].cols());
  state.lambda_hat.assign(n_g, Eigen::MatrixXcd());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_g; ++i) {
    Eigen::MatrixXcd lambda = state.x_hat[i] * state.x_hat[i].adjoint() / n_s;
    symmetrize(lambda);
    state.lambda_hat[i] = std::move(lambda);
  }
}

void isr_update_r(IsrState& state, const SteeringSet& steering, double sigma_v2) {
  if (state.lambda_hat.empty()) {
    throw ValidationError("source covariances must be updated before the reconstruction");
  }
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  const int dim = n_r * n_l;
  if (static_cast<int>(state.lambda_hat.size()) != n_g) {
    throw ValidationError("per-point covariance count does not match the grid");
  }

  Eigen::MatrixXcd r = sigma_v2 * Eigen::MatrixXcd::Identity(dim, dim);
  // Block (l, lp) of sum_i A_i Lambda_i A_i^H collapses to
  // A_l diag(Lambda_i(l, lp)) A_lp^H over the grid; each block is one GEMM.
  for (int l = 0; l < n_l; ++l) {
    for (int lp = l; lp < n_l; ++lp) {
      Eigen::VectorXcd d(n_g);
      for (int i = 0; i < n_g; ++i) d(i) = state.lambda_hat[i](l, lp);
      const Eigen::MatrixXcd scaled = steering.per_node[l] * d.asDiagonal();

      Eigen::MatrixXcd block(n_r, n_r);
      const int chunk = 32;
      const int n_chunks = (n_r + chunk - 1) / chunk;
#pragma omp parallel for schedule(static)
      for (int c = 0; c < n_chunks; ++c) {
        const int c0 = c * chunk;
        const int width = std::min(chunk, n_r - c0);
        block.middleCols(c0, width) =
            scaled * steering.per_node[lp].middleRows(c0, width).adjoint();
      }
      r.block(l * n_r, lp * n_r, n_r, n_r) += block;
      if (lp != l) {
        r.block(lp * n_r, l * n_r, n_r, n_r) += block.adjoint();
      }
    }
  }
  symmetrize(r);
  state.r_hat.matrix = std::move(r);
  state.r_hat.kind = CovarianceMatrix::Kind::isr_reconstructed;
  state.r_hat.loading = 0.0;
}

std::vector<double> isr_power(const IsrState& state, int num_antennas) {
  if (state.lambda_hat.empty()) {
    throw ValidationError("no source covariances to read the spectrum from");
  }
  std::vector<double> power(state.lambda_hat.size());
  for (size_t i = 0; i < state.lambda_hat.size(); ++i) {
    power[i] = state.lambda_hat[i].trace().real() / num_antennas;
  }
  return power;
}

std::pair<PowerSpectrum, IsrState> isr_spectrum(const SampleBatch& batch,
                                                const SteeringSet& steering,
                                                const SearchGrid& grid,
                                                double sigma_v2,
                                                const TerminationRule& termination) {
  check_dims(steering, grid);
  if (termination.max_iterations < 1) {
    throw ValidationError("need at least one iteration");
  }

  IsrState state = isr_init(batch, sigma_v2);
  PowerSpectrum spectrum;
  spectrum.estimator = Estimator::isr;
  spectrum.grid = &grid;

  std::vector<double> prev;
  for (int t = 1; t <= termination.max_iterations; ++t) {
    isr_update_x(state, batch, steering);
    isr_update_lambda(state);
    isr_update_r(state, steering, sigma_v2);
    std::vector<double> power = isr_power(state, steering.num_antennas);
    for (size_t i = 0; i < power.size(); ++i) {
      if (!std::isfinite(power[i])) {
        throw IterationAbort("non-finite spectrum value at iteration " +
                                 std::to_string(t) + ", grid point " +
                                 std::to_string(i),
                             t, static_cast<int>(i));
      }
    }
    state.iteration = t;
    spectrum.values = power;

    if (!prev.empty()) {
      double prev_norm = 0.0, diff = 0.0, curr_norm = 0.0;
      for (size_t i = 0; i < power.size(); ++i) {
        prev_norm += prev[i] * prev[i];
        curr_norm += power[i] * power[i];
        diff += (power[i] - prev[i]) * (power[i] - prev[i]);
      }
      if (prev_norm == 0.0) {
        if (curr_norm == 0.0) break;
      } else if (std::sqrt(diff / prev_norm) < termination.tol) {
        break;
      }
    }
    prev = std::move(power);
  }
  spectrum.iterations_run = state.iteration;
  return {std::move(spectrum), std::move(state)};
}

}  // namespace locsim
