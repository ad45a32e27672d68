#pragma once

#include <string>
#include <utility>
#include <vector>

#include "locsim/covariance.hpp"

namespace locsim {

enum class Estimator { mvdr, bs, isr };
std::string estimator_name(Estimator e);

struct PowerSpectrum {
  std::vector<double> values;  // nonnegative power per grid point
  const SearchGrid* grid = nullptr;
  Estimator estimator = Estimator::mvdr;
  int iterations_run = 0;          // isr only
  double loading = 0.0;            // mvdr diagonal loading used
  std::vector<int> clamped_points; // bs points whose determinant hit the floor
};

struct TerminationRule {
  int max_iterations = 15;
  double tol = 1e-3;  // relative L2 change of the spectrum between cycles
};

struct BsOptions {
  double det_floor = 1e-300;  // determinants below this are clamped
};

/// Iterate of the sparse-recovery cycle. Empty lambda_hat/x_hat stand for
/// the all-zero initialization; they are sized on the first update.
struct IsrState {
  CovarianceMatrix r_hat;
  std::vector<Eigen::MatrixXcd> lambda_hat;  // per grid point, L x L PSD
  std::vector<Eigen::MatrixXcd> x_hat;       // per grid point, L x N_s
  int iteration = 0;
  std::vector<int> ill_conditioned;  // points flagged in the last x update
};

/// Zero when the per-node sample covariances are full rank (N_s >= N_R),
/// the known noise power otherwise.
double default_mvdr_loading(const SampleBatch& batch, double sigma_v2);

/// P_i = 1 / sum_l a_l(p_i)^H (R_l + loading I)^{-1} a_l(p_i) with R_l the
/// per-node sample covariances.
PowerSpectrum mvdr_spectrum(const SampleBatch& batch, const SteeringSet& steering,
                            const SearchGrid& grid, double loading = 0.0);
PowerSpectrum mvdr_spectrum_from_blocks(const std::vector<Eigen::MatrixXcd>& blocks,
                                        const SteeringSet& steering,
                                        const SearchGrid& grid,
                                        double loading = 0.0);

/// P_i = 1 / det(A_i^H Pi A_i) with Pi the projector onto the eigenvectors of
/// the conventional SCM beyond the K*L strongest.
PowerSpectrum bs_spectrum(const SampleBatch& batch, const SteeringSet& steering,
                          const SearchGrid& grid, int num_targets,
                          const BsOptions& options = {});
PowerSpectrum bs_spectrum_from_cov(const CovarianceMatrix& cov,
                                   const SteeringSet& steering,
                                   const SearchGrid& grid, int num_targets,
                                   const BsOptions& options = {});

/// R^(0) = block-diagonal SCM + sigma_v^2 I, with the loading recorded.
IsrState isr_init(const SampleBatch& batch, double sigma_v2);

/// x_i(n) = (A_i^H R^-1 A_i)^-1 A_i^H R^-1 y(n) for every grid point and
/// sample. R is factorized once and back-substituted for all right-hand
/// sides; grid points whose L x L system is near-singular are flagged in
/// state.ill_conditioned and solved in a rank-truncated least-squares sense.
void isr_update_x(IsrState& state, const SampleBatch& batch,
                  const SteeringSet& steering);

/// Lambda_i = (1/N_s) sum_n x_i(n) x_i(n)^H.
void isr_update_lambda(IsrState& state);

/// R = sum_i A_i Lambda_i A_i^H + sigma_v^2 I.
void isr_update_r(IsrState& state, const SteeringSet& steering,
                  double sigma_v2);

/// P_i = trace(Lambda_i) / N_R.
std::vector<double> isr_power(const IsrState& state, int num_antennas);

/// Runs the cyclic updates until the spectrum change drops below tol or
/// max_iterations is reached.
std::pair<PowerSpectrum, IsrState> isr_spectrum(const SampleBatch& batch,
                                                const SteeringSet& steering,
                                                const SearchGrid& grid,
                                                double sigma_v2,
                                                const TerminationRule& termination = {});

}  // namespace locsim
