#pragma once

#include <vector>

#include "locsim/covariance.hpp"

// Serial straight-line evaluations of the same quantities the library
// computes with factorizations and OpenMP loops. Everything here uses
// explicit inverses and scalar loops on purpose: tests compare the fast
// kernels against these, and the benchmark measures the gap. Not linked
// into the CLI.
namespace locsim::ref {

/// Element-by-element steering vector, scalar phase accumulation.
Eigen::VectorXcd steering_vector(const SensingNode& node, const Vec3& point);

/// Dense (N_R*L) x L block-diagonal steering matrix for grid point i.
Eigen::MatrixXcd dense_steering_matrix(const SteeringSet& steering, int i);

std::vector<double> mvdr_spectrum(const SampleBatch& batch,
                                  const SteeringSet& steering, double loading);

std::vector<double> bs_spectrum_from_cov(const Eigen::MatrixXcd& cov,
                                         const SteeringSet& steering,
                                         int num_targets);
std::vector<double> bs_spectrum(const SampleBatch& batch,
                                const SteeringSet& steering, int num_targets);

struct IsrTrace {
  Eigen::MatrixXcd r_hat;
  std::vector<Eigen::MatrixXcd> lambda_hat;  // L x L per grid point
  std::vector<Eigen::MatrixXcd> x_hat;       // L x N_s per grid point
  std::vector<double> power;
};

/// Fixed number of full sparse-recovery cycles, one grid point at a time.
IsrTrace isr_run(const SampleBatch& batch, const SteeringSet& steering,
                 double sigma_v2, int iterations);

}  // namespace locsim::ref
