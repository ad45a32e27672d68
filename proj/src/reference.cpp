#include "locsim/reference.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace locsim::ref {

Eigen::VectorXcd steering_vector(const SensingNode& node, const Vec3& point) {
  const int n_r = node.num_antennas;
  Eigen::VectorXcd a(n_r);
  double dx = node.position.x() - point.x();
  double dy = node.position.y() - point.y();
  double dz = node.position.z() - point.z();
  const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
  dx /= dist;
  dy /= dist;
  dz /= dist;
  const double cos_angle =
      dx * node.axis.x() + dy * node.axis.y() + dz * node.axis.z();
  for (int m = 0; m < n_r; ++m) {
    const double phase =
        2.0 * M_PI * node.spacing_over_wavelength * m * cos_angle;
    a(m) = cdouble(std::cos(phase), std::sin(phase)) / std::sqrt(double(n_r));
  }
  return a;
}

Eigen::MatrixXcd dense_steering_matrix(const SteeringSet& steering, int i) {
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_r * n_l, n_l);
  for (int l = 0; l < n_l; ++l) {
    a.col(l).segment(l * n_r, n_r) = steering.per_node[l].col(i);
  }
  return a;
}

std::vector<double> mvdr_spectrum(const SampleBatch& batch,
                                  const SteeringSet& steering, double loading) {
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  const double n_s = static_cast<double>(batch.num_samples());

  std::vector<Eigen::MatrixXcd> inverse_blocks(n_l);
  for (int l = 0; l < n_l; ++l) {
    Eigen::MatrixXcd r_l = Eigen::MatrixXcd::Zero(n_r, n_r);
    for (int n = 0; n < batch.num_samples(); ++n) {
      r_l += batch.y_node(l, n) * batch.y_node(l, n).adjoint();
    }
    r_l /= n_s;
    r_l += loading * Eigen::MatrixXcd::Identity(n_r, n_r);
    inverse_blocks[l] = r_l.inverse();
  }

  std::vector<double> power(n_g);
  for (int i = 0; i < n_g; ++i) {
    cdouble denom = 0.0;
    for (int l = 0; l < n_l; ++l) {
      const Eigen::VectorXcd a = steering.per_node[l].col(i);
      denom += (a.adjoint() * inverse_blocks[l] * a)(0, 0);
    }
    power[i] = 1.0 / denom.real();
  }
  return power;
}

std::vector<double> bs_spectrum_from_cov(const Eigen::MatrixXcd& cov,
                                         const SteeringSet& steering,
                                         int num_targets) {
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  const int dim = n_r * n_l;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov);
  // Sort descending by eigenvalue, then keep eigenvectors K*L+1 .. dim.
  Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = num_targets * n_l; j < dim; ++j) {
    const Eigen::VectorXcd u = es.eigenvectors().col(dim - 1 - j);
    projector += u * u.adjoint();
  }

  std::vector<double> power(n_g);
  for (int i = 0; i < n_g; ++i) {
    const Eigen::MatrixXcd a_i = dense_steering_matrix(steering, i);
    const Eigen::MatrixXcd m = a_i.adjoint() * projector * a_i;
    power[i] = 1.0 / m.determinant().real();
  }
  return power;
}

std::vector<double> bs_spectrum(const SampleBatch& batch,
                                const SteeringSet& steering, int num_targets) {
  Eigen::MatrixXcd cov =
      batch.snapshots * batch.snapshots.adjoint() / double(batch.num_samples());
  cov = ((cov + cov.adjoint()) * 0.5).eval();
  return bs_spectrum_from_cov(cov, steering, num_targets);
}

IsrTrace isr_run(const SampleBatch& batch, const SteeringSet& steering,
                 double sigma_v2, int iterations) {
  const int n_l = steering.num_nodes();
  const int n_r = steering.num_antennas;
  const int n_g = steering.num_points();
  const int n_s = batch.num_samples();
  const int dim = n_r * n_l;

  IsrTrace trace;
  // Block-diagonal sample covariance plus the known noise floor.
  trace.r_hat = Eigen::MatrixXcd::Zero(dim, dim);
  for (int l = 0; l < n_l; ++l) {
    Eigen::MatrixXcd r_l = Eigen::MatrixXcd::Zero(n_r, n_r);
    for (int n = 0; n < n_s; ++n) {
      r_l += batch.y_node(l, n) * batch.y_node(l, n).adjoint();
    }
    trace.r_hat.block(l * n_r, l * n_r, n_r, n_r) = r_l / double(n_s);
  }
  trace.r_hat += sigma_v2 * Eigen::MatrixXcd::Identity(dim, dim);

  trace.x_hat.assign(n_g, Eigen::MatrixXcd::Zero(n_l, n_s));
  trace.lambda_hat.assign(n_g, Eigen::MatrixXcd::Zero(n_l, n_l));
  trace.power.assign(n_g, 0.0);

  for (int t = 0; t < iterations; ++t) {
    const Eigen::MatrixXcd r_inv = trace.r_hat.inverse();
    for (int i = 0; i < n_g; ++i) {
      const Eigen::MatrixXcd a_i = dense_steering_matrix(steering, i);
      const Eigen::MatrixXcd g = a_i.adjoint() * r_inv * a_i;
      const Eigen::MatrixXcd w = g.inverse() * a_i.adjoint() * r_inv;
      for (int n = 0; n < n_s; ++n) {
        trace.x_hat[i].col(n) = w * batch.y(n);
      }
      trace.lambda_hat[i].setZero();
      for (int n = 0; n < n_s; ++n) {
        trace.lambda_hat[i] +=
            trace.x_hat[i].col(n) * trace.x_hat[i].col(n).adjoint();
      }
      trace.lambda_hat[i] /= double(n_s);
    }
    trace.r_hat = sigma_v2 * Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < n_g; ++i) {
      const Eigen::MatrixXcd a_i = dense_steering_matrix(steering, i);
      trace.r_hat += a_i * trace.lambda_hat[i] * a_i.adjoint();
    }
    for (int i = 0; i < n_g; ++i) {
      trace.power[i] = trace.lambda_hat[i].trace().real() / n_r;
    }
  }
  return trace;
}

}  // namespace locsim::ref
