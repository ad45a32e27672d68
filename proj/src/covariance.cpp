#include "locsim/covariance.hpp"

#include <cstdint>
#include <fstream>

#include "locsim/errors.hpp"

namespace locsim {

void symmetrize(Eigen::MatrixXcd& m) {
  m = ((m + m.adjoint()) * 0.5).eval();
}

CovarianceMatrix scm(const SampleBatch& batch) {
  if (batch.num_samples() < 1) throw ValidationError("empty sample batch");
  CovarianceMatrix cov;
  cov.kind = CovarianceMatrix::Kind::scm;
  cov.matrix = batch.snapshots * batch.snapshots.adjoint() /
               static_cast<double>(batch.num_samples());
  symmetrize(cov.matrix);
  return cov;
}

std::vector<Eigen::MatrixXcd> per_node_scm(const SampleBatch& batch) {
  if (batch.num_samples() < 1) throw ValidationError("empty sample batch");
  const int n_r = batch.num_antennas;
  std::vector<Eigen::MatrixXcd> blocks(batch.num_nodes);
  for (int l = 0; l < batch.num_nodes; ++l) {
    const auto slice = batch.snapshots.middleRows(l * n_r, n_r);
    blocks[l] = slice * slice.adjoint() / static_cast<double>(batch.num_samples());
    symmetrize(blocks[l]);
  }
  return blocks;
}

CovarianceMatrix block_diag_scm(const SampleBatch& batch) {
  const auto blocks = per_node_scm(batch);
  const int n_r = batch.num_antennas;
  CovarianceMatrix cov;
  cov.kind = CovarianceMatrix::Kind::block_diag_scm;
  cov.matrix = Eigen::MatrixXcd::Zero(batch.stacked_dim(), batch.stacked_dim());
  for (int l = 0; l < batch.num_nodes; ++l) {
    cov.matrix.block(l * n_r, l * n_r, n_r, n_r) = blocks[l];
  }
  return cov;
}

CovarianceMatrix analytic_covariance(
    const Scenario& scenario,
    const std::optional<Eigen::MatrixXcd>& realized_channels) {
  // Deliberately lighter checks than Scenario::validate: the noise-only
  // (zero target) covariance is well defined and useful.
  if (scenario.nodes.empty()) throw ValidationError("scenario needs nodes");
  for (const auto& node : scenario.nodes) node.validate();
  if (!(scenario.noise_power > 0.0)) {
    throw ValidationError("noise power must be positive");
  }
  for (const auto& target : scenario.targets) {
    if (target.channel_variances.size() != scenario.nodes.size()) {
      throw ValidationError("need one channel variance per node");
    }
  }
  const int n_l = scenario.num_nodes();
  const int n_k = scenario.num_targets();
  const int n_r = scenario.nodes[0].num_antennas;
  const int dim = n_r * n_l;
  if (realized_channels &&
      (realized_channels->rows() != n_l || realized_channels->cols() != n_k)) {
    throw ValidationError("realized channel matrix must be L x K");
  }

  CovarianceMatrix cov;
  cov.kind = CovarianceMatrix::Kind::analytic;
  cov.matrix = scenario.noise_power *
               Eigen::MatrixXcd::Identity(dim, dim);
  for (int k = 0; k < n_k; ++k) {
    Eigen::MatrixXcd a_k(dim, n_l);  // dense block-diagonal steering matrix
    a_k.setZero();
    for (int l = 0; l < n_l; ++l) {
      a_k.col(l).segment(l * n_r, n_r) =
          steering_vector(scenario.nodes[l], scenario.targets[k].position);
    }
    Eigen::MatrixXcd lambda;
    if (realized_channels) {
      const Eigen::VectorXcd alpha = realized_channels->col(k);
      lambda = static_cast<double>(n_r) * alpha * alpha.adjoint();
    } else {
      Eigen::VectorXd variances(n_l);
      for (int l = 0; l < n_l; ++l) {
        variances(l) = scenario.targets[k].channel_variances[l];
      }
      lambda = (static_cast<double>(n_r) * variances)
                   .asDiagonal()
                   .toDenseMatrix()
                   .cast<cdouble>();
    }
    cov.matrix += a_k * lambda * a_k.adjoint();
  }
  symmetrize(cov.matrix);
  return cov;
}

void dump_covariance(const CovarianceMatrix& cov,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  const std::uint64_t rows = cov.matrix.rows();
  const std::uint64_t cols = cov.matrix.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      const cdouble v = cov.matrix(static_cast<int>(r), static_cast<int>(c));
      const double re = v.real(), im = v.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

Eigen::MatrixXcd load_covariance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
    throw ValidationError("corrupt covariance artifact: " + path.string());
  }
  Eigen::MatrixXcd m(static_cast<int>(rows), static_cast<int>(cols));
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      m(static_cast<int>(r), static_cast<int>(c)) = {re, im};
    }
  }
  if (!in) throw ValidationError("truncated covariance artifact: " + path.string());
  return m;
}

}  // namespace locsim
