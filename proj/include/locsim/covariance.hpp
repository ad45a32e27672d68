#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "locsim/synth.hpp"

namespace locsim {

struct CovarianceMatrix {
  enum class Kind { scm, block_diag_scm, analytic, isr_reconstructed };

  Eigen::MatrixXcd matrix;  // Hermitian (symmetrized on construction)
  Kind kind = Kind::scm;
  double loading = 0.0;  // diagonal loading applied, kept for audit

  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// M <- (M + M^H)/2.
void symmetrize(Eigen::MatrixXcd& m);

/// Conventional sample covariance (1/N_s) sum_n y(n) y(n)^H.
CovarianceMatrix scm(const SampleBatch& batch);

/// Per-node sample covariances, i.e. the diagonal blocks of block_diag_scm.
std::vector<Eigen::MatrixXcd> per_node_scm(const SampleBatch& batch);

/// Block-diagonal sample covariance; cross-node blocks are exactly zero.
CovarianceMatrix block_diag_scm(const SampleBatch& batch);

/// Analytic stacked covariance sum_k A_k Lambda_k A_k^H + sigma_v^2 I.
/// Without realized_channels, Lambda_k = N_R diag(sigma_{l,k}^2) (ensemble
/// average over channel draws); with an L x K realization, Lambda_k =
/// N_R alpha_k alpha_k^H (conditioned on that draw).
CovarianceMatrix analytic_covariance(
    const Scenario& scenario,
    const std::optional<Eigen::MatrixXcd>& realized_channels = std::nullopt);

/// Binary artifact: uint64 rows, uint64 cols, then row-major complex doubles.
void dump_covariance(const CovarianceMatrix& cov,
                     const std::filesystem::path& path);
Eigen::MatrixXcd load_covariance(const std::filesystem::path& path);

}  // namespace locsim
