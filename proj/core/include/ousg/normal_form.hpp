#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ousg/model.hpp"

namespace ousg {

/// One factor of the normal decomposition: unit covariance and drift
/// rate * (R - I) with R real skew-symmetric.
struct BuildingBlock {
  double lambda;
  Eigen::MatrixXd R;
};

/// Constructs the building-block model with drift lambda * (R - I).
/// Throws unless R is skew-symmetric within 1e-12 and lambda > 0.
OUModel building_block_model(const BuildingBlock& block);

/// Block-diagonal canonical data: 2x2 blocks [[-lambda, q], [-q, -lambda]]
/// followed by scalar rates. Original coordinates map to canonical ones by
/// z = basis^T * whitening * x; blocks are ordered by descending lambda
/// (ties by descending q), scalars by descending lambda, and every q > 0.
struct CanonicalForm {
  std::vector<std::pair<double, double>> blocks;  // (lambda_2j, q_j)
  std::vector<double> scalars;                    // lambda_i tail
  Eigen::MatrixXd basis;                          // orthogonal
  Eigen::MatrixXd whitening;                      // Q^{-1/2}
  int demoted_blocks = 0;  // complex pairs resolved to scalars by the q threshold

  int dim() const { return static_cast<int>(2 * blocks.size() + scalars.size()); }
  Eigen::VectorXd to_canonical(const Eigen::VectorXd& x) const {
    return basis.transpose() * (whitening * x);
  }
  Eigen::VectorXd from_canonical(const Eigen::VectorXd& z) const;
  /// Drift in canonical coordinates (block diagonal).
  Eigen::MatrixXd canonical_drift() const;
  /// Rate per canonical coordinate: lambda_2j repeated for each block, then
  /// the scalar tail. This is the lambda-vector of the kappa bound kernel.
  SpectralParams expanded_rates() const;
};

struct NormalityCheck {
  bool normal;
  double commutator_norm;
  double tolerance;
};

/// Commutator test on A = Qinf^{-1/2} B Qinf^{1/2}: the semigroup is taken
/// as normal when ||A A^T - A^T A||_F <= tol. A negative tol selects the
/// default 1e-9 * ||A||_F^2.
NormalityCheck check_normal(const OUModel& model, double tol = -1.0);

/// Reduces a normal model to canonical form: whitens Q to the identity,
/// block-diagonalizes the resulting normal drift by a real Schur
/// decomposition, and normalizes block order and q signs. Blocks whose
/// rotation rate falls below 1e-10 are demoted to two scalar rates.
/// Throws NotNormal when check_normal fails.
CanonicalForm decompose(const OUModel& model);

/// Model with the block-diagonal drift conjugated back through basis and
/// whitening; decompose(reconstruct(form)) reproduces form up to ordering.
OUModel reconstruct(const CanonicalForm& form);

}  // namespace ousg
