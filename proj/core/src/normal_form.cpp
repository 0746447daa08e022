#include "ousg/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ousg {

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m, bool inverse) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0) throw Error(ErrorCode::NotPositiveDefinite, "matrix square root");
    d(i) = inverse ? 1.0 / std::sqrt(d(i)) : std::sqrt(d(i));
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double commutator_fro(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd c = a * a.transpose() - a.transpose() * a;
  return c.norm();
}

}  // namespace

OUModel building_block_model(const BuildingBlock& block) {
  if (block.lambda <= 0.0) throw Error(ErrorCode::NotHurwitz, "block rate must be positive");
  if ((block.R + block.R.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::NotSymmetric, "R must be skew-symmetric");
  int n = static_cast<int>(block.R.rows());
  Eigen::MatrixXd drift = block.lambda * (block.R - Eigen::MatrixXd::Identity(n, n));
  return OUModel::validate(Eigen::MatrixXd::Identity(n, n), drift);
}

NormalityCheck check_normal(const OUModel& model, double tol) {
  Eigen::MatrixXd qinf = lyapunov_qinf(model.B(), model.Q());
  Eigen::MatrixXd s = symmetric_sqrt(qinf, false);
  Eigen::MatrixXd s_inv = symmetric_sqrt(qinf, true);
  Eigen::MatrixXd a = s_inv * model.B() * s;
  double norm = commutator_fro(a);
  double effective_tol = tol >= 0.0 ? tol : 1e-9 * a.squaredNorm();
  return NormalityCheck{norm <= effective_tol, norm, effective_tol};
}

Eigen::VectorXd CanonicalForm::from_canonical(const Eigen::VectorXd& z) const {
  // whitening is symmetric positive definite, so invert via solve
  return whitening.ldlt().solve(basis * z);
}

Eigen::MatrixXd CanonicalForm::canonical_drift() const {
  int n = dim();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  int pos = 0;
  for (const auto& [lambda, q] : blocks) {
    b(pos, pos) = -lambda;
    b(pos, pos + 1) = q;
    b(pos + 1, pos) = -q;
    b(pos + 1, pos + 1) = -lambda;
    pos += 2;
  }
  for (double lambda : scalars) {
    b(pos, pos) = -lambda;
    ++pos;
  }
  return b;
}

SpectralParams CanonicalForm::expanded_rates() const {
  std::vector<double> lams;
  lams.reserve(static_cast<std::size_t>(dim()));
  for (const auto& [lambda, q] : blocks) {
    (void)q;
    lams.push_back(lambda);
    lams.push_back(lambda);
  }
  for (double lambda : scalars) lams.push_back(lambda);
  return SpectralParams(lams);
}

CanonicalForm decompose(const OUModel& model) {
  NormalityCheck nc = check_normal(model);
  if (!nc.normal)
    throw Error(ErrorCode::NotNormal,
                "commutator norm " + std::to_string(nc.commutator_norm) + " exceeds tolerance");
  int n = model.dim();
  Eigen::MatrixXd w = symmetric_sqrt(model.Q(), true);          // Q^{-1/2}
  Eigen::MatrixXd w_inv = symmetric_sqrt(model.Q(), false);     // Q^{1/2}
  Eigen::MatrixXd b1 = w * model.B() * w_inv;                   // drift with Q whitened to I

  Eigen::RealSchur<Eigen::MatrixXd> schur(b1);
  Eigen::MatrixXd t = schur.matrixT();
  Eigen::MatrixXd u = schur.matrixU();

  // For a normal drift the Schur form is quasi-diagonal; walk the diagonal.
  const double q_tol = 1e-10;
  struct RawBlock {
    double lambda;
    double q;
    int pos;  // column index in u
  };
  std::vector<RawBlock> raw_blocks;
  std::vector<std::pair<double, int>> raw_scalars;  // (lambda, column)
  Eigen::MatrixXd quasi = Eigen::MatrixXd::Zero(n, n);
  int demoted = 0;
  int i = 0;
  while (i < n) {
    bool is_pair = (i + 1 < n) && (std::abs(t(i + 1, i)) > q_tol * std::max(1.0, b1.norm()));
    if (is_pair) {
      double lambda = -0.5 * (t(i, i) + t(i + 1, i + 1));
      double q = 0.5 * (t(i, i + 1) - t(i + 1, i));
      quasi(i, i) = -lambda;
      quasi(i + 1, i + 1) = -lambda;
      quasi(i, i + 1) = q;
      quasi(i + 1, i) = -q;
      if (std::abs(q) <= q_tol) {
        ++demoted;
        raw_scalars.emplace_back(-t(i, i), i);
        raw_scalars.emplace_back(-t(i + 1, i + 1), i + 1);
      } else {
        raw_blocks.push_back({lambda, q, i});
      }
      i += 2;
    } else {
      quasi(i, i) = t(i, i);
      raw_scalars.emplace_back(-t(i, i), i);
      i += 1;
    }
  }
  // anything the quasi-diagonal part misses signals a non-normal input that
  // slipped past the commutator test
  if ((t - quasi).norm() > 1e-8 * std::max(1.0, b1.norm()))
    throw Error(ErrorCode::NotNormal, "Schur form of whitened drift is not block-diagonal");

  std::stable_sort(raw_blocks.begin(), raw_blocks.end(), [](const RawBlock& a, const RawBlock& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return std::abs(a.q) > std::abs(b.q);
  });
  std::stable_sort(raw_scalars.begin(), raw_scalars.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  CanonicalForm form;
  form.whitening = w;
  form.basis = Eigen::MatrixXd(n, n);
  form.demoted_blocks = demoted;
  int col = 0;
  for (const RawBlock& rb : raw_blocks) {
    double q = rb.q;
    Eigen::VectorXd v0 = u.col(rb.pos);
    Eigen::VectorXd v1 = u.col(rb.pos + 1);
    if (q < 0.0) {
      // flipping the second basis vector flips the sign of q
      v1 = -v1;
      q = -q;
    }
    form.basis.col(col) = v0;
    form.basis.col(col + 1) = v1;
    form.blocks.emplace_back(rb.lambda, q);
    col += 2;
  }
  for (const auto& [lambda, pos] : raw_scalars) {
    form.basis.col(col) = u.col(pos);
    form.scalars.push_back(lambda);
    ++col;
  }
  // first-nonzero sign convention keeps the output reproducible bit-for-bit
  for (int c = 0; c < n; ++c) {
    // only scalar columns may be flipped freely; block columns carry q's sign
    if (c >= 2 * static_cast<int>(form.blocks.size())) {
      for (int r = 0; r < n; ++r) {
        if (std::abs(form.basis(r, c)) > 1e-14) {
          if (form.basis(r, c) < 0.0) form.basis.col(c) = -form.basis.col(c);
          break;
        }
      }
    }
  }

  double ortho_err = (form.basis.transpose() * form.basis - Eigen::MatrixXd::Identity(n, n)).norm();
  if (ortho_err > 1e-10) throw Error(ErrorCode::NotNormal, "Schur basis lost orthogonality");
  return form;
}

OUModel reconstruct(const CanonicalForm& form) {
  int n = form.dim();
  CanonicalForm filled = form;
  if (filled.basis.size() == 0) filled.basis = Eigen::MatrixXd::Identity(n, n);
  if (filled.whitening.size() == 0) filled.whitening = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd bc = filled.canonical_drift();
  // x = whitening^{-1} * basis * z, so conjugate the canonical drift back
  Eigen::MatrixXd t = filled.whitening.ldlt().solve(filled.basis);  // W^{-1} U
  Eigen::MatrixXd t_inv = filled.basis.transpose() * filled.whitening;
  Eigen::MatrixXd b = t * bc * t_inv;
  Eigen::MatrixXd q = t * t.transpose();
  if (filled.whitening.isApprox(Eigen::MatrixXd::Identity(n, n), 1e-13))
    q = Eigen::MatrixXd::Identity(n, n);
  return OUModel::validate(0.5 * (q + q.transpose()), b);
}

}  // namespace ousg
