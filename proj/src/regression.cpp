#include "monoshrink/regression.hpp"

#include <string>

namespace monoshrink {

Eigen::VectorXd SequenceEmbedding::full_coordinates() const {
  Eigen::VectorXd full(beta_tilde.size() + residual_coords.size());
  full << beta_tilde, residual_coords;
  return full;
}

Design validate_or_orthonormalize(const Eigen::MatrixXd& x, OrthoMode mode, double tol) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (p < 1 || n < p)
    throw InvalidArgument("design: need n >= p >= 1 (got " + std::to_string(n) + "x" +
                          std::to_string(p) + ")");
  if (!x.allFinite()) throw InvalidArgument("design: non-finite entry");
  if (!(tol > 0.0)) throw InvalidArgument("design: tolerance must be positive");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted(x);
  if (pivoted.rank() < p)
    throw RankError("design: rank " + std::to_string(pivoted.rank()) + " < p = " +
                    std::to_string(p));

  Design design;
  design.orthonormal_tol = tol;

  if (mode == OrthoMode::validate) {
    const Eigen::MatrixXd gram = x.transpose() * x;
    const double dev = (gram - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
    if (dev > tol)
      throw NotOrthonormalError("design: max |X^T X - I| = " + std::to_string(dev) +
                                " exceeds tolerance");
    design.x = x;
    return design;
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  // Positive diagonal, matching classical Gram-Schmidt.
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) *= -1.0;
      r.row(j) *= -1.0;
    }
  }
  design.x = std::move(q);
  design.r_factor = std::move(r);
  return design;
}

SequenceEmbedding embed(const Design& design, const Eigen::VectorXd& y) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n)
    throw InvalidArgument("embed: response has " + std::to_string(y.size()) +
                          " rows, design has " + std::to_string(n));
  SequenceEmbedding out;
  out.beta_tilde = design.x.transpose() * y;
  out.residual_coords = Eigen::VectorXd::Zero(n - p);
  if (n > p) out.residual_coords[0] = (y - design.x * out.beta_tilde).norm();
  return out;
}

Eigen::VectorXd predict(const Design& design, const Eigen::VectorXd& beta_hat) {
  if (beta_hat.size() != design.cols())
    throw InvalidArgument("predict: coefficient length " + std::to_string(beta_hat.size()) +
                          " does not match p = " + std::to_string(design.cols()));
  return design.x * beta_hat;
}

Eigen::VectorXd to_original_coordinates(const Design& design, const Eigen::VectorXd& beta_hat) {
  if (beta_hat.size() != design.cols())
    throw InvalidArgument("to_original_coordinates: length mismatch");
  if (!design.r_factor) return beta_hat;
  return design.r_factor->triangularView<Eigen::Upper>().solve(beta_hat);
}

}  // namespace monoshrink
