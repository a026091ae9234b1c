#ifndef MONOSHRINK_REGRESSION_HPP
#define MONOSHRINK_REGRESSION_HPP

// Matrix-form regression Y = X beta + eps with orthonormal X, mapped onto the
// sequence model.

#include <optional>
#include <random>

#include <Eigen/Dense>

#include "monoshrink/error.hpp"

namespace monoshrink {

enum class OrthoMode { validate, gram_schmidt };

inline constexpr double kDefaultOrthonormalTol = 1e-8;

struct Design {
  /// n x p with X^T X = I_p within orthonormal_tol.
  Eigen::MatrixXd x;
  double orthonormal_tol = kDefaultOrthonormalTol;
  /// Upper-triangular R with X_original = x * R; set only by gram_schmidt mode.
  std::optional<Eigen::MatrixXd> r_factor;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
};

struct SequenceEmbedding {
  Eigen::VectorXd beta_tilde;
  /// Coordinates of Y on an orthonormal completion of X; stored as (||r||, 0, ..., 0).
  Eigen::VectorXd residual_coords;

  /// (beta_tilde, residual_coords), the input to estimate_variance.
  Eigen::VectorXd full_coordinates() const;
};

Design validate_or_orthonormalize(const Eigen::MatrixXd& x, OrthoMode mode,
                                  double tol = kDefaultOrthonormalTol);

SequenceEmbedding embed(const Design& design, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const Design& design, const Eigen::VectorXd& beta_hat);

/// Maps coefficients on the orthonormalized columns back to the original ones.
/// Identity when the design was validated rather than orthonormalized.
Eigen::VectorXd to_original_coordinates(const Design& design, const Eigen::VectorXd& beta_hat);

/// Random n x p matrix with orthonormal columns (thin Q of a Gaussian matrix).
template <typename Rng>
Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index p, Rng& rng) {
  if (p < 1 || n < p) throw InvalidArgument("random_orthonormal: need n >= p >= 1");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  return validate_or_orthonormalize(g, OrthoMode::gram_schmidt).x;
}

}  // namespace monoshrink

#endif  // MONOSHRINK_REGRESSION_HPP
