#pragma once

// Stationary covariance kernels on the unit 1-torus, their discretized
// covariance matrices, and closed-form square-root factors A with
// Sigma ~= A * A^T obtained by Fourier calculus and a partitioning
// quadrature on the line.
//
// The kernel families are the squared-exponential (Gaussian) and the
// Matern family with smoothness nu; nu = 0.5 gives the Laplacian kernel.
// Torus kernels are periodized by summing lattice translates and then
// normalized so that K(z, z) = 1.

#include <Eigen/Dense>

#include "rnf/exec.hpp"

namespace rnf {

enum class CovFamily { Gaussian, Matern };

struct CovarianceSpec {
  CovFamily family = CovFamily::Gaussian;
  double sigma_s = 0.1;   // correlation scale, torus units
  double nu = 0.5;        // Matern smoothness (ignored for Gaussian)
  int wrap_terms = 3;     // truncation of the lattice wrap sum
  // Closed-form Matern evaluation covers nu in {0.5, 1.5, 2.5}; any other
  // nu requires opting in to the numeric modified-Bessel routine.
  bool numeric_bessel = false;

  void validate() const;  // throws ConfigError
};

/// Wrapped, normalized kernel value at torus distance dist in [0, 1/2].
double covariance_value(double dist, const CovarianceSpec& spec);

/// n x n covariance matrix over the regular lattice {0, 1/n, ..., (n-1)/n},
/// evaluated at torus-reduced lattice distances. Symmetric, unit diagonal.
Eigen::MatrixXd discrete_covariance(int n, const CovarianceSpec& spec,
                                    Exec exec = Exec::Parallel);

/// Closed-form quadrature factor A (n x n) with discrete_covariance ~= A*A^T.
/// Uses the line (non-wrapped) kernel square root; see factor residuals in
/// the tests for the approximation quality.
Eigen::MatrixXd factor_matrix(int n, const CovarianceSpec& spec,
                              Exec exec = Exec::Parallel);

/// Lower-triangular Cholesky factor of a positive definite covariance
/// matrix; a jitter of 1e-10*I is added on failure, and a NumericError is
/// thrown if the matrix is still not positive definite. Serves as the
/// exact oracle against which factor_matrix is validated.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma);

/// || Sigma - A*A^T ||_F / || Sigma ||_F
double factor_residual(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& a);

}  // namespace rnf
