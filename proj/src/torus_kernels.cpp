#include "rnf/torus_kernels.hpp"

#include <cmath>
#include <vector>

#include "rnf/errors.hpp"

namespace rnf {

void CovarianceSpec::validate() const {
  if (!(sigma_s > 0.0)) throw ConfigError("covariance: sigma_s must be > 0");
  if (family == CovFamily::Matern && !(nu > 0.0))
    throw ConfigError("covariance: nu must be > 0");
  if (wrap_terms < 0) throw ConfigError("covariance: wrap_terms must be >= 0");
  if (family == CovFamily::Matern && !numeric_bessel) {
    const bool closed = nu == 0.5 || nu == 1.5 || nu == 2.5;
    if (!closed)
      throw ConfigError(
          "covariance: Matern nu without closed form (0.5, 1.5, 2.5); "
          "set numeric_bessel to enable the numeric routine");
  }
}

namespace {

// Unnormalized stationary kernel on the line at distance t >= 0.
double line_kernel(double t, const CovarianceSpec& spec) {
  if (spec.family == CovFamily::Gaussian) {
    const double u = t / spec.sigma_s;
    return std::exp(-0.5 * u * u);
  }
  const double z = std::sqrt(2.0 * spec.nu) * t / spec.sigma_s;
  if (z == 0.0) return 1.0;
  if (spec.nu == 0.5) return std::exp(-z);
  if (spec.nu == 1.5) return (1.0 + z) * std::exp(-z);
  if (spec.nu == 2.5) return (1.0 + z + z * z / 3.0) * std::exp(-z);
  return std::pow(2.0, 1.0 - spec.nu) / std::tgamma(spec.nu) *
         std::pow(z, spec.nu) * std::cyl_bessel_k(spec.nu, z);
}

double wrapped_raw(double dist, const CovarianceSpec& spec) {
  double sum = 0.0;
  for (int k = -spec.wrap_terms; k <= spec.wrap_terms; ++k)
    sum += line_kernel(std::abs(dist + static_cast<double>(k)), spec);
  return sum;
}

}  // namespace

double covariance_value(double dist, const CovarianceSpec& spec) {
  spec.validate();
  const double norm = wrapped_raw(0.0, spec);
  return wrapped_raw(dist, spec) / norm;
}

Eigen::MatrixXd discrete_covariance(int n, const CovarianceSpec& spec,
                                    Exec exec) {
  if (n < 2) throw ConfigError("discrete_covariance: n must be >= 2");
  spec.validate();

  // kernel value per torus-reduced lattice offset
  std::vector<double> by_offset(static_cast<size_t>(n) / 2 + 1);
  const double norm = wrapped_raw(0.0, spec);
  for (size_t k = 0; k < by_offset.size(); ++k)
    by_offset[k] =
        wrapped_raw(static_cast<double>(k) / static_cast<double>(n), spec) /
        norm;

  Eigen::MatrixXd sigma(n, n);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int off = std::abs(i - j);
      sigma(i, j) = by_offset[static_cast<size_t>(std::min(off, n - off))];
    }
  return sigma;
}

Eigen::MatrixXd factor_matrix(int n, const CovarianceSpec& spec, Exec exec) {
  if (n < 2) throw ConfigError("factor_matrix: n must be >= 2");
  spec.validate();

  // The Matern spectral density has no usable pointwise square root on the
  // lattice (the line square-root kernel is log-singular at zero for
  // nu = 0.5), so Matern factors fall back to the exact Cholesky route.
  if (spec.family == CovFamily::Matern)
    return cholesky_factor(discrete_covariance(n, spec, exec));

  // Gaussian: quadrature of the line square-root kernel,
  //   A_ij = (2 / (pi s^2))^{1/4} exp(-|i-j|^2 / s^2),  s = sigma_s * n.
  const double s = spec.sigma_s * static_cast<double>(n);  // lattice units
  const double amp = std::pow(2.0 / (M_PI * s * s), 0.25);
  std::vector<double> by_offset(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    by_offset[static_cast<size_t>(k)] =
        amp * std::exp(-static_cast<double>(k) * k / (s * s));

  Eigen::MatrixXd a(n, n);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = by_offset[static_cast<size_t>(std::abs(i - j))];
  return a;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::MatrixXd jittered = sigma;
  jittered.diagonal().array() += 1e-10;
  llt.compute(jittered);
  if (llt.info() != Eigen::Success)
    throw NumericError("cholesky_factor: matrix not positive definite");
  return llt.matrixL();
}

double factor_residual(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& a) {
  return (sigma - a * a.transpose()).norm() / sigma.norm();
}

}  // namespace rnf
