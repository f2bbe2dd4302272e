#include "rnf/random_fields.hpp"

#include <cmath>

#include "rnf/errors.hpp"

namespace rnf {

void ReceptiveFieldSpec::validate() const {
  if (family != RfFamily::None && !(sigma_r > 0.0))
    throw ConfigError("receptive field: sigma_r must be > 0");
}

Eigen::MatrixXd receptive_mask(int n_out, int n_in,
                               const ReceptiveFieldSpec& spec) {
  if (n_out < 1 || n_in < 1)
    throw ConfigError("receptive_mask: widths must be >= 1");
  spec.validate();
  Eigen::MatrixXd r(n_in, n_out);
  if (spec.family == RfFamily::None) {
    r.setOnes();
    return r;
  }
  const double mh_amp =
      2.0 / (std::sqrt(3.0 * spec.sigma_r) * std::pow(M_PI, 0.25));
  for (int i = 1; i <= n_out; ++i) {
    for (int j = 1; j <= n_in; ++j) {
      const double u = (static_cast<double>(i) / n_out -
                        static_cast<double>(j) / n_in) /
                       spec.sigma_r;
      const double g = std::exp(-0.5 * u * u);
      r(j - 1, i - 1) =
          spec.family == RfFamily::GaussianFilter ? g : mh_amp * (1.0 - u * u) * g;
    }
  }
  return r;
}

WeightBundle sample_correlated_weights(int n_in, int n_out,
                                       const std::optional<CovarianceSpec>& cov,
                                       const ReceptiveFieldSpec& rf,
                                       double sigma_w, double sigma_b,
                                       Rng& rng) {
  WeightBundle bundle;
  bundle.sigma_w = sigma_w;
  bundle.sigma_b = sigma_b;
  bundle.mask = receptive_mask(n_out, n_in, rf);

  // omega filled column-major so a column is a contiguous draw
  Eigen::MatrixXd omega(n_in, n_out);
  for (int c = 0; c < n_out; ++c)
    for (int a = 0; a < n_in; ++a) omega(a, c) = rng.gaussian();

  if (cov) {
    const Eigen::MatrixXd factor = factor_matrix(n_in, *cov);
    bundle.w_tilde.noalias() = factor * omega;
  } else {
    bundle.w_tilde = std::move(omega);
  }
  bundle.beta = standard_gaussian(n_out, rng);
  bundle.refresh();
  return bundle;
}

Eigen::VectorXd standard_gaussian(int n, Rng& rng) {
  Eigen::VectorXd beta(n);
  for (int i = 0; i < n; ++i) beta(i) = rng.gaussian();
  return beta;
}

}  // namespace rnf
