#pragma once

// Receptive-field masks and sampling of correlated initial weights.
//
// A weight matrix column (one per output neuron) is drawn as A * omega with
// omega ~ N(0, I), so each column is N(0, A A^T) over the input index;
// distinct output neurons are independent. The effective weights are
//   W = (sigma_w / sqrt(n_in)) * R o W_tilde,
// where R is the fixed receptive-field mask and W_tilde is the trainable
// sample. The bias is b = sigma_b * beta with trainable beta ~ N(0, I).

#include <Eigen/Dense>
#include <optional>

#include "rnf/rng.hpp"
#include "rnf/torus_kernels.hpp"

namespace rnf {

enum class RfFamily { None, GaussianFilter, MexicanHat };

struct ReceptiveFieldSpec {
  RfFamily family = RfFamily::None;
  double sigma_r = 0.1;

  void validate() const;  // throws ConfigError
};

/// Mask matrix R (n_in x n_out). Entry (j, i) evaluates the receptive-field
/// profile at offset i/n_out - j/n_in with 1-based indices i, j; family None
/// gives the all-ones mask.
Eigen::MatrixXd receptive_mask(int n_out, int n_in,
                               const ReceptiveFieldSpec& spec);

struct WeightBundle {
  Eigen::MatrixXd w;        // effective weights, n_in x n_out
  Eigen::MatrixXd w_tilde;  // trainable correlated sample
  Eigen::MatrixXd mask;     // fixed receptive-field mask R
  Eigen::VectorXd b;        // effective bias, sigma_b * beta
  Eigen::VectorXd beta;     // trainable bias sample
  double sigma_w = 1.0;
  double sigma_b = 0.1;

  /// Recompute the derived quantities after a trainable-parameter update.
  void refresh() {
    const double scale = sigma_w / std::sqrt(static_cast<double>(w_tilde.rows()));
    w = scale * mask.cwiseProduct(w_tilde);
    b = sigma_b * beta;
  }
};

/// Draw a full weight bundle. cov == nullopt means independent entries
/// (identity covariance, no factor applied).
WeightBundle sample_correlated_weights(int n_in, int n_out,
                                       const std::optional<CovarianceSpec>& cov,
                                       const ReceptiveFieldSpec& rf,
                                       double sigma_w, double sigma_b,
                                       Rng& rng);

/// n i.i.d. standard normal draws.
Eigen::VectorXd standard_gaussian(int n, Rng& rng);

/// Bias vector b with b_j = sigma_b * beta_j, beta_j ~ N(0, 1).
inline Eigen::VectorXd sample_bias(int n, double sigma_b, Rng& rng) {
  return sigma_b * standard_gaussian(n, rng);
}

}  // namespace rnf
