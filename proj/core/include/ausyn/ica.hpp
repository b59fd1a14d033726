#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ausyn/signal.hpp"

namespace ausyn {

struct WhitenResult {
  Eigen::MatrixXd whitened;  // components x samples, identity covariance
  Eigen::MatrixXd whitener;  // components x channels
  Eigen::VectorXd mean;      // per-channel mean removed before projection
};

// PCA whitening onto the n_components strongest directions. Covariance uses
// the 1/(N-1) convention. Throws DegenerateInputError when the requested
// rank is not present in the data.
WhitenResult whiten(const Eigen::MatrixXd& x, int n_components);
WhitenResult whiten(const Recording& rec, int n_components);

struct IcaResult {
  Eigen::MatrixXd sources;   // components x samples, zero mean, unit variance
  Eigen::MatrixXd unmixing;  // components x channels, applied to centered input
  Eigen::MatrixXd mixing;    // channels x components, right pseudo-inverse
  Eigen::MatrixXd whitener;  // components x channels
  Eigen::VectorXd channel_mean;
  bool converged = false;
  int iterations = 0;
};

// Symmetric fixed-point FastICA with the logcosh contrast. Component signs
// are oriented so each source has non-negative skewness. A run that hits
// max_iter without meeting tol returns converged = false; that is a result,
// not an error.
IcaResult fastica(const Eigen::MatrixXd& x, int n_components,
                  std::uint64_t seed, int max_iter = 500, double tol = 1e-6);
IcaResult fastica(const Recording& rec, int n_components, std::uint64_t seed,
                  int max_iter = 500, double tol = 1e-6);

}  // namespace ausyn
