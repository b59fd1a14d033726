#include "ausyn/ica.hpp"

#include <cmath>

#include "ausyn/rng.hpp"

namespace ausyn {

namespace {

// W <- (W W^T)^(-1/2) W, keeps rows orthonormal without privileging any one
// component (symmetric decorrelation).
void symmetric_decorrelate(Eigen::MatrixXd& w) {
  const Eigen::MatrixXd wwt = w * w.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(wwt);
  if (eig.info() != Eigen::Success) {
    throw DegenerateInputError("decorrelation eigensolver failed");
  }
  const Eigen::VectorXd& vals = eig.eigenvalues();
  if (vals.minCoeff() <= 1e-12 * std::max(1.0, vals.maxCoeff())) {
    throw DegenerateInputError("unmixing matrix lost rank during iteration");
  }
  Eigen::VectorXd inv_sqrt(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    inv_sqrt(i) = 1.0 / std::sqrt(vals(i));
  }
  w = eig.eigenvectors() * inv_sqrt.asDiagonal() *
      eig.eigenvectors().transpose() * w;
}

}  // namespace

WhitenResult whiten(const Eigen::MatrixXd& x, int n_components) {
  const Eigen::Index channels = x.rows();
  const Eigen::Index n = x.cols();
  if (n_components < 1 || n_components > channels) {
    throw InvalidArgumentError("component count must lie in [1, channels]");
  }
  if (n <= channels) {
    throw InvalidArgumentError("need more samples than channels");
  }
  if (!x.allFinite()) {
    throw InvalidArgumentError("input contains non-finite values");
  }

  const Eigen::VectorXd mean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - mean;
  const Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw DegenerateInputError("covariance eigendecomposition failed");
  }
  // Eigen returns eigenvalues ascending; we take the strongest directions.
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const double max_val = vals(channels - 1);
  if (!(max_val > 0.0)) {
    throw DegenerateInputError("input has no variance");
  }
  WhitenResult out;
  out.mean = mean;
  out.whitener.resize(n_components, channels);
  for (int k = 0; k < n_components; ++k) {
    const Eigen::Index idx = channels - 1 - k;
    const double val = vals(idx);
    if (val <= 1e-10 * max_val) {
      throw DegenerateInputError(
          "covariance is rank deficient for the requested components");
    }
    out.whitener.row(k) =
        eig.eigenvectors().col(idx).transpose() / std::sqrt(val);
  }
  out.whitened = out.whitener * centered;
  return out;
}

WhitenResult whiten(const Recording& rec, int n_components) {
  return whiten(rec.samples(), n_components);
}

IcaResult fastica(const Eigen::MatrixXd& x, int n_components,
                  std::uint64_t seed, int max_iter, double tol) {
  if (max_iter < 1) throw InvalidArgumentError("max_iter must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgumentError("tol must be positive");

  const WhitenResult white = whiten(x, n_components);
  const Eigen::MatrixXd& z = white.whitened;
  const auto n = static_cast<double>(z.cols());
  const int k = n_components;

  Rng rng(derive_seed(seed, "fastica-init"));
  Eigen::MatrixXd w(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) w(r, c) = rng.normal();
  }
  symmetric_decorrelate(w);

  IcaResult out;
  out.converged = false;
  out.iterations = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::MatrixXd u = w * z;                      // k x N projections
    const Eigen::MatrixXd g = u.array().tanh().matrix();  // logcosh derivative
    const Eigen::VectorXd g_prime_mean =
        (1.0 - g.array().square()).rowwise().mean().matrix();
    Eigen::MatrixXd w_next =
        (g * z.transpose()) / n - g_prime_mean.asDiagonal() * w;
    symmetric_decorrelate(w_next);

    double delta = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) {
      delta = std::max(
          delta, std::abs(1.0 - std::abs(w_next.row(r).dot(w.row(r)))));
    }
    w = std::move(w_next);
    out.iterations = iter;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }

  out.sources = w * z;
  out.whitener = white.whitener;
  out.channel_mean = white.mean;
  out.unmixing = w * white.whitener;

  // Fix signs so every source has non-negative skewness; envelope-like
  // activity then points upward.
  for (Eigen::Index r = 0; r < k; ++r) {
    const double skew = out.sources.row(r).array().cube().mean();
    if (skew < 0.0) {
      out.sources.row(r) *= -1.0;
      out.unmixing.row(r) *= -1.0;
    }
  }

  // Right pseudo-inverse: unmixing has full row rank after whitening.
  const Eigen::MatrixXd uut = out.unmixing * out.unmixing.transpose();
  out.mixing = out.unmixing.transpose() * uut.ldlt().solve(
      Eigen::MatrixXd::Identity(k, k));
  return out;
}

IcaResult fastica(const Recording& rec, int n_components, std::uint64_t seed,
                  int max_iter, double tol) {
  return fastica(rec.samples(), n_components, seed, max_iter, tol);
}

}  // namespace ausyn
