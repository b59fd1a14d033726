#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ausyn/signal.hpp"
#include "ausyn/xcorr.hpp"

namespace testutil {

inline std::vector<double> matrix_row(const Eigen::MatrixXd& m, int r) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    v[static_cast<std::size_t>(i)] = m(r, i);
  return v;
}

// Best one-to-one matching of rows in `est` to rows in `truth` by total
// |Pearson|; returns the per-pair correlations in truth-row order.
inline std::vector<double> matched_abs_corr(const Eigen::MatrixXd& est,
                                            const Eigen::MatrixXd& truth) {
  const int k = static_cast<int>(truth.rows());
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd corr(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      corr(i, j) = std::abs(
          ausyn::pearson(matrix_row(est, i), matrix_row(truth, j)));
  std::vector<double> best;
  double best_total = -1.0;
  do {
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += corr(perm[static_cast<std::size_t>(j)], j);
    if (total > best_total) {
      best_total = total;
      best.assign(static_cast<std::size_t>(k), 0.0);
      for (int j = 0; j < k; ++j)
        best[static_cast<std::size_t>(j)] = corr(perm[static_cast<std::size_t>(j)], j);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Which estimated row matches each truth row under the best permutation.
inline std::vector<int> matched_rows(const Eigen::MatrixXd& est,
                                     const Eigen::MatrixXd& truth) {
  const int k = static_cast<int>(truth.rows());
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd corr(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      corr(i, j) = std::abs(
          ausyn::pearson(matrix_row(est, i), matrix_row(truth, j)));
  std::vector<int> best;
  double best_total = -1.0;
  do {
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += corr(perm[static_cast<std::size_t>(j)], j);
    if (total > best_total) {
      best_total = total;
      best.assign(perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    base_ = std::filesystem::temp_directory_path() /
            ("ausyn_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(base_);
    std::filesystem::create_directories(base_);
  }
  ~TempDir() { std::filesystem::remove_all(base_); }
  std::string path(const std::string& name) const {
    return (base_ / name).string();
  }
  std::string root() const { return base_.string(); }

 private:
  std::filesystem::path base_;
};

}  // namespace testutil
