#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ausyn/error.hpp"

namespace ausyn {

struct NnmfResult {
  Eigen::MatrixXd w;  // features x k, columns normalized to unit L2
  Eigen::MatrixXd h;  // k x samples, carries the absorbed column scales
  double vaf = 0.0;
  double objective = 0.0;  // squared Frobenius residual of the best restart
  int iterations = 0;
  // Objective at every 10th iteration of the winning restart; must be
  // non-increasing up to numerical noise.
  std::vector<double> objective_trace;
};

// Frobenius-norm NNMF via Lee-Seung multiplicative updates, best of
// `restarts` seeded initializations (ties break toward the lower restart
// index). Entries below -1e-12 are rejected, tiny negatives are clipped.
NnmfResult nnmf_factorize(const Eigen::MatrixXd& x, int k, std::uint64_t seed,
                          int restarts = 10, int max_iter = 1000,
                          double tol = 1e-6);

// Uncentered variance accounted for: 1 - |X - WH|_F^2 / |X|_F^2.
// Throws DegenerateInputError for an all-zero X.
double vaf(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
           const Eigen::MatrixXd& h);

struct VafCurve {
  std::vector<std::pair<int, double>> per_k;  // ascending k, min over blocks
  int selected_k = 0;
  double threshold = 0.0;
  bool reached = false;
};

// Factorizes every block at every k in [1, k_max] and scores each k by the
// minimum VAF across blocks. selected_k is the smallest k meeting the
// threshold; when none does, selected_k = k_max and reached = false.
VafCurve select_synergy_count(const std::vector<Eigen::MatrixXd>& blocks,
                              int k_max, double threshold = 0.85,
                              std::uint64_t seed = 0, int restarts = 10,
                              int max_iter = 1000, double tol = 1e-6,
                              int jobs = 1);

}  // namespace ausyn
