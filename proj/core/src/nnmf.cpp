#include "ausyn/nnmf.hpp"

#include <cmath>
#include <limits>

#include "ausyn/parallel.hpp"
#include "ausyn/rng.hpp"

namespace ausyn {

namespace {

constexpr double kEps = 1e-12;

Eigen::MatrixXd sanitize(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) {
    throw InvalidArgumentError("factorization input has non-finite values");
  }
  if ((x.array() < -kEps).any()) {
    throw InvalidArgumentError("factorization input has negative entries");
  }
  return x.cwiseMax(0.0);
}

struct SingleRun {
  Eigen::MatrixXd w;
  Eigen::MatrixXd h;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

SingleRun run_once(const Eigen::MatrixXd& x, int k, std::uint64_t seed,
                   int max_iter, double tol) {
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  Rng rng(seed);
  // Uniform init scaled to the data magnitude speeds early convergence.
  const double scale = std::sqrt(std::max(x.mean(), kEps) / k);
  SingleRun run;
  run.w.resize(m, k);
  run.h.resize(k, n);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      run.w(r, c) = scale * (0.1 + 0.9 * rng.uniform());
    }
  }
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      run.h(r, c) = scale * (0.1 + 0.9 * rng.uniform());
    }
  }

  const double x_norm2 = x.squaredNorm();
  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iter; ++iter) {
    run.h.array() *= (run.w.transpose() * x).array() /
                     ((run.w.transpose() * run.w) * run.h).array().max(kEps);
    run.w.array() *= (x * run.h.transpose()).array() /
                     (run.w * (run.h * run.h.transpose())).array().max(kEps);
    run.iterations = iter;
    if (iter % 10 == 0 || iter == max_iter) {
      const double obj = (x - run.w * run.h).squaredNorm();
      run.trace.push_back(obj);
      const double drop = prev - obj;
      if (drop >= 0.0 && drop <= tol * std::max(x_norm2, kEps)) {
        run.objective = obj;
        return run;
      }
      prev = obj;
    }
  }
  run.objective = (x - run.w * run.h).squaredNorm();
  return run;
}

}  // namespace

NnmfResult nnmf_factorize(const Eigen::MatrixXd& x_in, int k,
                          std::uint64_t seed, int restarts, int max_iter,
                          double tol) {
  const Eigen::MatrixXd x = sanitize(x_in);
  if (k < 1 || k > std::min(x.rows(), x.cols())) {
    throw InvalidArgumentError("k must lie in [1, min(rows, cols)]");
  }
  if (restarts < 1) throw InvalidArgumentError("restarts must be >= 1");
  if (max_iter < 1) throw InvalidArgumentError("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw InvalidArgumentError("tol must be non-negative");

  SingleRun best;
  int best_index = -1;
  for (int r = 0; r < restarts; ++r) {
    SingleRun run =
        run_once(x, k, derive_seed(seed, static_cast<std::uint64_t>(r)),
                 max_iter, tol);
    if (best_index < 0 || run.objective < best.objective) {
      best = std::move(run);
      best_index = r;
    }
  }

  // Unit-L2 columns in w; scales move into h. Zero columns stay zero.
  for (int c = 0; c < k; ++c) {
    const double norm = best.w.col(c).norm();
    if (norm > 0.0) {
      best.w.col(c) /= norm;
      best.h.row(c) *= norm;
    }
  }

  NnmfResult out;
  out.w = std::move(best.w);
  out.h = std::move(best.h);
  out.objective = best.objective;
  out.iterations = best.iterations;
  out.objective_trace = std::move(best.trace);
  out.vaf = vaf(x, out.w, out.h);
  return out;
}

double vaf(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
           const Eigen::MatrixXd& h) {
  if (w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows()) {
    throw InvalidArgumentError("factor shapes do not match the input");
  }
  const double total = x.squaredNorm();
  if (!(total > 0.0)) {
    throw DegenerateInputError("variance accounted for is undefined for an "
                               "all-zero input");
  }
  return 1.0 - (x - w * h).squaredNorm() / total;
}

VafCurve select_synergy_count(const std::vector<Eigen::MatrixXd>& blocks,
                              int k_max, double threshold, std::uint64_t seed,
                              int restarts, int max_iter, double tol,
                              int jobs) {
  if (blocks.empty()) {
    throw InvalidArgumentError("need at least one block");
  }
  if (!(threshold >= 0.0) || !(threshold <= 1.0)) {
    throw InvalidArgumentError("threshold must lie in [0, 1]");
  }
  Eigen::Index min_dim = std::numeric_limits<Eigen::Index>::max();
  for (const auto& b : blocks) {
    min_dim = std::min(min_dim, std::min(b.rows(), b.cols()));
  }
  if (k_max < 1 || k_max > min_dim) {
    throw InvalidArgumentError("k_max must lie in [1, min block dimension]");
  }

  const int n_blocks = static_cast<int>(blocks.size());
  const int tasks = n_blocks * k_max;
  std::vector<double> vaf_by_task(static_cast<std::size_t>(tasks), 0.0);
  parallel_for(tasks, jobs, [&](int t) {
    const int b = t / k_max;
    const int k = 1 + t % k_max;
    const NnmfResult res = nnmf_factorize(
        blocks[static_cast<std::size_t>(b)], k,
        derive_seed(seed, static_cast<std::uint64_t>(t)), restarts, max_iter,
        tol);
    vaf_by_task[static_cast<std::size_t>(t)] = res.vaf;
  });

  VafCurve curve;
  curve.threshold = threshold;
  curve.per_k.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    double worst = 1.0;
    for (int b = 0; b < n_blocks; ++b) {
      worst = std::min(worst,
                       vaf_by_task[static_cast<std::size_t>(b * k_max + k - 1)]);
    }
    curve.per_k.emplace_back(k, worst);
  }
  curve.selected_k = k_max;
  curve.reached = false;
  for (const auto& [k, v] : curve.per_k) {
    if (v >= threshold) {
      curve.selected_k = k;
      curve.reached = true;
      break;
    }
  }
  return curve;
}

}  // namespace ausyn
