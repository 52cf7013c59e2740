#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace daqc {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NnlsOptions {
  int max_iterations = 0;        ///< 0 means 3 * columns
  double tie_tolerance = 1e-9;   ///< gradients this close to the maximum count as ties
};

/// min |A x - b|_2 subject to x >= 0, by the Lawson-Hanson active-set method.
/// Among tied gradient entries the lowest column index enters first, so the result is
/// reproducible for degenerate problems.
template <typename DerivedA, typename DerivedB>
NnlsResult nnls(const Eigen::MatrixBase<DerivedA>& A_in, const Eigen::MatrixBase<DerivedB>& b_in,
                const NnlsOptions& opts = {}) {
  const Eigen::MatrixXd A = A_in;
  const Eigen::VectorXd b = b_in;
  const Eigen::Index m = A.rows(), n = A.cols();
  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    res.residual_norm = b.norm();
    res.converged = true;
    return res;
  }
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(3 * n + 10);
  const double scale = std::max(1.0, A.norm() * std::max(1.0, b.norm()));
  const double grad_tol = 1e-13 * scale;
  const double zero_tol = 1e-14 * std::max(1.0, b.norm());

  std::vector<bool> passive(n, false), blocked(n, false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd Ap(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(k);
  };

  int iter = 0;
  while (iter < max_iter) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    double wmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && !blocked[j]) wmax = std::max(wmax, w(j));
    if (!(wmax > grad_tol)) {
      res.converged = true;
      break;
    }
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && !blocked[j] && w(j) >= wmax - opts.tie_tolerance * std::max(1.0, std::abs(wmax))) {
        enter = j;
        break;
      }
    passive[enter] = true;
    std::fill(blocked.begin(), blocked.end(), false);

    Eigen::VectorXd z;
    while (true) {
      ++iter;
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= zero_tol) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      if (z(enter) <= zero_tol && x(enter) == 0.0) {
        // The entering column cannot improve the fit; keep it out for this round.
        passive[enter] = false;
        blocked[enter] = true;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= zero_tol) {
          const double denom = x(j) - z(j);
          if (denom > 0) alpha = std::min(alpha, x(j) / denom);
        }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && x(j) <= zero_tol) {
          passive[j] = false;
          x(j) = 0.0;
        }
      if (iter >= max_iter) break;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j)
    if (x(j) < 0) x(j) = 0;
  res.x = x;
  res.iterations = iter;
  res.residual_norm = (A * x - b).norm();
  return res;
}

}  // namespace daqc
