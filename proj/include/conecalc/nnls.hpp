#pragma once

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.

#include <vector>

#include <Eigen/Dense>

namespace conecalc {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0) {
  const Eigen::Index n = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());

  std::vector<bool> passive(n, false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  NnlsResult out;

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(b);
    s.setZero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
  };

  while (out.iterations < max_iter) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) {
      out.converged = true;
      break;
    }
    passive[t] = true;
    ++out.iterations;

    Eigen::VectorXd s;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solve_passive(s);
      double alpha = 2.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && s(j) <= 0.0) {
          const double denom = x(j) - s(j);
          alpha = std::min(alpha, denom > 0.0 ? x(j) / denom : 0.0);
        }
      }
      if (alpha > 1.0) break;
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x(j) <= 1e-15) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
    }
    x = s.cwiseMax(0.0);
    w = a.transpose() * (b - a * x);
  }
  out.x = x;
  out.residual = (a * x - b).norm();
  return out;
}

}  // namespace conecalc
