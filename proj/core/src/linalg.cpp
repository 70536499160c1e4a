#include "floquet_sep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace floquet_sep {

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 2 && m.cols() == 2) {
    // largest eigenvalue of MᵀM in closed form
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::max(0.0, s * s - 4.0 * det * det);
    return std::sqrt(0.5 * (s + std::sqrt(disc)));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  return m.exp();
}

bool is_metzler(const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j && a(i, j) < 0.0) return false;
    }
  }
  return true;
}

bool graph_strongly_connected(const Eigen::MatrixXd& adj) {
  const auto n = adj.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool reverse) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = reverse ? adj(i, j) : adj(j, i);
        if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reaches_all(false) && reaches_all(true);
}

}  // namespace floquet_sep
