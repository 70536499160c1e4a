#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "floquet_sep/driver.hpp"
#include "floquet_sep/segment.hpp"

namespace floquet_sep {

struct PerronResult {
  double lambda = 0.0;
  /// Positive, unit Euclidean norm.
  Eigen::VectorXd v;
  /// ‖A v − λ v‖.
  double residual = 0.0;
};

/// Spectral bound and positive eigenvector of a cooperative irreducible A,
/// by repeated squaring of exp(A) followed by power iteration.
/// Throws ContractViolation on non-Metzler or reducible input and
/// NotConverged if the residual exceeds 1e-10.
PerronResult perron_oracle(const Eigen::MatrixXd& A);

struct CharRootSet {
  double a = 0.0;
  double b = 0.0;
  /// Roots of λ = a + b e^{−λ}, descending real part; for a conjugate pair
  /// the root with positive imaginary part comes first.
  std::vector<std::complex<double>> roots;
  /// |λ − a − b e^{−λ}| per root.
  std::vector<double> residuals;
  /// false when fewer than the requested count were found.
  bool complete = true;
};

/// Characteristic roots of z' = a z + b z(t − 1) by Newton from a grid of
/// complex starts. count <= 8, b > 0.
CharRootSet delay_char_roots(double a, double b, int count);

/// Exponents of a product of operators M_{n-1} ⋯ M_0 from QR re-factorization
/// after every factor: mean of ln|R_ii| / dt over the second half of the
/// steps, sorted descending. Exact zeros give −∞.
std::vector<double> dense_product_exponents(const std::vector<Eigen::MatrixXd>& ops,
                                            double dt);

/// Brute-force exponents of the discretized cocycle: n operators of length
/// T_op, with coordinates scaled by the square-root grid weights (the same for
/// every space; exponents do not depend on the norm).
/// Requires m <= 40 and N <= 3.
std::vector<double> dense_product_oracle(const Driver& omega, double T_op, int n,
                                         const SpaceNorm& space, int m);

}  // namespace floquet_sep
