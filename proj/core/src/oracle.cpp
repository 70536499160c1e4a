#include "floquet_sep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "floquet_sep/errors.hpp"
#include "floquet_sep/linalg.hpp"
#include "floquet_sep/semiflow.hpp"

namespace floquet_sep {

PerronResult perron_oracle(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw InvalidArgument("perron_oracle: A must be square");
  }
  if (!is_metzler(A)) {
    throw ContractViolation("perron_oracle: A has a negative off-diagonal entry");
  }
  if (!graph_strongly_connected(A)) {
    throw ContractViolation("perron_oracle: A is reducible");
  }
  const auto n = A.rows();
  // P^(2^k) converges to the rank-one Perron projector (up to scale)
  Eigen::MatrixXd P = matrix_exponential(A);
  for (int k = 0; k < 60; ++k) {
    P = P * P;
    const double s = P.cwiseAbs().maxCoeff();
    if (!(s > 0.0) || !std::isfinite(s)) break;
    P /= s;
  }
  Eigen::VectorXd v = P * Eigen::VectorXd::Ones(n);
  if (!(v.norm() > 0.0)) throw NotConverged("perron_oracle: degenerate iterate");
  v /= v.norm();
  const Eigen::MatrixXd E = matrix_exponential(A);
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = E * v;
    w /= w.norm();
    const double change = (w - v).norm();
    v = w;
    if (change < 1e-15) break;
  }
  if (v.minCoeff() <= 0.0) {
    throw ContractViolation("perron_oracle: eigenvector has a zero component");
  }
  PerronResult out;
  out.v = v;
  out.lambda = v.dot(A * v);
  out.residual = (A * v - out.lambda * v).norm();
  if (out.residual > 1e-10) {
    throw NotConverged("perron_oracle: residual " + std::to_string(out.residual) +
                       " above 1e-10");
  }
  return out;
}

CharRootSet delay_char_roots(double a, double b, int count) {
  if (count < 1 || count > 8) throw InvalidArgument("delay_char_roots: count must be in 1..8");
  if (!(b > 0.0)) throw InvalidArgument("delay_char_roots: b must be > 0");
  using C = std::complex<double>;
  auto f = [&](C z) { return z - a - b * std::exp(-z); };
  auto df = [&](C z) { return 1.0 + b * std::exp(-z); };
  constexpr double kPi = 3.14159265358979323846;
  const double step = kPi / 2.0;

  std::vector<C> found;
  for (double re = a - 2.0; re <= a + b + 2.0 + 1e-12; re += step) {
    for (double im = 0.0; im <= 6.0 * kPi + 1e-12; im += step) {
      C z(re, im);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        const C d = df(z);
        if (std::abs(d) == 0.0) break;
        const C dz = f(z) / d;
        z -= dz;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
        if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) {
          ok = true;
          break;
        }
      }
      if (!ok && !(std::abs(f(z)) <= 1e-12)) continue;
      if (std::abs(z.imag()) < 1e-12) z = C(z.real(), 0.0);
      if (std::abs(f(z)) > 1e-10) continue;
      const bool dup = std::any_of(found.begin(), found.end(), [&](C w) {
        return std::abs(w - z) <= 1e-8 * std::max(1.0, std::abs(z));
      });
      if (!dup) found.push_back(z);
    }
  }
  std::vector<C> all;
  for (C z : found) {
    all.push_back(z);
    if (z.imag() != 0.0) {
      const C c = std::conj(z);
      const bool dup = std::any_of(found.begin(), found.end(), [&](C w) {
        return std::abs(w - c) <= 1e-8 * std::max(1.0, std::abs(c));
      });
      if (!dup) all.push_back(c);
    }
  }
  std::sort(all.begin(), all.end(), [](C x, C y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  CharRootSet out;
  out.a = a;
  out.b = b;
  for (C z : all) {
    if (static_cast<int>(out.roots.size()) == count) break;
    out.roots.push_back(z);
    out.residuals.push_back(std::abs(f(z)));
  }
  out.complete = static_cast<int>(out.roots.size()) == count;
  return out;
}

std::vector<double> dense_product_exponents(const std::vector<Eigen::MatrixXd>& ops,
                                            double dt) {
  if (ops.empty()) throw InvalidArgument("dense_product_exponents: no operators");
  if (!(dt > 0.0)) throw InvalidArgument("dense_product_exponents: dt must be > 0");
  const auto f = ops.front().rows();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(f, f);
  const std::size_t burn = ops.size() / 2;
  std::vector<double> sums(static_cast<std::size_t>(f), 0.0);
  std::size_t used = 0;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ops[k] * Q);
    Q = qr.householderQ() * Eigen::MatrixXd::Identity(f, f);
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    if (k < burn) continue;
    ++used;
    for (Eigen::Index i = 0; i < f; ++i) {
      sums[static_cast<std::size_t>(i)] += std::log(std::abs(R(i, i)));
    }
  }
  for (double& s : sums) s /= static_cast<double>(used) * dt;
  std::sort(sums.begin(), sums.end(), std::greater<>());
  return sums;
}

std::vector<double> dense_product_oracle(const Driver& omega, double T_op, int n,
                                         const SpaceNorm& space, int m) {
  if (m > 40 || omega.dim() > 3) {
    throw ResourceLimit("dense_product_oracle: requires m <= 40 and N <= 3");
  }
  if (n < 2) throw InvalidArgument("dense_product_oracle: n must be >= 2");
  (void)space;  // weights are the same trapezoid weights for every space
  Semiflow flow(omega, m);
  const Eigen::VectorXd w = grid_weights(omega.dim(), m).cwiseSqrt();
  std::vector<Eigen::MatrixXd> ops;
  ops.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd M = flow.discretize_from(k * T_op, T_op);
    ops.push_back(w.asDiagonal() * M * w.cwiseInverse().asDiagonal());
  }
  return dense_product_exponents(ops, T_op);
}

}  // namespace floquet_sep
