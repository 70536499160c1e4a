#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "floquet_sep/driver.hpp"
#include "floquet_sep/segment.hpp"

namespace fs_test {

using floquet_sep::CoefficientState;
using floquet_sep::Driver;
using floquet_sep::Segment;

// real root of λ = e^{-λ} (omega constant)
inline constexpr double kOmegaConst = 0.56714329040978387;
// real part of the first complex pair of λ = e^{-λ}
inline constexpr double kSecondRe = -1.5339133197935745;

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Driver zero_system(int n = 2) {
  return Driver::constant(Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n));
}

/// z' = z(t - 1) componentwise.
inline Driver identity_delay() {
  return Driver::constant(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
}

/// Same scalar mode (1,1) as identity_delay, plus a strongly damped (1,-1)
/// mode; irreducible with a simple leading exponent.
inline Driver coupled_delay() {
  return Driver::constant(mat2(-5, 5, 5, -5), Eigen::MatrixXd::Identity(2, 2));
}

inline Driver perron_system() {
  return Driver::constant(mat2(-1, 1, 1, -1), Eigen::MatrixXd::Zero(2, 2));
}

inline std::vector<CoefficientState> switching_states() {
  return {{mat2(-1.0, 1.0, 0.5, -1.5), mat2(0.5, 0.2, 0.3, 0.4)},
          {mat2(-2.0, 0.5, 1.0, -0.5), mat2(0.2, 0.5, 0.1, 0.6)}};
}

/// Two-state iid switching cooperative system, unit cells.
inline Driver switching_system(std::uint64_t seed = 7) {
  return Driver::iid_switching(seed, switching_states(), 1.0);
}

inline Segment ones(int n, int m) {
  return Segment::constant(Eigen::VectorXd::Ones(n), m);
}

/// e^{λ s} v sampled on the grid (continuous).
inline Segment exponential_history(double lambda, const Eigen::VectorXd& v, int m) {
  return Segment::from_function(static_cast<int>(v.size()), m,
                                [&](double s) -> Eigen::VectorXd { return std::exp(lambda * s) * v; });
}

/// Random flat segment with entries in [lo, hi).
inline Segment random_segment(std::mt19937_64& rng, int n, int m, double lo, double hi,
                              bool continuous) {
  std::uniform_real_distribution<double> u(lo, hi);
  Segment s(n, m);
  for (Eigen::Index i = 0; i < s.flat_size(); ++i) s.flat()(i) = u(rng);
  if (continuous) s.head() = s.node(m);
  return s;
}

inline double rel_diff(const Segment& a, const Segment& b) {
  const double scale = std::max(a.flat().lpNorm<Eigen::Infinity>(), 1e-300);
  return (a.flat() - b.flat()).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace fs_test
