#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/special_functions/lambert_w.hpp>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "fixtures.hpp"
#include "floquet_sep/errors.hpp"
#include "floquet_sep/oracle.hpp"
#include "floquet_sep/semiflow.hpp"

using namespace floquet_sep;
using fs_test::mat2;
using cd = std::complex<double>;

namespace {

// winding number of f(λ) = λ − a − b e^{−λ} around the rectangle
int count_zeros_in_box(double a, double b, double re0, double re1, double im0, double im1) {
  auto f = [&](cd z) { return z - a - b * std::exp(-z); };
  std::vector<cd> corners = {{re0, im0}, {re1, im0}, {re1, im1}, {re0, im1}, {re0, im0}};
  double total = 0.0;
  const int steps = 20000;
  for (std::size_t e = 0; e + 1 < corners.size(); ++e) {
    cd prev = f(corners[e]);
    for (int i = 1; i <= steps; ++i) {
      const cd z = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(i) / steps);
      const cd cur = f(z);
      total += std::arg(cur / prev);
      prev = cur;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace

TEST(Perron, SymmetricRowSumZero) {
  auto r = perron_oracle(mat2(-1, 1, 1, -1));
  EXPECT_NEAR(r.lambda, 0.0, 1e-12);
  EXPECT_NEAR(r.v(0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.v(1), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Perron, NearDiagonal) {
  const double eps = 1e-6;
  auto r = perron_oracle(mat2(2, eps, eps, 1));
  EXPECT_NEAR(r.lambda, 2.0, 1e-10);
  EXPECT_GT(r.v(0), 0.999999);
  EXPECT_GT(r.v(1), 0.0);
}

TEST(Perron, RandomCooperativeIrreducible) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0), d(-3.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd A(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A(i, j) = i == j ? d(rng) : u(rng);
    }
    auto r = perron_oracle(A);
    EXPECT_LE((A * r.v - r.lambda * r.v).norm(), 1e-10);
    EXPECT_GT(r.v.minCoeff(), 0.0);
    const double spectral_abscissa = A.eigenvalues().real().maxCoeff();
    EXPECT_NEAR(r.lambda, spectral_abscissa, 1e-9);
  }
}

TEST(Perron, RejectsBadInput) {
  EXPECT_THROW(perron_oracle(mat2(-1, -0.5, 1, -1)), ContractViolation);
  EXPECT_THROW(perron_oracle(mat2(-1, 0, 1, -1)), ContractViolation);
}

TEST(CharRoots, LeadingRootIsOmegaConstant) {
  auto r = delay_char_roots(0.0, 1.0, 5);
  ASSERT_TRUE(r.complete);
  ASSERT_EQ(r.roots.size(), 5u);
  EXPECT_NEAR(r.roots[0].real(), fs_test::kOmegaConst, 1e-9);
  EXPECT_EQ(r.roots[0].imag(), 0.0);
  EXPECT_NEAR(r.roots[0].real(), boost::math::lambert_w0(1.0), 1e-14);
  for (double res : r.residuals) EXPECT_LE(res, 1e-10);
}

TEST(CharRoots, SecondPair) {
  auto r = delay_char_roots(0.0, 1.0, 5);
  EXPECT_NEAR(r.roots[1].real(), -1.533913, 1e-6);
  EXPECT_NEAR(r.roots[1].imag(), 4.375185, 1e-6);
  EXPECT_EQ(r.roots[2], std::conj(r.roots[1]));
  // Lambert W branches ±1 at 1 (tabulated)
  EXPECT_NEAR(r.roots[1].real(), fs_test::kSecondRe, 1e-12);
  EXPECT_NEAR(r.roots[3].real(), -2.401585105, 1e-8);
  EXPECT_NEAR(r.roots[3].imag(), 10.776299516, 1e-8);
}

TEST(CharRoots, CompleteInsideBox) {
  auto r = delay_char_roots(0.0, 1.0, 5);
  int inside = 0;
  for (const auto& z : r.roots) {
    if (z.real() > -2.5 && std::abs(z.imag()) < 12.0) ++inside;
  }
  EXPECT_EQ(inside, count_zeros_in_box(0.0, 1.0, -2.5, 1.0, -12.0, 12.0));
  EXPECT_EQ(inside, 5);
}

TEST(CharRoots, MatchesLambertW) {
  // λ = a + W0(b e^{-a})
  for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-0.5, 1.0}, std::pair{-2.0, 0.3}, std::pair{1.0, 2.0}}) {
    auto r = delay_char_roots(a, b, 3);
    EXPECT_NEAR(r.roots[0].real(), a + boost::math::lambert_w0(b * std::exp(-a)), 1e-12) << a << " " << b;
  }
}

TEST(CharRoots, OdeLimit) {
  auto r = delay_char_roots(-1.0, 1e-12, 1);
  EXPECT_NEAR(r.roots[0].real(), -1.0, 1e-10);
}

TEST(CharRoots, Errors) {
  EXPECT_THROW(delay_char_roots(0.0, 1.0, 9), InvalidArgument);
  EXPECT_THROW(delay_char_roots(0.0, -1.0, 3), InvalidArgument);
}

TEST(DenseProduct, IdentityDynamics) {
  std::vector<Eigen::MatrixXd> ops(20, Eigen::MatrixXd::Identity(5, 5));
  for (double x : dense_product_exponents(ops, 1.0)) EXPECT_EQ(x, 0.0);
}

TEST(DenseProduct, DiagonalScaling) {
  Eigen::MatrixXd D = Eigen::Vector3d(std::exp(0.5), std::exp(-1.0), std::exp(-3.0)).asDiagonal();
  std::vector<Eigen::MatrixXd> ops(30, D);
  auto ex = dense_product_exponents(ops, 2.0);
  EXPECT_NEAR(ex[0], 0.25, 1e-12);
  EXPECT_NEAR(ex[1], -0.5, 1e-12);
  EXPECT_NEAR(ex[2], -1.5, 1e-12);
}

TEST(DenseProduct, PerronSystem) {
  auto ex = dense_product_oracle(fs_test::perron_system(), 1.0, 60, SpaceNorm::C(), 20);
  EXPECT_NEAR(ex[0], 0.0, 1e-3);
  EXPECT_NEAR(ex[1], -2.0, 1e-3);
}

TEST(DenseProduct, IdentityDelayLeadingRoot) {
  auto ex = dense_product_oracle(fs_test::identity_delay(), 1.0, 80, SpaceNorm::C(), 40);
  EXPECT_NEAR(ex[0], fs_test::kOmegaConst, 5e-3);
}

TEST(DenseProduct, SizeGuard) {
  EXPECT_THROW(dense_product_oracle(fs_test::identity_delay(), 1.0, 5, SpaceNorm::C(), 41), ResourceLimit);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(4, 4);
  EXPECT_THROW(dense_product_oracle(Driver::constant(Z, Z), 1.0, 5, SpaceNorm::C(), 20), ResourceLimit);
}
