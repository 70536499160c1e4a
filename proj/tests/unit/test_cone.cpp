#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "floquet_sep/cone.hpp"
#include "floquet_sep/errors.hpp"

using namespace floquet_sep;
using fs_test::mat2;

namespace {

// exhaustive max-bottleneck over all Hamiltonian paths from `start`
double brute_force_bottleneck(const Eigen::MatrixXd& W, int start) {
  const int n = static_cast<int>(W.rows());
  std::vector<int> rest;
  for (int j = 0; j < n; ++j) {
    if (j != start) rest.push_back(j);
  }
  double best = 0.0;
  do {
    double b = std::numeric_limits<double>::infinity();
    int cur = start;
    for (int nx : rest) {
      b = std::min(b, W(nx, cur));
      cur = nx;
    }
    if (b > 0.0) best = std::max(best, b);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

Driver symmetric_constant(double diag, double off, double b) {
  return Driver::constant(mat2(diag, off, off, diag), Eigen::MatrixXd::Constant(2, 2, b));
}

}  // namespace

TEST(Cooperativity, NegativeOffDiagonalIsFlagged) {
  auto w = Driver::constant(mat2(-1, -0.1, 0.2, -1), Eigen::MatrixXd::Zero(2, 2));
  auto r = check_cooperativity(w, 10.0);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(r.first_violation->matrix, 'A');
  EXPECT_EQ(r.first_violation->row, 1);
  EXPECT_EQ(r.first_violation->col, 2);
  EXPECT_DOUBLE_EQ(r.first_violation->value, -0.1);
}

TEST(Cooperativity, DiagonalAWithNonnegativeB) {
  auto w = Driver::constant(mat2(-3, 0, 0, 2), mat2(0, 1, 0.5, 0));
  EXPECT_TRUE(check_cooperativity(w, 10.0).ok);
  EXPECT_TRUE(check_cooperativity(fs_test::switching_system(), 500.0).ok);
}

TEST(Cooperativity, NegativeBIsFlagged) {
  auto w = Driver::constant(mat2(-1, 0, 0, -1), mat2(0, 0, -0.5, 0));
  auto r = check_cooperativity(w, 1.0);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.first_violation->matrix, 'B');
  EXPECT_EQ(r.first_violation->row, 2);
  EXPECT_EQ(r.first_violation->col, 1);
}

TEST(Cooperativity, QuasiperiodicNonnegativeOffDiagonal) {
  // a_12 = 1 + sin(2π x_0)
  QuasiperiodicTables tab;
  tab.rotation = Eigen::Vector2d(1.0, std::sqrt(3.0));
  tab.a_terms.push_back({{0, 0}, mat2(-1, 1, 0, -1), Eigen::MatrixXd::Zero(2, 2)});
  tab.a_terms.push_back({{1, 0}, Eigen::MatrixXd::Zero(2, 2), mat2(0, 1, 0, 0)});
  auto w = Driver::quasiperiodic(11, 2, tab);
  EXPECT_TRUE(check_cooperativity(w, 200.0).ok);
  EXPECT_THROW(check_cooperativity(w, 0.0), InvalidArgument);
}

TEST(Irreducibility, ConstantPositiveOffDiagonal) {
  for (int M : {1, 2, 3}) {
    auto rep = check_irreducibility(symmetric_constant(-1, 0.3, 0.1), M);
    EXPECT_TRUE(rep.satisfied);
    ASSERT_EQ(rep.delta_values.size(), 1u);
    EXPECT_NEAR(rep.bottleneck[0][0], 0.4 * M, 1e-12);
    EXPECT_NEAR(rep.bottleneck[1][0], 0.4 * M, 1e-12);
    EXPECT_NEAR(rep.delta_values[0], std::min(1.0, 0.4 * M), 1e-12);
    EXPECT_EQ(rep.paths[0][0], (std::vector<int>{1, 2}));
    EXPECT_EQ(rep.paths[1][0], (std::vector<int>{2, 1}));
    EXPECT_EQ(rep.window_times, (std::vector<double>{2.0}));
  }
}

TEST(Irreducibility, DiagonalWithoutDelayFails) {
  auto w = Driver::constant(mat2(-1, 0, 0, -2), Eigen::MatrixXd::Zero(2, 2));
  auto rep = check_irreducibility(w, 1);
  EXPECT_FALSE(rep.satisfied);
  EXPECT_EQ(rep.failing_start, 1);
  EXPECT_TRUE(rep.paths[0][0].empty());
}

TEST(Irreducibility, ChainStructureFromLastStart) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(1, 0) = 1.0;  // 1 -> 2
  A(2, 1) = 1.0;  // 2 -> 3
  auto w = Driver::constant(A, Eigen::MatrixXd::Zero(3, 3));
  auto rep = check_irreducibility(w, 1);
  EXPECT_FALSE(rep.satisfied);
  EXPECT_EQ(rep.window_times, (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(rep.paths[0][0], (std::vector<int>{1, 2, 3}));
  EXPECT_TRUE(rep.paths[2][0].empty());
  EXPECT_TRUE(rep.paths[2][1].empty());
  EXPECT_EQ(rep.failing_start, 2);
  const Eigen::MatrixXd W = A;
  for (int s = 0; s < 3; ++s) {
    double b = 0.0;
    best_hamiltonian_path(W, s, &b);
    EXPECT_EQ(b, brute_force_bottleneck(W, s)) << "start " << s;
  }
}

TEST(Irreducibility, SearchMatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 4;
    Eigen::MatrixXd W(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) W(i, j) = (i == j || u(rng) < 0.35) ? 0.0 : u(rng);
    }
    for (int s = 0; s < n; ++s) {
      double b = -1.0;
      auto path = best_hamiltonian_path(W, s, &b);
      EXPECT_DOUBLE_EQ(b, brute_force_bottleneck(W, s));
      if (!path.empty()) {
        ASSERT_EQ(static_cast<int>(path.size()), n);
        EXPECT_EQ(path.front(), s);
        auto sorted = path;
        std::sort(sorted.begin(), sorted.end());
        for (int j = 0; j < n; ++j) EXPECT_EQ(sorted[j], j);
      }
    }
  }
}

TEST(Irreducibility, TiesKeepSmallestIndex) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Ones(3, 3);
  EXPECT_EQ(best_hamiltonian_path(W, 1), (std::vector<int>{1, 0, 2}));
}

TEST(Focusing, ZeroDiagonalAndUnitDelta) {
  auto w = Driver::constant(mat2(0, 1, 1, 0), Eigen::MatrixXd::Zero(2, 2));
  auto rep = focusing_constants(Semiflow(w, 20), 1, SpaceNorm::C());
  for (double k : rep.K) EXPECT_EQ(k, 1.0);
  EXPECT_EQ(rep.k_delta, 1.0);
  EXPECT_EQ(rep.T, 4);
  EXPECT_EQ(rep.H, 2);
}

TEST(Focusing, TrivialFactorsGivePowerOfThree) {
  Semiflow flow(fs_test::zero_system(), 20);
  EXPECT_EQ(unit_cell_c(flow), 1.0);
  EXPECT_EQ(unit_cell_d(flow.driver(), SpaceNorm::C()), 0.0);
  EXPECT_EQ(unit_cell_d(flow.driver(), SpaceNorm::L1hat()), 0.0);
  const int T = 4;
  std::vector<double> c(T - 1, 1.0), d(T - 1, 0.0);
  EXPECT_NEAR(log_kappa_from(0.25, c, d, T), (T - 1) * std::log(3.0) - std::log(0.25), 1e-14);
  EXPECT_THROW(focusing_constants(flow, 1, SpaceNorm::C()), ContractViolation);
}

TEST(Focusing, ClosedFormKappa) {
  // A symmetric with eigenvalues -0.8, -1.2 so ‖e^{Aτ}‖ <= 1 and c = 1;
  // B = 0.1·ones has ‖B‖ = 0.2, window weight 0.2 + 0.1 = 0.3
  auto w = symmetric_constant(-1.0, 0.2, 0.1);
  Semiflow flow(w, 40);
  const double kd = std::exp(-8.0) * 0.3;
  const double kappa_ref = std::pow(3.0, 3) * std::pow(1.2, 3) / kd;
  for (auto sp : {SpaceNorm::C(), SpaceNorm::AC(), SpaceNorm::Lp(2.0), SpaceNorm::L1hat()}) {
    auto rep = focusing_constants(flow, 1, sp);
    EXPECT_NEAR(rep.k_delta / kd, 1.0, 1e-12) << sp.name();
    EXPECT_NEAR(rep.kappa / kappa_ref, 1.0, 1e-12) << sp.name();
    for (double c : rep.c) EXPECT_EQ(c, 1.0);
    for (double d : rep.d) EXPECT_NEAR(d, 0.2, 1e-14);
  }
}

TEST(Focusing, ClosedFormWithUnitDelta) {
  // off-diagonal mass 1.0 per window caps δ at 1; ‖B‖ = 1
  auto w = symmetric_constant(-1.0, 0.5, 0.5);
  auto rep = focusing_constants(Semiflow(w, 40), 1, SpaceNorm::C());
  EXPECT_NEAR(rep.kappa / (std::exp(8.0) * 27.0 * 8.0), 1.0, 1e-12);
}

TEST(Dichotomy, NoFeedbackKernelDies) {
  auto w = Driver::constant(mat2(-1, 1, 1, -1), Eigen::MatrixXd::Zero(2, 2));
  Semiflow flow(w, 20);
  auto u = Segment::l_element(Eigen::VectorXd::Zero(2), 20, [](double) { return Eigen::VectorXd::Ones(2); });
  auto r = dichotomy_test(flow, u, 4, SpaceNorm::Lp(2.0));
  EXPECT_EQ(r.outcome, DichotomyOutcome::Dies);
}

TEST(Dichotomy, IdentityDelayStaysAboveOne) {
  Semiflow flow(fs_test::identity_delay(), 20);
  auto r = dichotomy_test(flow, fs_test::ones(2, 20), 4, SpaceNorm::C());
  EXPECT_EQ(r.outcome, DichotomyOutcome::StrictlyPositive);
  EXPECT_GE(r.margin, 1.0);
}

TEST(Dichotomy, MarginAboveFocusingLowerBound) {
  auto w = symmetric_constant(-1.0, 0.2, 0.1);
  Semiflow flow(w, 40);
  auto rep = focusing_constants(flow, 1, SpaceNorm::C());
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
  e1(0) = 1.0;
  auto u = Segment::constant(e1, 40);
  auto r = dichotomy_test(flow, u, rep);
  ASSERT_EQ(r.outcome, DichotomyOutcome::StrictlyPositive);
  const double c1 = flow.apply(1.0, u, SpaceNorm::C()).max_entry();
  EXPECT_GE(r.margin, c1 * rep.k_delta);
}

TEST(Dichotomy, RejectsInvalidInput) {
  Semiflow flow(fs_test::identity_delay(), 20);
  EXPECT_THROW(dichotomy_test(flow, Segment(2, 20), 4, SpaceNorm::C()), InvalidArgument);
  EXPECT_THROW(dichotomy_test(flow, -1.0 * fs_test::ones(2, 20), 4, SpaceNorm::C()), InvalidArgument);
}

TEST(Dichotomy, ReducibleSystemIsNotClassified) {
  // B = diag, A = 0: a vector supported on component 1 never reaches component 2
  Semiflow flow(fs_test::identity_delay(), 20);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
  e1(0) = 1.0;
  EXPECT_THROW(dichotomy_test(flow, Segment::constant(e1, 20), 4, SpaceNorm::C()), ContractViolation);
}

TEST(Sandwich, AllOnesDelay) {
  auto w = Driver::constant(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 2));
  Semiflow flow(w, 40);
  auto rep = focusing_constants(flow, 1, SpaceNorm::C());
  auto u = fs_test::ones(2, 40);
  auto r = focusing_sandwich_check(flow, u, rep);
  EXPECT_TRUE(r.ok);
  EXPECT_GT(r.beta, 0.0);
  auto r2 = focusing_sandwich_check(flow, 2.0 * u, rep);
  EXPECT_TRUE(r2.ok);
  EXPECT_NEAR(r2.beta, 2.0 * r.beta, 1e-12 * r.beta);
}

TEST(Sandwich, ProductSpaceBeta) {
  auto w = symmetric_constant(-1.0, 0.2, 0.1);
  Semiflow flow(w, 40);
  auto rep = focusing_constants(flow, 1, SpaceNorm::Lp(2.0));
  auto u = Segment::l_element(Eigen::VectorXd::Ones(2), 40, [](double s) { return Eigen::VectorXd::Constant(2, -s); });
  auto r = focusing_sandwich_check(flow, u, rep);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.beta, 2.0 * std::sqrt(2.0) * r.lower, 1e-15);
  auto e = focusing_unit_vector(2, 40, SpaceNorm::Lp(2.0));
  EXPECT_NEAR(norm(e, SpaceNorm::Lp(2.0)), 1.0, 1e-14);
}

TEST(Sandwich, RejectsDeadVector) {
  auto w = Driver::constant(mat2(-1, 1, 1, -1), Eigen::MatrixXd::Zero(2, 2));
  Semiflow flow(w, 20);
  FocusingReport rep;
  rep.N = 2;
  rep.T = 4;
  rep.space = SpaceNorm::Lp(2.0);
  rep.k_delta = 1.0;
  rep.kappa = 1.0;
  auto u = Segment::l_element(Eigen::VectorXd::Zero(2), 20, [](double) { return Eigen::VectorXd::Ones(2); });
  EXPECT_THROW(focusing_sandwich_check(flow, u, rep), ContractViolation);
}

TEST(Focusing, RatioBoundedByKappa) {
  Semiflow flow(fs_test::switching_system(3), 40);
  auto rep = focusing_constants(flow, 1, SpaceNorm::C());
  std::mt19937_64 rng(41);
  for (int i = 0; i < 30; ++i) {
    auto u = fs_test::random_segment(rng, 2, 40, 0.0, 1.0, true);
    auto out = flow.apply(rep.T, u, SpaceNorm::C());
    EXPECT_LE(out.max_entry() / out.min_entry(), rep.kappa);
  }
}

TEST(Focusing, InvariantRangesOnShiftedFibers) {
  Semiflow flow(fs_test::switching_system(5), 20);
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> shift(-500, 500);
  for (int i = 0; i < 100; ++i) {
    auto rep = focusing_constants(flow.shifted(shift(rng)), 1, SpaceNorm::C());
    for (double k : rep.K) {
      EXPECT_GT(k, 0.0);
      EXPECT_LE(k, 1.0);
    }
    EXPECT_GT(rep.k_delta, 0.0);
    EXPECT_LE(rep.k_delta, 1.0);
    EXPECT_GE(rep.kappa, 1.0);
    for (double c : rep.c) EXPECT_GE(c, 1.0);
    for (double d : rep.irreducibility.delta_values) {
      EXPECT_GT(d, 0.0);
      EXPECT_LE(d, 1.0);
    }
  }
}

TEST(Focusing, LogLogKappaAveragesStayBounded) {
  Semiflow flow(fs_test::switching_system(6), 10);
  double sum = 0.0;
  double first_half = 0.0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    auto rep = focusing_constants(flow.shifted(4.0 * k), 1, SpaceNorm::C());
    sum += std::max(0.0, std::log(rep.log_kappa));
    if (k == n / 2 - 1) first_half = sum / (n / 2);
  }
  const double avg = sum / n;
  EXPECT_TRUE(std::isfinite(avg));
  EXPECT_LT(avg, 5.0);
  EXPECT_NEAR(avg, first_half, 0.1 * first_half + 1e-12);
}

TEST(Birkhoff, ConstantSystemHasConstantBeta) {
  auto w = symmetric_constant(-1.0, 0.2, 0.1);
  Semiflow flow(w, 20);
  auto rep = focusing_constants(flow, 1, SpaceNorm::C());
  auto b = birkhoff_beta_lowerbound(flow, 5, rep);
  ASSERT_EQ(b.log_beta.size(), 5u);
  for (double x : b.log_beta) EXPECT_NEAR(x, b.log_beta[0], 1e-12);
  EXPECT_NEAR(b.bound, b.log_beta[0] / rep.T, 1e-12);
}
