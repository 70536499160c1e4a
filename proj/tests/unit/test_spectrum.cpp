#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "floquet_sep/cone.hpp"
#include "floquet_sep/errors.hpp"
#include "floquet_sep/oracle.hpp"
#include "floquet_sep/spectrum.hpp"

using namespace floquet_sep;
using fs_test::mat2;

namespace {

const std::vector<SpaceNorm> kAllSpaces = {SpaceNorm::C(), SpaceNorm::Lp(2.0), SpaceNorm::L1hat(),
                                           SpaceNorm::AC()};

// sum of the leading root and the first complex pair of λ = e^{-λ}
constexpr double kPairSum = fs_test::kOmegaConst + fs_test::kSecondRe;

Segment ramp(int n, int m) {
  return Segment::from_function(n, m, [n](double s) { return Eigen::VectorXd::Constant(n, -s); });
}

}  // namespace

TEST(TopLyapunov, PerronSystemIsNeutral) {
  Semiflow flow(fs_test::perron_system(), 50);
  auto est = top_lyapunov(flow, fs_test::ones(2, 50), 100.0, 1.0, SpaceNorm::C());
  EXPECT_NEAR(est.lambda1, 0.0, 1e-6);
}

TEST(TopLyapunov, IdentityDelayMatchesRoot) {
  Semiflow flow(fs_test::identity_delay(), 100);
  for (const auto& sp : kAllSpaces) {
    auto est = top_lyapunov(flow, fs_test::ones(2, 100), 100.0, 1.0, sp);
    EXPECT_NEAR(est.lambda1, fs_test::kOmegaConst, 1e-3) << sp.name();
    EXPECT_EQ(est.t.size(), est.running.size());
  }
}

TEST(TopLyapunov, ScaleInvariant) {
  Semiflow flow(fs_test::switching_system(), 40);
  std::mt19937_64 rng(1);
  auto u = fs_test::random_segment(rng, 2, 40, 0, 1, true);
  auto a = top_lyapunov(flow, u, 60.0, 1.0, SpaceNorm::C());
  auto b = top_lyapunov(flow, 10.0 * u, 60.0, 1.0, SpaceNorm::C());
  EXPECT_NEAR(a.lambda1, b.lambda1, 1e-12);
}

TEST(TopLyapunov, KernelVectorIsReported) {
  auto w = Driver::constant(mat2(-1, 1, 1, -1), Eigen::MatrixXd::Zero(2, 2));
  Semiflow flow(w, 20);
  auto u = Segment::l_element(Eigen::VectorXd::Zero(2), 20, [](double) { return Eigen::VectorXd::Ones(2); });
  EXPECT_THROW(top_lyapunov(flow, u, 20.0, 1.0, SpaceNorm::Lp(2.0)), KernelVector);
  EXPECT_THROW(top_lyapunov(flow, fs_test::ones(2, 20), 20.0, 0.01, SpaceNorm::C()), InvalidArgument);
}

TEST(TopLyapunov, SignedStartHasSameRate) {
  Semiflow flow(fs_test::switching_system(17), 40);
  const auto cone = top_lyapunov(flow, fs_test::ones(2, 40), 150.0, 1.0, SpaceNorm::C());
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    auto u = fs_test::random_segment(rng, 2, 40, -1, 1, true);
    auto est = top_lyapunov(flow, u, 150.0, 1.0, SpaceNorm::C());
    EXPECT_NEAR(est.lambda1, cone.lambda1, 1e-3);
  }
}

TEST(Pullback, PerronDirectionIsConstant) {
  Semiflow flow(fs_test::perron_system(), 40);
  std::mt19937_64 rng(3);
  auto u0 = fs_test::random_segment(rng, 2, 40, 0.1, 1, true);
  auto est = pullback_floquet(flow, 20.0, u0, SpaceNorm::C());
  const double c = 1.0 / std::sqrt(2.0);
  for (int j = 0; j <= 40; ++j) {
    EXPECT_NEAR(est.w.node(j)(0), c, 1e-9);
    EXPECT_NEAR(est.w.node(j)(1), c, 1e-9);
  }
  EXPECT_NEAR(norm(est.w, SpaceNorm::C()), 1.0, 1e-10);
}

TEST(Pullback, UniqueAcrossStarts) {
  Semiflow flow(fs_test::switching_system(4), 40);
  std::mt19937_64 rng(4);
  auto a = pullback_floquet(flow, 40.0, fs_test::random_segment(rng, 2, 40, 0, 1, true), SpaceNorm::C());
  auto b = pullback_floquet(flow, 40.0, fs_test::random_segment(rng, 2, 40, 0, 1, true), SpaceNorm::C());
  EXPECT_LE(norm(a.w - b.w, SpaceNorm::C()), 2.0 * std::max(a.residual, b.residual) + 1e-12);
  EXPECT_TRUE(a.w.in_cone());
  EXPECT_GT(a.w.min_entry(), 0.0);
}

TEST(Pullback, IdentityDelayProfile) {
  const int m = 100;
  Semiflow flow(fs_test::identity_delay(), m);
  auto est = pullback_floquet(flow, 30.0, fs_test::ones(2, m), SpaceNorm::C(), {1.0, 4.0, 1e-8});
  // C-norm of e^{λ s}(1,1) is √2, attained at s = 0
  for (int j = 0; j <= m; ++j) {
    const double ref = std::exp(fs_test::kOmegaConst * est.w.node_time(j)) / std::sqrt(2.0);
    EXPECT_NEAR(est.w.node(j)(0), ref, 1e-5);
  }
}

TEST(Pullback, NotConvergedIsReported) {
  Semiflow flow(fs_test::switching_system(4), 40);
  EXPECT_THROW(pullback_floquet(flow, 3.0, fs_test::ones(2, 40), SpaceNorm::C()), NotConverged);
}

TEST(Pullback, FloquetInvariance) {
  Semiflow flow(fs_test::switching_system(8), 40);
  auto u0 = fs_test::ones(2, 40);
  auto here = pullback_floquet(flow, 40.0, u0, SpaceNorm::C());
  for (double t : {1.0, 2.5, 7.0}) {
    Segment moved = flow.apply(t, here.w, SpaceNorm::C());
    moved *= 1.0 / norm(moved, SpaceNorm::C());
    auto there = pullback_floquet(flow.shifted(t), 40.0, u0, SpaceNorm::C());
    EXPECT_LE(norm(moved - there.w, SpaceNorm::C()), 3.0 * std::max(here.residual, there.residual) + 1e-12)
        << "t = " << t;
  }
}

TEST(Pullback, ExponentialAttraction) {
  Semiflow flow(fs_test::switching_system(8), 40);
  auto est = pullback_floquet(flow, 40.0, fs_test::ones(2, 40), SpaceNorm::C(), {1.0, 4.0, 1e-8});
  ASSERT_GT(est.sigma_forward, 0.0);
  std::mt19937_64 rng(5);
  auto u = fs_test::random_segment(rng, 2, 40, 0, 1, true);
  Segment v = u, w = est.w;
  std::vector<double> t, ld;
  for (int k = 1; k <= 30; ++k) {
    v = flow.step_unit(v, k - 1.0);
    w = flow.step_unit(w, k - 1.0);
    v *= 1.0 / norm(v, SpaceNorm::C());
    w *= 1.0 / norm(w, SpaceNorm::C());
    const double d = norm(v - w, SpaceNorm::C());
    if (k >= 4 && d > 1e-11) {
      t.push_back(k);
      ld.push_back(std::log(d));
    }
  }
  ASSERT_GE(t.size(), 5u);
  EXPECT_LE(linear_fit(t, ld).slope, -0.5 * est.sigma_forward);
}

TEST(Volume, FormulaOnExplicitVectors) {
  Segment a(1, 2), b(1, 2);
  // weights (1, 1/4, 1/2, 1/4): a is e_head, b is the middle node scaled to unit norm
  a.flat()(0) = 1.0;
  b.flat()(2) = std::sqrt(2.0);
  EXPECT_NEAR(volume({a, b}), 1.0, 1e-15);
  EXPECT_NEAR(volume({a}), 1.0, 1e-15);
  EXPECT_NEAR(volume({2.0 * a, a + 3.0 * b}), 6.0, 1e-14);
  EXPECT_NEAR(volume({a, 2.0 * a}), 0.0, 1e-15);
}

TEST(Volume, SingleVectorMatchesTopLyapunov) {
  Semiflow flow(fs_test::coupled_delay(), 50);
  auto vol = volume_growth_exponents(flow, 1, 100.0, SpaceNorm::C(), 1.0, 1, 1.0);
  EXPECT_NEAR(vol.partial[0], fs_test::kOmegaConst, 2e-3);
}

TEST(Volume, TrivialFlowHasZeroRates) {
  Semiflow flow(fs_test::zero_system(), 20);
  auto vol = volume_growth_exponents(flow, 2, 100.0, SpaceNorm::Lp(2.0));
  // each vector freezes at its head; the pair spans a fixed plane
  EXPECT_NEAR(vol.partial[0], 0.0, 1e-12);
  EXPECT_NEAR(vol.partial[1], 0.0, 1e-12);
}

TEST(Volume, CoupledDelayPairSum) {
  Semiflow flow(fs_test::coupled_delay(), 50);
  auto vol = volume_growth_exponents(flow, 3, 200.0, SpaceNorm::C(), 1.0, 1, 4.0);
  EXPECT_NEAR(vol.partial[1], kPairSum, 2e-2);
  EXPECT_NEAR(vol.exponents[1], fs_test::kSecondRe, 2e-2);
}

TEST(Volume, Guards) {
  Semiflow flow(fs_test::coupled_delay(), 20);
  EXPECT_THROW(volume_growth_exponents(flow, 7, 400.0, SpaceNorm::C()), ResourceLimit);
  EXPECT_THROW(volume_growth_exponents(flow, 2, 100.0, SpaceNorm::C(), 1.0, 1, 4.0), InvalidArgument);
}

TEST(Oseledets, PerronSystem) {
  Semiflow flow(fs_test::perron_system(), 20);
  OseledetsOptions o;
  o.transient = 10.0;
  auto est = oseledets_split(flow, 1.0, 60.0, SpaceNorm::C(), o);
  EXPECT_NEAR(est.lambdas[0], 0.0, 1e-6);
  EXPECT_NEAR(est.lambdas[1], -2.0, 1e-3);
  EXPECT_EQ(est.leading_dim, 1);
  EXPECT_LE(est.E1_angle_to_w, 1e-6);
}

TEST(Oseledets, CoupledDelay) {
  Semiflow flow(fs_test::coupled_delay(), 50);
  auto est = oseledets_split(flow, 1.0, 150.0, SpaceNorm::C());
  EXPECT_NEAR(est.lambdas[0], fs_test::kOmegaConst, 1e-3);
  EXPECT_NEAR(est.lambdas[1], fs_test::kSecondRe, 5e-2);
  EXPECT_NEAR(est.lambdas[2], fs_test::kSecondRe, 5e-2);
  EXPECT_EQ(est.leading_dim, 1);
  EXPECT_NEAR(second_exponent(est.lambdas, 5e-2), est.lambdas[1], 1e-15);
  EXPECT_LE(est.E1_angle_to_w, 1e-6);
  EXPECT_FALSE(est.proj_norms.empty());
}

TEST(Oseledets, IdentityDelayHasDoubleLeadingExponent) {
  // B = I decouples the components, so the leading exponent is repeated
  Semiflow flow(fs_test::identity_delay(), 30);
  OseledetsOptions o;
  o.transient = 10.0;
  auto est = oseledets_split(flow, 1.0, 60.0, SpaceNorm::C(), o);
  EXPECT_NEAR(est.lambdas[0], fs_test::kOmegaConst, 2e-3);
  EXPECT_NEAR(est.lambdas[1], fs_test::kOmegaConst, 2e-3);
  EXPECT_EQ(est.leading_dim, 2);
}

// the coupled system has a complex pair in second place; its split between
// the two columns only averages out at rate 1/T, hence the long horizon
TEST(Oseledets, AgreesWithDenseOracle) {
  for (auto drv : {fs_test::coupled_delay(), fs_test::switching_system(3)}) {
    Semiflow flow(drv, 20);
    OseledetsOptions o;
    o.transient = 10.0;
    auto est = oseledets_split(flow, 1.0, 2000.0, SpaceNorm::C(), o);
    auto ref = dense_product_oracle(drv, 1.0, 2000, SpaceNorm::C(), 20);
    EXPECT_NEAR(est.lambdas[0], ref[0], 1e-3);
    EXPECT_NEAR(est.lambdas[1], ref[1], 1e-3);
  }
}

TEST(Oseledets, CapIsEnforced) {
  Semiflow flow(fs_test::coupled_delay(), 200);
  OseledetsOptions o;
  o.cap = 100;
  EXPECT_THROW(oseledets_split(flow, 1.0, 60.0, SpaceNorm::C(), o), ResourceLimit);
  EXPECT_THROW(oseledets_split(Semiflow(fs_test::coupled_delay(), 20), 0.5, 60.0, SpaceNorm::C()),
               InvalidArgument);
}

TEST(SecondExponent, Resolution) {
  EXPECT_EQ(second_exponent({1.0, 0.99, 0.5}, 5e-2), 0.5);
  EXPECT_EQ(second_exponent({1.0, 0.99}, 5e-2), kMinusInfinity);
}

TEST(Temperedness, ConstantAndExponential) {
  std::vector<double> t, flat, grow;
  for (int i = 0; i < 50; ++i) {
    t.push_back(i);
    flat.push_back(3.0);
    grow.push_back(std::exp(0.1 * i));
  }
  auto a = temperedness_diagnostic(t, flat, 4.0);
  EXPECT_NEAR(a.slope, 0.0, 1e-15);
  EXPECT_TRUE(a.pass);
  auto b = temperedness_diagnostic(t, grow, 4.0);
  EXPECT_NEAR(b.slope, 0.1, 1e-12);
  EXPECT_FALSE(b.pass);
}

TEST(Temperedness, NeedsEnoughSamples) {
  std::vector<double> t(10), v(10, 1.0);
  for (int i = 0; i < 10; ++i) t[i] = 10.0 * i;
  EXPECT_THROW(temperedness_diagnostic(t, v, 4.0), InvalidArgument);
  std::vector<double> t2(30), v2(30, 1.0);
  for (int i = 0; i < 30; ++i) t2[i] = 0.1 * i;
  EXPECT_THROW(temperedness_diagnostic(t2, v2, 4.0), InvalidArgument);
}

TEST(Separation, CoupledDelay) {
  Semiflow flow(fs_test::coupled_delay(), 50);
  SeparationConfig cfg;
  cfg.horizon = 200.0;
  cfg.census = 50;
  auto rep = separation_report(flow, cfg);
  EXPECT_TRUE(rep.inconsistencies.empty()) << (rep.inconsistencies.empty() ? "" : rep.inconsistencies[0]);
  EXPECT_NEAR(rep.sigma, fs_test::kOmegaConst - fs_test::kSecondRe, 6e-2);
  EXPECT_TRUE(rep.tempered.pass);
  EXPECT_TRUE(rep.pass());
  EXPECT_EQ(rep.census_tested, 50);
}

TEST(Separation, PerronSystem) {
  Semiflow flow(fs_test::perron_system(), 20);
  SeparationConfig cfg;
  cfg.horizon = 200.0;
  cfg.transient = 10.0;
  cfg.census = 20;
  auto rep = separation_report(flow, cfg);
  EXPECT_NEAR(rep.sigma, 2.0, 1e-2);
  EXPECT_EQ(rep.leading_dim, 1);
}

TEST(CrossSpace, IdentityDelayAgrees) {
  Semiflow flow(fs_test::identity_delay(), 50);
  auto tab = cross_space_compare(flow, kAllSpaces, 100.0, 30.0);
  ASSERT_EQ(tab.rows.size(), 4u);
  EXPECT_LE(tab.max_deviation, 2e-3);
  for (const auto& r : tab.rows) EXPECT_NEAR(r.lambda1, fs_test::kOmegaConst, 2e-3);
}

TEST(CrossSpace, ZeroSystemDiesEverywhere) {
  Semiflow flow(fs_test::zero_system(), 20);
  auto tab = cross_space_compare(flow, kAllSpaces, 20.0, 10.0, ramp(2, 20));
  for (const auto& r : tab.rows) {
    EXPECT_TRUE(r.dies);
    EXPECT_EQ(r.lambda1, kMinusInfinity);
  }
  EXPECT_EQ(tab.max_deviation, 0.0);
}

TEST(CrossSpace, EmbeddingCommutesWithFlow) {
  Semiflow flow(fs_test::switching_system(12), 40);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    auto u = fs_test::random_segment(rng, 2, 40, -1, 1, true);
    for (double t : {0.5, 1.0, 3.0}) {
      auto uc = flow.apply(t, u, SpaceNorm::C());
      auto ul = flow.apply(t, embed_J(u), SpaceNorm::Lp(2.0));
      EXPECT_EQ(ul.flat(), embed_J(uc).flat());
      EXPECT_LE(norm(ul, SpaceNorm::Lp(2.0)), 2.0 * norm(uc, SpaceNorm::C()) * (1 + 1e-14));
    }
  }
}

TEST(Birkhoff, SingleTerm) {
  auto w = Driver::constant(mat2(-1, 0.2, 0.2, -1), 0.1 * Eigen::MatrixXd::Ones(2, 2));
  Semiflow flow(w, 20);
  auto rep = focusing_constants(flow, 1, SpaceNorm::C());
  auto b = birkhoff_beta_lowerbound(flow, 1, rep);
  auto e = focusing_unit_vector(2, 20, SpaceNorm::C());
  const double beta = norm(flow.apply(1.0, e, SpaceNorm::C()), SpaceNorm::C()) * rep.k_delta;
  EXPECT_NEAR(b.bound, std::log(beta) / rep.T, 1e-14);
}

TEST(Birkhoff, BelowTopExponent) {
  Semiflow flow(fs_test::coupled_delay(), 50);
  auto rep = focusing_constants(flow, 1, SpaceNorm::C());
  auto b = birkhoff_beta_lowerbound(flow, 50, rep);
  auto top = top_lyapunov(flow, fs_test::ones(2, 50), 100.0, 1.0, SpaceNorm::C());
  EXPECT_TRUE(std::isfinite(b.bound));
  EXPECT_LE(b.bound, top.lambda1 + 1e-3);
}

TEST(RandomCone, DeterministicAndAdmissible) {
  auto a = random_cone_segment(3, 10, 99, false);
  auto b = random_cone_segment(3, 10, 99, false);
  EXPECT_EQ(a.flat(), b.flat());
  EXPECT_TRUE(a.in_cone());
  EXPECT_TRUE(a.is_continuous());
  auto c = random_cone_segment(3, 10, 99, true);
  EXPECT_TRUE(c.in_cone());
}
