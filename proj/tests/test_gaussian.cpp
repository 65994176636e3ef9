#include <gtest/gtest.h>

#include <cmath>

#include "bridgelab/bridge.hpp"
#include "bridgelab/gaussian.hpp"
#include "bridgelab/lab/experiments.hpp"
#include "bridgelab/random_states.hpp"

using namespace bridgelab;

// High-precision roots of the width condition, computed independently.
constexpr double kInverseAlphaHalfTau = 1.37228132326901432992530573410946465911;
constexpr double kAlphaHalfTau = 0.7287135538781690549875509556849107765184;
constexpr double kInverseAlphaNoSpread = 0.6180339887498948482;

TEST(PacketWidth, Values) {
  EXPECT_DOUBLE_EQ(packet_width(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(packet_width(1.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(packet_width(2.5, 0.0), 2.5);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const double s = rng.uniform(0.1, 3), t = rng.uniform(0, 5);
    EXPECT_DOUBLE_EQ(packet_width(s, t), packet_width(s, -t));
    EXPECT_GE(packet_width(s, t), s);
  }
}

TEST(PacketWavefunction, PhaseMatchesQuadraticAction) {
  const auto g = Grid1D::periodic(-20, 20, 512);
  const double t = 2.0;
  const auto st = from_wavefunction(packet_wavefunction({1.0, t, 0.0, 1.0, 1.0}, g), 1.0, 1.0);
  const double a = spreading_factor(1.0, t);
  const auto mask = st.phase_defined();
  const std::size_t c = g.n() / 2;
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (!mask[i]) continue;
    const double x = g.x(i);
    EXPECT_NEAR(st.s()[i] - st.s()[c], (t / 2.0) * x * x / (4.0 * a), 1e-8);
  }
}

TEST(BridgeWidth, Values) {
  const GaussianBridgeSpec unit{1.0, 1.0, 1.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(bridge_width(unit, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bridge_width(unit, 1.0), 2.0);
  const GaussianBridgeSpec wide{3.0, 5.0, 1.0, 0.0, 1.0};
  for (double tp : {0.0, 1.0, 2.5, 5.0}) EXPECT_NEAR(bridge_width(wide, tp), 3.0 + tp, 1e-14);
  EXPECT_THROW(bridge_width(unit, 1.5), InvalidArgument);
  EXPECT_THROW(bridge_width(GaussianBridgeSpec{1.0, 1.0, -1.0, 0.0, 1.0}, 0.75), NonPositiveWidth);
}

TEST(SolveAlpha, WidthDoubling) {
  const double u = solve_inverse_alpha(1.0, 2.0, 1.0);
  EXPECT_NEAR(u, 1.0, 1e-12);
  EXPECT_NEAR(solve_alpha(1.0, 2.0, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(bridge_width({1.0, 1.0, 1.0 / u, 0.0, 1.0}, 1.0), 2.0, 1e-10);
}

TEST(SolveAlpha, HalfTau) {
  EXPECT_NEAR(solve_inverse_alpha(1.0, 2.0, 0.5), kInverseAlphaHalfTau, 1e-12);
  EXPECT_NEAR(solve_alpha(1.0, 2.0, 0.5), kAlphaHalfTau, 1e-12);
  EXPECT_NEAR(bridge_width({1.0, 0.5, kAlphaHalfTau, 0.0, 1.0}, 0.5), 2.0, 1e-10);
}

TEST(SolveAlpha, NoSpreadKeepsEndpointWidth) {
  const double u = solve_inverse_alpha(1.0, 0.0, 1.0);
  EXPECT_NEAR(u, kInverseAlphaNoSpread, 1e-12);
  EXPECT_NEAR(bridge_width({1.0, 1.0, 1.0 / u, 0.0, 1.0}, 1.0), 1.0, 1e-10);
}

TEST(SolveAlpha, BackSubstitutionOnRandomInputs) {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const double sigma = rng.uniform(0.2, 4.0), t = rng.uniform(0.0, 6.0), tau = rng.uniform(0.05, 3.0);
    const double hbar = rng.uniform(0.5, 2.0), m = rng.uniform(0.5, 2.0);
    try {
      const double u = solve_inverse_alpha(sigma, t, tau, hbar, m);
      const GaussianBridgeSpec spec{sigma, tau, 1.0 / u, 0.0, hbar / m};
      const double target = packet_width(sigma, t, hbar, m);
      EXPECT_NEAR(bridge_width(spec, tau), target, 1e-9 * target);
      for (double f : {0.25, 0.5, 0.75}) EXPECT_GT(bridge_width(spec, f * tau), 0.0);
    } catch (const NoValidRoot&) {
    }
  }
}

TEST(CollapseProfile, Values) {
  const auto start = collapse_profile(1.0, 1.0, 1e-3, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(start.center, 0.0);
  EXPECT_DOUBLE_EQ(start.width, 1.0);
  const auto mid = collapse_profile(1.0, 1.0, 0.0, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(mid.center, 1.0);
  EXPECT_DOUBLE_EQ(mid.width, 0.5);
  const auto end = collapse_profile(1.0, 1.0, 1e-3, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(end.center, 2.0);
  EXPECT_NEAR(end.width, 1e-3, 1e-18);
  EXPECT_DOUBLE_EQ(collapse_profile(1.0, 1.0, 0.0, 2.0, 1.0).width, 0.0);
}

TEST(GaussianTauStep, HeatAndAntiHeat) {
  const GaussianPairParams pair{{0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}};
  const auto same = gaussian_tau_step(pair, 0.0);
  EXPECT_EQ(same.fwd.variance, 1.0);
  EXPECT_EQ(same.bwd.log_amplitude, 0.0);
  const auto next = gaussian_tau_step(pair, 0.1);
  EXPECT_DOUBLE_EQ(next.fwd.variance, 1.1);
  EXPECT_DOUBLE_EQ(next.bwd.variance, 0.9);
  EXPECT_THROW(gaussian_tau_step(pair, 1.0), VarianceCollapse);
  EXPECT_THROW(gaussian_tau_step(pair, -0.1), InvalidArgument);
}

TEST(GaussianTauStep, PreservesMassOfEachFactor) {
  const GaussianPairParams pair{{0.3, 1.2, -0.4}, {-0.5, 2.0, 0.1}};
  const auto next = gaussian_tau_step(pair, 0.5, 1.0, 2.0);
  auto mass = [](const GaussianProfile& p) { return std::exp(p.log_amplitude) * std::sqrt(p.variance); };
  EXPECT_NEAR(mass(next.fwd), mass(pair.fwd), 1e-14);
  EXPECT_NEAR(mass(next.bwd), mass(pair.bwd), 1e-14);
  EXPECT_DOUBLE_EQ(next.fwd.center, 0.3);
}

TEST(GaussianTauStep, GridStepAgrees) {
  const auto g = Grid1D::periodic(-20, 20, 512);
  const GaussianPairParams pair{{0.5, 1.0, 0.0}, {-0.3, 1.5, -0.2}};
  const double dtau = 0.01;
  const auto exact = gaussian_tau_step(pair, dtau);
  const auto grid = tau_step(BridgePair{sample(g, pair.fwd), sample(g, pair.bwd), 1.0, 1.0}, dtau);
  const auto fwd = sample(g, exact.fwd), bwd = sample(g, exact.bwd);
  for (std::size_t i = 0; i < g.n(); ++i) {
    EXPECT_NEAR(grid.phi_fwd[i], fwd[i], 1e-8);
    EXPECT_NEAR(grid.phi_bwd[i], bwd[i], 1e-8);
  }
}

TEST(ComplexGaussian, TimeStepMatchesGridPropagation) {
  const auto g = Grid1D::periodic(-30, 30, 1024);
  auto s0 = gaussian_state(1.0, 0.5, 0.7);
  const auto psi0 = sample_complex(g, [&](double x) { return s0(x); });
  const double n = std::sqrt(integrate(abs2(psi0)));
  s0.c -= std::log(n);
  const auto grid_psi = step_schrodinger(sample_complex(g, [&](double x) { return s0(x); }), 1.1, 1.0, 1.0);
  const auto exact = gaussian_t_step(s0, 1.1);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) worst = std::max(worst, std::abs(grid_psi[i] - exact(g.x(i))));
  EXPECT_LT(worst, 1e-10);
  EXPECT_NEAR(exact.fisher_len2(), packet_width(1.0, 1.1), 1e-12);
}

TEST(ComplexGaussian, BridgeStepPreservesRealStateMean) {
  const auto s0 = gaussian_state(1.0, 0.4, 0.0);
  const auto next = gaussian_bridge_step(s0, 0.05);
  EXPECT_NEAR(next.mean(), 0.4, 1e-12);
}

TEST(ComplexGaussian, BridgeStepCollapsesForLargeStep) {
  // the backward factor of a unit-variance density has variance 2
  EXPECT_NO_THROW(gaussian_bridge_step(gaussian_state(1.0), 1.9));
  EXPECT_THROW(gaussian_bridge_step(gaussian_state(1.0), 2.1), VarianceCollapse);
}

TEST(Curvature, ExactPathValue) {
  const auto g = gaussian_state(1.0);
  // The closed-form mixed difference tends to hbar^2/(m^2 v).
  EXPECT_NEAR(gaussian_curvature_estimate(g, 1e-3, 1e-3), 1.0, 1e-5);
  const double e1 = gaussian_curvature_estimate(g, 2e-3, 2e-3);
  const double e2 = gaussian_curvature_estimate(g, 1e-3, 1e-3);
  EXPECT_NEAR((4.0 * e2 - e1) / 3.0, 1.0, 1e-9);
}

TEST(Curvature, ScalesWithHbarSquaredAndInverseVariance) {
  for (double hbar : {1.0, 1e-3})
    for (double v : {0.5, 1.0, 2.0}) {
      const auto g = gaussian_state(v, 0.0, 0.0, hbar);
      EXPECT_NEAR(gaussian_curvature_estimate(g, 1e-3, 1e-3, hbar, 1.0) / (hbar * hbar / v), 1.0, 1e-2);
    }
}

TEST(Curvature, GridPathAgreesWithExactPath) {
  const auto grid = Grid1D::periodic(-20, 20, 512);
  const auto st = lab::gaussian_hydro_state(grid, 1.0, 0.0, 1.0, 1.0);
  const double numeric = lab::grid_curvature_estimate(st, 1e-3);
  const double exact = gaussian_curvature_estimate(gaussian_state(1.0), 1e-3, 1e-3);
  EXPECT_NEAR(numeric / exact, 1.0, 1e-6);
}
