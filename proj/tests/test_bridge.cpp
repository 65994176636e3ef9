#include <gtest/gtest.h>

#include <cmath>

#include "bridgelab/bridge.hpp"
#include "bridgelab/gaussian.hpp"
#include "bridgelab/random_states.hpp"
#include "support.hpp"

using namespace bridgelab;
using testing_support::max_abs_diff;

namespace {

Grid1D bridge_grid() { return Grid1D::closed(-15.0, 15.0, 512); }

BridgeSolution width_doubling_bridge(const Grid1D& g) {
  return solve_schrodinger_system({gaussian_density(g, 0.0, 1.0), gaussian_density(g, 0.0, 2.0), 1.0, 1.0, 1.0});
}

}  // namespace

TEST(HeatKernel, GaussianVarianceAddsOnBothGridKinds) {
  for (const auto& g : {Grid1D::closed(-20, 20, 801), Grid1D::periodic(-20, 20, 512)}) {
    const auto out = heat_kernel_apply(gaussian_density(g, 0.0, 1.0), 0.7, 1.0, 1.0);
    EXPECT_NEAR(integrate(out), 1.0, 1e-10);
    EXPECT_NEAR(position_variance(out), 1.7, 1e-8) << to_string(g.mode());
  }
}

TEST(HeatKernel, ScalesWithHbarOverMass) {
  const auto g = Grid1D::periodic(-20, 20, 512);
  const auto out = heat_kernel_apply(gaussian_density(g, 0.0, 1.0), 0.5, 2.0, 4.0);
  EXPECT_NEAR(position_variance(out), 1.25, 1e-8);
}

TEST(HeatKernel, TinyStepIsIdentity) {
  const auto g = Grid1D::closed(-10, 10, 401);
  const auto rho = gaussian_density(g, 0.3, 1.0);
  EXPECT_LT(max_abs_diff(heat_kernel_apply(rho, 1e-8, 1.0, 1.0), rho), 1e-6);
  EXPECT_THROW(heat_kernel_apply(rho, 0.0, 1.0, 1.0), InvalidArgument);
}

TEST(HeatKernel, NarrowKernelConservesMassAwayFromEdges) {
  const auto g = Grid1D::closed(-5, 5, 201);
  const auto rho = gaussian_density(g, 0.0, 0.5);
  for (double v : {1e-6, 1e-4, 1e-3, 2.4e-3, 5e-3}) {
    const auto out = HeatKernel(g, v).apply(rho);
    EXPECT_NEAR(integrate(out), 1.0, 1e-12) << v;
    EXPECT_NEAR(position_variance(out), 0.5 + v, 1e-10) << v;
  }
}

TEST(HeatKernel, NonnegativeInputGivesNonnegativeOutput) {
  Rng rng(5);
  const auto g = Grid1D::closed(-4, 4, 81);
  for (int trial = 0; trial < 20; ++trial) {
    RealField f(g);
    for (auto& v : f) v = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0, 3);
    for (double v : HeatKernel(g, rng.uniform(1e-4, 2.0)).apply(f)) EXPECT_GE(v, 0.0);
  }
}

TEST(Sinkhorn, PureDiffusionConvergesImmediately) {
  const auto g = bridge_grid();
  const auto rho0 = gaussian_density(g, -1.0, 0.8);
  const auto rho1 = HeatKernel(g, 1.0).apply(rho0);
  const auto sol = solve_schrodinger_system({rho0, rho1, 1.0, 1.0, 1.0});
  EXPECT_LE(sol.iterations, 2u);
  EXPECT_LE(sol.marginal_residual, 1e-10);
  for (std::size_t i = 0; i < g.n(); ++i) EXPECT_NEAR(sol.phiT[i], sol.phiT[g.n() / 2], 1e-10);
}

TEST(Sinkhorn, WidthDoublingMatchesWidthLaw) {
  const auto g = bridge_grid();
  const auto sol = width_doubling_bridge(g);
  EXPECT_LE(sol.marginal_residual, 1e-10);
  EXPECT_LE(sol.iterations, 200u);
  const GaussianBridgeSpec spec{1.0, 1.0, solve_alpha(1.0, 2.0, 1.0), 0.0, 1.0};
  for (double tp : {0.0, 0.25, 0.5, 0.75, 1.0})
    EXPECT_NEAR(position_variance(interior(sol, tp).rho), bridge_width(spec, tp), 1e-4) << tp;
}

TEST(Sinkhorn, ResidualHistoryDecreases) {
  const auto g = Grid1D::closed(-12, 12, 241);
  const auto sol = solve_schrodinger_system(
      {gaussian_density(g, -2.0, 0.6), gaussian_density(g, 1.5, 1.4), 0.5, 1.0, 1.0}, 1e-11);
  ASSERT_GE(sol.residual_history.size(), 2u);
  for (std::size_t i = 1; i < sol.residual_history.size(); ++i)
    EXPECT_LE(sol.residual_history[i], sol.residual_history[i - 1] * (1.0 + 1e-9));
}

TEST(Sinkhorn, EqualMarginalsAreSymmetric) {
  const auto g = bridge_grid();
  const auto rho = gaussian_density(g, 0.0, 1.0);
  const auto sol = solve_schrodinger_system({rho, rho, 1.0, 1.0, 1.0});
  EXPECT_LT(max_abs_diff(sol.phi0, sol.phiT), 1e-8);
  const auto mid = interior(sol, 0.5).rho;
  for (std::size_t i = 0; i < g.n(); ++i) EXPECT_NEAR(mid[i], mid[g.n() - 1 - i], 1e-8);
  for (double tp : {0.1, 0.3})
    EXPECT_LT(max_abs_diff(interior(sol, tp).rho, interior(sol, 1.0 - tp).rho), 1e-8);
}

TEST(Sinkhorn, ReversedProblemMirrorsInterior) {
  const auto g = Grid1D::closed(-12, 12, 241);
  const auto a = gaussian_density(g, -1.0, 0.7), b = gaussian_density(g, 2.0, 1.3);
  const auto fwd = solve_schrodinger_system({a, b, 1.0, 1.0, 1.0}, 1e-11);
  const auto rev = solve_schrodinger_system({b, a, 1.0, 1.0, 1.0}, 1e-11);
  for (double tp : {0.2, 0.5, 0.9})
    EXPECT_LT(max_abs_diff(interior(fwd, tp).rho, interior(rev, 1.0 - tp).rho), 1e-8) << tp;
}

TEST(Interior, EndpointsReproduceMarginals) {
  const auto g = bridge_grid();
  const auto sol = width_doubling_bridge(g);
  EXPECT_LT(max_abs_diff(interior(sol, 0.0).rho, gaussian_density(g, 0.0, 1.0)), 1e-9);
  EXPECT_LT(max_abs_diff(interior(sol, 1.0).rho, gaussian_density(g, 0.0, 2.0)), 1e-9);
  EXPECT_THROW(interior(sol, 1.1), InvalidArgument);
}

TEST(Interior, PairProductIsDensity) {
  const auto g = bridge_grid();
  const auto in = interior(width_doubling_bridge(g), 0.4);
  const auto st = from_bridge_pair(in.pair);
  EXPECT_LT(max_abs_diff(st.rho(), in.rho), 1e-15);
  EXPECT_NEAR(integrate(in.rho), 1.0, 1e-8);
}

TEST(Sinkhorn, RejectsBadProblems) {
  const auto g = bridge_grid();
  const auto rho = gaussian_density(g, 0.0, 1.0);
  auto holey = rho;
  holey[g.n() / 2] = 0.0;
  EXPECT_THROW(solve_schrodinger_system({rho, holey, 1.0, 1.0, 1.0}), ZeroMarginal);
  EXPECT_THROW(solve_schrodinger_system({rho, rho, -1.0, 1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(solve_schrodinger_system({rho, rho, 1.0, 1.0, 1.0}, 1e-13), InvalidArgument);
}

TEST(Sinkhorn, ReportsNonConvergence) {
  const auto g = Grid1D::closed(-12, 12, 241);
  try {
    solve_schrodinger_system({gaussian_density(g, -1.0, 0.5), gaussian_density(g, 1.0, 1.5), 0.5, 1.0, 1.0}, 1e-12,
                             3);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_EQ(e.iterations(), 3u);
    EXPECT_GT(e.residual(), 1e-12);
  }
}

TEST(TauStep, GaussianVariancesMoveOppositeWays) {
  const auto g = Grid1D::periodic(-20, 20, 512);
  const BridgePair pair{gaussian_density(g, 0.0, 1.0), gaussian_density(g, 0.0, 1.0), 1.0, 1.0};
  const auto next = tau_step(pair, 0.01);
  EXPECT_NEAR(position_variance(next.phi_fwd), 1.01, 1e-8);
  EXPECT_NEAR(position_variance(next.phi_bwd), 0.99, 1e-8);
  EXPECT_NEAR(integrate_product(next.phi_fwd, next.phi_bwd), integrate_product(pair.phi_fwd, pair.phi_bwd), 1e-8);
  // a long anti-heat step amplifies rounding noise past the cutoff
  EXPECT_THROW(tau_step(pair, 0.1), AntiHeatUnstable);
  EXPECT_EQ(tau_step(pair, 0.0).phi_bwd.data(), pair.phi_bwd.data());
  EXPECT_THROW(tau_step(pair, -0.1), InvalidArgument);
}

TEST(TauStep, AgreesWithSolvedInterior) {
  const auto g = Grid1D::periodic(-20, 20, 512);
  const auto sol = solve_schrodinger_system(
      {gaussian_density(g, 0.0, 1.0), gaussian_density(g, 0.0, 2.0), 1.0, 1.0, 1.0});
  const auto stepped = tau_step(interior(sol, 0.3).pair, 0.01);
  const auto direct = interior(sol, 0.31).pair;
  EXPECT_LT(max_abs_diff(stepped.phi_fwd, direct.phi_fwd), 1e-6);
  EXPECT_LT(max_abs_diff(stepped.density(), direct.density()), 1e-6);
}

TEST(TauStep, RoughBackwardFunctionIsUnstable) {
  const auto g = Grid1D::periodic(-10, 10, 64);
  RealField rough(g);
  for (std::size_t i = 0; i < g.n(); ++i) rough[i] = 1.0 + ((i % 2) ? 0.5 : 0.0);
  EXPECT_THROW(tau_step(BridgePair{rough, rough, 1.0, 1.0}, 0.1), AntiHeatUnstable);
}

TEST(Collapse, SymmetricWhenTargetAtOrigin) {
  const auto g = Grid1D::closed(-10, 10, 801);
  const HydroState st(gaussian_density(g, 0.0, 1.0), RealField(g), 1.0, 1.0);
  const auto sol = collapse_bridge(st, 0.0, 0.05, 1.0);
  const auto xs = sample(g, [](double x) { return x; });
  for (double tp : {0.0, 0.3, 0.6, 1.0}) EXPECT_NEAR(integrate_product(xs, interior(sol, tp).rho), 0.0, 1e-8);
}

TEST(Collapse, FollowsCentreAndWidthProfile) {
  const auto g = Grid1D::closed(-10, 10, 2049);
  const HydroState st(gaussian_density(g, 0.0, 1.0), RealField(g), 1.0, 1.0);
  const auto sol = collapse_bridge(st, 2.0, 1e-3, 1.0);
  const auto xs = sample(g, [](double x) { return x; });
  for (int k = 0; k <= 8; ++k) {
    const double tp = k / 8.0;
    const auto rho = normalized(interior(sol, tp).rho);
    const auto oracle = collapse_profile(1.0, 1.0, 1e-3, 2.0, tp);
    EXPECT_NEAR(integrate_product(xs, rho), oracle.center, 0.02 * std::max(oracle.center, 1e-6) + 1e-10) << tp;
    EXPECT_NEAR(position_variance(rho) / oracle.width, 1.0, 0.02) << tp;
  }
}

TEST(SignProperty, WidthDoublingAgreesEverywhere) {
  const auto sol = width_doubling_bridge(Grid1D::closed(-16, 16, 401));
  std::vector<double> taus{0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
  for (const auto& s : sign_property_profile(sol, taus, 1.0 / 64)) EXPECT_EQ(s.status, SignStatus::agree) << s.tau_prime;
}
