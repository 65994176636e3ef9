#pragma once

// The six experiments behind the command-line runner. Each returns a table;
// `check` also reports whether every hard invariant held.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bridgelab/bridge.hpp"
#include "bridgelab/functionals.hpp"
#include "bridgelab/gaussian.hpp"
#include "bridgelab/lab/config.hpp"
#include "bridgelab/lab/record.hpp"
#include "bridgelab/random_states.hpp"
#include "bridgelab/state.hpp"
#include "bridgelab/unitary.hpp"

namespace bridgelab::lab {

struct ExperimentResult {
  ExperimentRecord record;
  bool invariants_hold = true;
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v[n - 1] = b;
  return v;
}

/// L2 distance after removing the global phase between the two fields.
inline double aligned_l2_error(const ComplexField& a, const ComplexField& b) {
  const auto w = a.grid().quadrature_weights();
  Complex overlap{};
  for (std::size_t i = 0; i < a.size(); ++i) overlap += w[i] * std::conj(b[i]) * a[i];
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += w[i] * std::norm(a[i] - phase * b[i]);
  return std::sqrt(sum);
}

/// Gaussian density of the given variance with action p0 x.
inline HydroState gaussian_hydro_state(const Grid1D& grid, double variance, double p0, double hbar, double mass,
                                       double center = 0.0) {
  return HydroState(gaussian_density(grid, center, variance), sample(grid, [p0](double x) { return p0 * x; }), hbar,
                    mass);
}

inline ExperimentResult run_propagate(const ExperimentConfig& c) {
  const auto grid = c.grid.make();
  const auto& ph = c.physics;
  ExperimentRecord rec({"time", "variance_grid", "variance_oracle", "variance_error", "l2_error", "h_quantum",
                        "h_drift"});
  auto psi = packet_wavefunction({ph.sigma, 0.0, 0.0, ph.hbar, ph.mass}, grid);
  const auto times = linspace(0.0, c.schedule.t, c.schedule.n_samples);
  double now = 0.0, h0 = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double gap = times[k] - now;
    if (gap > 0.0) {
      const auto steps = static_cast<std::size_t>(std::ceil(gap / c.schedule.dt - 1e-12));
      psi = run({psi, gap / static_cast<double>(steps), steps, ph.hbar, ph.mass});
      now = times[k];
    }
    const auto st = from_wavefunction(psi, ph.hbar, ph.mass);
    const auto rep = energies(st);
    if (k == 0) h0 = rep.h_quantum;
    const double oracle = packet_width(ph.sigma, now, ph.hbar, ph.mass);
    const auto exact = packet_wavefunction({ph.sigma, now, 0.0, ph.hbar, ph.mass}, grid);
    rec.add_row({now, rep.d2_x, oracle, std::abs(rep.d2_x - oracle), aligned_l2_error(psi, exact), rep.h_quantum,
                 std::abs(rep.h_quantum - h0)});
  }
  return {std::move(rec), true};
}

inline ExperimentResult run_bridge(const ExperimentConfig& c) {
  const auto grid = c.grid.make();
  const auto& ph = c.physics;
  const double tau = c.schedule.tau;
  const double final_variance = packet_width(ph.sigma, c.schedule.t, ph.hbar, ph.mass);
  BridgeProblem problem{gaussian_density(grid, 0.0, ph.sigma), gaussian_density(grid, 0.0, final_variance), tau,
                        ph.hbar, ph.mass};
  const auto sol = solve_schrodinger_system(problem, c.bridge_tol, c.bridge_max_iter);
  const double u = solve_inverse_alpha(ph.sigma, c.schedule.t, tau, ph.hbar, ph.mass);
  const GaussianBridgeSpec spec{ph.sigma, tau, 1.0 / u, 0.0, ph.hbar / ph.mass};

  ExperimentRecord rec({"tau_prime", "variance_grid", "variance_oracle", "abs_error", "norm_defect", "alpha_param",
                        "iterations", "marginal_residual"});
  for (double tp : linspace(0.0, tau, c.schedule.n_samples)) {
    const auto in = interior(sol, tp);
    const double v = position_variance(in.rho);
    const double oracle = bridge_width(spec, tp);
    rec.add_row({tp, v, oracle, std::abs(v - oracle), std::abs(integrate(in.rho) - 1.0), spec.alpha_param,
                 static_cast<std::int64_t>(sol.iterations), sol.marginal_residual});
  }
  return {std::move(rec), true};
}

inline ExperimentResult run_collapse(const ExperimentConfig& c) {
  const auto grid = c.grid.make();
  const auto& ph = c.physics;
  const double tau = c.schedule.tau;
  const auto state0 = gaussian_hydro_state(grid, ph.sigma, 0.0, ph.hbar, ph.mass);
  const auto sol = collapse_bridge(state0, c.x_m, c.width_floor, tau, c.bridge_tol, c.bridge_max_iter);
  const auto xs = sample(grid, [](double x) { return x; });

  ExperimentRecord rec({"tau_prime", "center_grid", "center_oracle", "center_error", "width_grid", "width_oracle",
                        "width_rel_error"});
  for (double tp : linspace(0.0, tau, c.schedule.n_samples)) {
    const auto rho = normalized(interior(sol, tp).rho);
    const double center = integrate_product(xs, rho);
    const double width = position_variance(rho);
    const auto oracle = collapse_profile(ph.sigma, tau, c.width_floor, c.x_m, tp);
    rec.add_row({tp, center, oracle.center, std::abs(center - oracle.center), width, oracle.width,
                 std::abs(width / oracle.width - 1.0)});
  }
  return {std::move(rec), true};
}

struct BornResiduals {
  double psi = 0.0;
  double pair = 0.0;
  double power_form = 0.0;
};

/// Pointwise |psi(alpha)|^2 - rho, phi(alpha) phi^(alpha) - rho and the two
/// constructions of psi(alpha), over points above the density threshold.
inline BornResiduals born_residuals(const HydroState& state, double alpha) {
  const auto moved = apply_nlgt(state, alpha);
  const auto psi = to_wavefunction(moved);
  const auto pair = to_bridge_pair(moved);
  const auto power = nlgt_wavefunction_power(state, alpha);
  const auto mask = state.phase_defined();
  BornResiduals r;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const double rho = state.rho()[i];
    r.psi = std::max(r.psi, std::abs(std::norm(psi[i]) - rho));
    r.pair = std::max(r.pair, std::abs(pair.phi_fwd[i] * pair.phi_bwd[i] - rho));
    r.power_form = std::max(r.power_form, std::abs(psi[i] - power[i]));
  }
  return r;
}

inline ExperimentResult run_nlgt_sweep(const ExperimentConfig& c) {
  const auto grid = c.grid.make();
  const auto& ph = c.physics;
  const auto state = gaussian_hydro_state(grid, ph.sigma, c.p0, ph.hbar, ph.mass);
  const auto base = energies(state);
  ExperimentRecord rec({"alpha", "product", "rhs", "bound", "product_margin", "h_rotation", "h_direct",
                        "k_rotation", "k_direct", "path_difference", "born_psi", "born_pair", "power_form_difference"});
  for (double a : linspace(c.alpha_min, c.alpha_max, c.alpha_count)) {
    const auto hp = heisenberg_product(state, a, base);
    const auto rot = rotated_energies(state, a, base);
    const auto born = born_residuals(state, a);
    const double bound = 0.25 * ph.hbar * ph.hbar;
    const double diff = std::max(std::abs(rot.h_alpha - rot.h_alpha_direct), std::abs(rot.k_alpha - rot.k_alpha_direct));
    rec.add_row({a, hp.product, hp.rhs, bound, hp.product - bound, rot.h_alpha, rot.h_alpha_direct, rot.k_alpha,
                 rot.k_alpha_direct, diff, born.psi, born.pair, born.power_form});
  }
  return {std::move(rec), true};
}

/// Fisher length after a t-step then a tau-step (or the reverse) on the grid.
inline double grid_commuted_fisher(const HydroState& state, double dt, double dtau, bool t_first) {
  const double hbar = state.hbar(), m = state.mass();
  auto t_step = [&](const HydroState& s) {
    return from_wavefunction(step_schrodinger(to_wavefunction(s), dt, hbar, m), hbar, m);
  };
  auto tau_step_state = [&](const HydroState& s) { return from_bridge_pair(tau_step(to_bridge_pair(s), dtau)); };
  const auto out = t_first ? tau_step_state(t_step(state)) : t_step(tau_step_state(state));
  return fisher_length2(out);
}

inline double grid_curvature_estimate(const HydroState& state, double delta) {
  return (grid_commuted_fisher(state, delta, delta, true) - grid_commuted_fisher(state, delta, delta, false)) /
         (delta * delta);
}

inline ExperimentResult run_curvature(const ExperimentConfig& c) {
  const auto grid = c.grid.make();
  const auto& ph = c.physics;
  const double v = ph.sigma;
  const auto state = gaussian_hydro_state(grid, v, c.p0, ph.hbar, ph.mass);
  const auto g = gaussian_state(v, 0.0, c.p0, ph.hbar);
  const double target = 2.0 * ph.hbar * ph.hbar / (ph.mass * ph.mass * v);
  const double derived = ph.hbar * ph.hbar / (ph.mass * ph.mass * v);
  auto exact = [&](double d) { return gaussian_curvature_estimate(g, d, d, ph.hbar, ph.mass); };

  ExperimentRecord rec({"delta", "exact_estimate", "numeric_estimate", "richardson", "target", "ratio_to_target",
                        "closed_form", "numeric_vs_exact"});
  for (double d : {2.0 * c.curvature_delta, c.curvature_delta, 0.5 * c.curvature_delta}) {
    const double e = exact(d);
    const double n = grid_curvature_estimate(state, d);
    const double rich = (4.0 * exact(0.5 * d) - e) / 3.0;
    rec.add_row({d, e, n, rich, target, e / target, derived, std::abs(n / e - 1.0)});
  }
  return {std::move(rec), true};
}

// ---- check ----

inline constexpr double kHeisenbergSlack = 1e-10;

inline ExperimentResult run_check(const ExperimentConfig& c) {
  const auto grid = c.grid.make();
  const auto& ph = c.physics;
  const auto specs = random_state_specs(c.seed, c.schedule.n_samples, ph.hbar, ph.mass);
  const auto alphas = linspace(c.alpha_min, c.alpha_max, c.alpha_count);
  const auto bridge_grid = Grid1D::closed(-16.0, 16.0, 401);
  const double tau = c.schedule.tau;
  const double dt = c.schedule.dt;

  ExperimentRecord rec({"state", "invariant", "status", "value", "limit"});
  bool ok = true;
  auto emit = [&](std::size_t i, const char* name, bool pass, double value, double limit) {
    ok = ok && pass;
    rec.add_row({static_cast<std::int64_t>(i), std::string(name), std::string(pass ? "pass" : "fail"), value, limit});
  };

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto state = specs[i].sample(grid);
    const auto base = energies(state);
    const double bound = 0.25 * ph.hbar * ph.hbar;

    double worst_product = INFINITY, worst_rhs = 0.0, worst_rotation = 0.0, worst_born = 0.0;
    bool consistent = true;
    for (double a : alphas) {
      try {
        const auto hp = heisenberg_product(state, a, base);
        worst_product = std::min(worst_product, hp.product - bound);
        worst_rhs = std::max(worst_rhs, std::abs(hp.product - hp.rhs) / std::max(1.0, std::abs(hp.rhs)));
        const auto rot = rotated_energies(state, a, base);
        const double scale = std::max({1.0, std::abs(rot.h_alpha), std::abs(rot.k_alpha)});
        worst_rotation = std::max({worst_rotation, std::abs(rot.h_alpha - rot.h_alpha_direct) / scale,
                                   std::abs(rot.k_alpha - rot.k_alpha_direct) / scale});
      } catch (const ConsistencyError&) {
        consistent = false;
      }
      const auto born = born_residuals(state, a);
      worst_born = std::max({worst_born, born.psi, born.pair});
    }
    emit(i, "heisenberg_bound", worst_product >= -kHeisenbergSlack, worst_product, -kHeisenbergSlack);
    emit(i, "heisenberg_closed_form", consistent && worst_rhs <= 1e-8, worst_rhs, 1e-8);
    emit(i, "rotation_paths", consistent && worst_rotation <= 1e-8, worst_rotation, 1e-8);
    emit(i, "born_rule", worst_born <= 1e-12, worst_born, 1e-12);

    const double cr = base.d2_x - base.fisher_len2;
    emit(i, "cramer_rao", cr >= -1e-10, cr, -1e-10);
    if (specs[i].single_gaussian()) emit(i, "cramer_rao_equality", std::abs(cr) <= 1e-8, std::abs(cr), 1e-8);

    double pair_gap = INFINITY;
    try {
      pair_gap = std::abs(k_from_imaginary_nlgt(state, base) - base.k_like);
    } catch (const Error&) {
    }
    emit(i, "pair_energy", pair_gap <= 1e-6, std::isfinite(pair_gap) ? pair_gap : 1.0, 1e-6);

    const auto psi = to_wavefunction(state);
    auto sigma_p_at = [&](double t) {
      return energies(from_wavefunction(step_schrodinger(psi, t, ph.hbar, ph.mass), ph.hbar, ph.mass)).sigma2_p_raw;
    };
    const double drift = std::abs(sigma_p_at(dt) - sigma_p_at(-dt)) / (2.0 * dt);
    emit(i, "energy_conservation", drift <= 1e-10, drift, 1e-10);

    // Bridge from this state's density to the next state's density.
    const auto& next = specs[(i + 1) % specs.size()];
    const auto rho0 = specs[i].sample(bridge_grid).rho();
    const auto rho1 = next.sample(bridge_grid).rho();
    const auto sol = solve_schrodinger_system({rho0, rho1, tau, ph.hbar, ph.mass}, c.bridge_tol, c.bridge_max_iter);
    std::vector<double> taus;
    for (int k = 1; k < 8; ++k) taus.push_back(tau * k / 8.0);
    const auto profile = sign_property_profile(sol, taus, tau / 64.0);
    std::size_t violated = 0, inconclusive = 0;
    for (const auto& s : profile) {
      violated += s.status == SignStatus::violated ? 1 : 0;
      inconclusive += s.status == SignStatus::inconclusive ? 1 : 0;
    }
    emit(i, "sign_property", violated == 0, static_cast<double>(violated), 0.0);
    // Reported, never fatal.
    rec.add_row({static_cast<std::int64_t>(i), std::string("sign_property_inconclusive"),
                 std::string(inconclusive == 0 ? "pass" : "inconclusive"), static_cast<double>(inconclusive),
                 static_cast<double>(profile.size())});
  }
  return {std::move(rec), ok};
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  switch (c.experiment) {
    case Experiment::propagate: return run_propagate(c);
    case Experiment::bridge: return run_bridge(c);
    case Experiment::collapse: return run_collapse(c);
    case Experiment::nlgt_sweep: return run_nlgt_sweep(c);
    case Experiment::curvature: return run_curvature(c);
    default: return run_check(c);
  }
}

}  // namespace bridgelab::lab
