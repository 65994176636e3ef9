#pragma once

// Moments, Fisher length, uncertainties and the two energy functionals of a
// hydrodynamic state, with the gauge-rotated versions and their cross-checks.

#include <cmath>
#include <string>

#include "bridgelab/errors.hpp"
#include "bridgelab/grid.hpp"
#include "bridgelab/state.hpp"

namespace bridgelab {

struct FunctionalReport {
  // Rest-frame (mean-subtracted) uncertainties.
  double d2_x = 0.0;
  double d2_p = 0.0;
  double fisher_len2 = 0.0;
  double sigma2_x = 0.0;
  double sigma2_p = 0.0;
  // Raw second moments about the coordinate origin and zero momentum.
  double d2_x_raw = 0.0;
  double d2_p_raw = 0.0;
  double sigma2_p_raw = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  // Energies (raw gradients, no mean subtraction).
  double h_cl = 0.0;
  double t_kin = 0.0;
  double q_bohm = 0.0;
  double h_quantum = 0.0;
  double k_like = 0.0;
};

namespace detail {

// Largest action increment between neighbouring resolved points, in units of hbar.
inline double max_phase_step(const HydroState& state) {
  const auto mask = state.phase_defined();
  const std::size_t n = state.grid().n();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (j == 0 && !state.grid().periodic()) break;
    if (mask[i] && mask[j]) worst = std::max(worst, std::abs(state.s()[j] - state.s()[i]) / state.hbar());
  }
  return worst;
}

// Spectral derivative of a field whose periodic extension jumps: a linear
// ramp through the end values is removed first and its slope added back.
inline RealField ramp_corrected_gradient(const RealField& f) {
  const auto& grid = f.grid();
  const std::size_t n = grid.n();
  const double slope = (f[n - 1] - f[0]) / (grid.x(n - 1) - grid.x(0));
  RealField g(grid);
  for (std::size_t i = 0; i < n; ++i) g[i] = f[i] - slope * (grid.x(i) - grid.x(0));
  RealField d = gradient(g);
  for (auto& v : d) v += slope;
  return d;
}

}  // namespace detail

/// Momentum field p = grad s. On periodic grids a well-sampled phase is
/// differentiated through psi (hbar Im(psi* psi')/|psi|^2), which is smooth
/// even where s was held constant in the tails; otherwise s is
/// differentiated directly.
inline RealField momentum_field(const HydroState& state) {
  const auto& grid = state.grid();
  if (!grid.periodic()) return gradient(state.s());
  if (detail::max_phase_step(state) < 1.0) {
    const auto psi = to_wavefunction(state);
    const auto dpsi = spectral_gradient(psi);
    RealField p(grid);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double r = std::norm(psi[i]);
      p[i] = r > 0.0 ? state.hbar() * std::imag(std::conj(psi[i]) * dpsi[i]) / r : 0.0;
    }
    return p;
  }
  return detail::ramp_corrected_gradient(state.s());
}

inline double mean_position(const HydroState& state) {
  return integrate_product(sample(state.grid(), [](double x) { return x; }), state.rho());
}

/// Rest-frame position variance: integral of (x - <x>)^2 rho.
inline double position_variance(const HydroState& state) {
  const double mean = mean_position(state);
  return integrate_product(sample(state.grid(), [mean](double x) { return (x - mean) * (x - mean); }), state.rho());
}

inline double position_variance(const RealField& rho) {
  const double mass = integrate(rho);
  const double mean = integrate_product(sample(rho.grid(), [](double x) { return x; }), rho) / mass;
  return integrate_product(sample(rho.grid(), [mean](double x) { return (x - mean) * (x - mean); }), rho) / mass;
}

/// Rest-frame momentum variance: integral of (grad s - <grad s>)^2 rho.
inline double momentum_variance(const HydroState& state) {
  const auto p = momentum_field(state);
  const double mean = integrate_product(p, state.rho());
  return integrate_product(map(p, [mean](double v) { return (v - mean) * (v - mean); }), state.rho());
}

/// Integral of |grad sqrt(rho)|^2.
inline double root_density_gradient_norm(const RealField& rho) {
  const auto g = gradient(map(rho, [](double r) { return std::sqrt(std::max(r, 0.0)); }));
  return integrate(map(g, [](double v) { return v * v; }));
}

/// Fisher length squared: 1 / (4 * integral |grad sqrt(rho)|^2).
inline double fisher_length2(const RealField& rho) {
  const double g = root_density_gradient_norm(rho);
  if (!(g > 1e-300)) throw InvalidArgument("density has no resolvable gradient; Fisher length is unbounded");
  return 1.0 / (4.0 * g);
}

inline double fisher_length2(const HydroState& state) { return fisher_length2(state.rho()); }

inline FunctionalReport energies(const HydroState& state) {
  FunctionalReport r;
  const auto& grid = state.grid();
  const auto& rho = state.rho();
  const double hbar = state.hbar();
  const double m = state.mass();

  const auto xs = sample(grid, [](double x) { return x; });
  r.mean_x = integrate_product(xs, rho);
  r.d2_x_raw = integrate_product(map(xs, [](double x) { return x * x; }), rho);
  r.d2_x = integrate_product(map(xs, [&](double x) { return (x - r.mean_x) * (x - r.mean_x); }), rho);
  r.sigma2_x = r.d2_x;

  const auto p = momentum_field(state);
  r.mean_p = integrate_product(p, rho);
  r.d2_p_raw = integrate_product(map(p, [](double v) { return v * v; }), rho);
  r.d2_p = integrate_product(map(p, [&](double v) { return (v - r.mean_p) * (v - r.mean_p); }), rho);

  const double grad_root = root_density_gradient_norm(rho);
  if (!(grad_root > 1e-300)) throw InvalidArgument("density has no resolvable gradient; Fisher length is unbounded");
  r.fisher_len2 = 1.0 / (4.0 * grad_root);
  r.sigma2_p = r.d2_p + hbar * hbar / (4.0 * r.fisher_len2);
  r.sigma2_p_raw = r.d2_p_raw + hbar * hbar / (4.0 * r.fisher_len2);

  r.t_kin = r.d2_p_raw / (2.0 * m);
  r.h_cl = r.t_kin;
  r.q_bohm = hbar * hbar * grad_root / (2.0 * m);
  r.h_quantum = r.t_kin + r.q_bohm;
  r.k_like = r.t_kin - r.q_bohm;

  const double via_sigma = r.sigma2_p_raw / (2.0 * m);
  if (std::abs(via_sigma - r.h_quantum) > 1e-10 * std::max(1.0, std::abs(r.h_quantum)))
    throw ConsistencyError("quantum energy differs between the uncertainty and integral forms");
  return r;
}

struct HeisenbergProduct {
  double sigma2_x_alpha = 0.0;
  double sigma2_p_alpha = 0.0;
  double product = 0.0;
  /// e^{-2 alpha} D_x^2 D_p^2 + (hbar^2/4) D_x^2 / Delta_x^2 from the untransformed state.
  double rhs = 0.0;
};

/// Uncertainty product after the gauge scaling, from raw moments; the value
/// computed on the transformed state is checked against the closed-form
/// dependence on alpha.
inline HeisenbergProduct heisenberg_product(const HydroState& state, double alpha_r, const FunctionalReport& base) {
  const auto moved = energies(apply_nlgt(state, alpha_r));
  HeisenbergProduct out;
  out.sigma2_x_alpha = moved.d2_x_raw;
  out.sigma2_p_alpha = moved.sigma2_p_raw;
  out.product = out.sigma2_x_alpha * out.sigma2_p_alpha;
  const double hbar = state.hbar();
  out.rhs = std::exp(-2.0 * alpha_r) * base.d2_x_raw * base.d2_p_raw +
            0.25 * hbar * hbar * base.d2_x_raw / base.fisher_len2;
  if (std::abs(out.product - out.rhs) > 1e-8 * std::max(1.0, std::abs(out.rhs)))
    throw ConsistencyError("uncertainty product " + std::to_string(out.product) +
                           " disagrees with its closed-form dependence " + std::to_string(out.rhs));
  return out;
}

inline HeisenbergProduct heisenberg_product(const HydroState& state, double alpha_r) {
  return heisenberg_product(state, alpha_r, energies(state));
}

struct RotatedEnergies {
  double h_alpha = 0.0;
  double k_alpha = 0.0;
  double h_alpha_direct = 0.0;
  double k_alpha_direct = 0.0;
};

/// (H, K) after the gauge scaling, via the hyperbolic rotation of the
/// untransformed pair and via direct integrals on the transformed state.
inline RotatedEnergies rotated_energies(const HydroState& state, double alpha_r, const FunctionalReport& base) {
  RotatedEnergies out;
  const double e = std::exp(-alpha_r);
  const double c = std::cosh(alpha_r);
  const double sh = std::sinh(alpha_r);
  out.h_alpha = e * (c * base.h_quantum - sh * base.k_like);
  out.k_alpha = e * (-sh * base.h_quantum + c * base.k_like);
  const auto moved = energies(apply_nlgt(state, alpha_r));
  out.h_alpha_direct = moved.h_quantum;
  out.k_alpha_direct = moved.k_like;
  const double scale = std::max({1.0, std::abs(out.h_alpha), std::abs(out.k_alpha)});
  if (std::abs(out.h_alpha - out.h_alpha_direct) > 1e-8 * scale ||
      std::abs(out.k_alpha - out.k_alpha_direct) > 1e-8 * scale)
    throw ConsistencyError("rotated energies disagree between the rotation and the transformed state");
  return out;
}

inline RotatedEnergies rotated_energies(const HydroState& state, double alpha_r) {
  return rotated_energies(state, alpha_r, energies(state));
}

/// -integral phi_bwd H phi_fwd with H = -(hbar^2/2m) d^2/dx^2; must equal
/// the kinetic-minus-Bohm functional.
inline double k_from_imaginary_nlgt(const HydroState& state, const FunctionalReport& base) {
  const auto pair = to_bridge_pair(state);
  const auto curvature = second_derivative(pair.phi_fwd);
  const double coeff = state.hbar() * state.hbar() / (2.0 * state.mass());
  const double k = coeff * integrate_product(pair.phi_bwd, curvature);
  if (std::abs(k - base.k_like) > 1e-6 * std::max(1.0, std::abs(base.k_like)))
    throw ConsistencyError("pair-form energy " + std::to_string(k) + " disagrees with " +
                           std::to_string(base.k_like));
  return k;
}

inline double k_from_imaginary_nlgt(const HydroState& state) { return k_from_imaginary_nlgt(state, energies(state)); }

}  // namespace bridgelab
