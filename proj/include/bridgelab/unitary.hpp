#pragma once

// Free-particle Schrödinger evolution by exact spectral exponentiation, and
// the Madelung (Hamilton-Jacobi + continuity) residuals of a step.

#include <cmath>
#include <string>
#include <vector>

#include "bridgelab/errors.hpp"
#include "bridgelab/functionals.hpp"
#include "bridgelab/grid.hpp"
#include "bridgelab/state.hpp"

namespace bridgelab {

inline double norm2(const ComplexField& psi) { return integrate(abs2(psi)); }

namespace detail {

inline void require_normalized(const ComplexField& psi) {
  const double n = norm2(psi);
  if (std::abs(n - 1.0) > 1e-6) throw InvalidArgument("wavefunction norm " + std::to_string(n) + " is not 1");
}

// Multiplies each Fourier mode by exp(sign * i hbar k^2 dt / 2m).
inline ComplexField free_phase_step(const ComplexField& psi, double dt, double hbar, double mass, double sign) {
  const auto& grid = psi.grid();
  grid.require_periodic("free propagation");
  if (!(hbar > 0.0) || !(mass > 0.0)) throw InvalidArgument("hbar and mass must be positive");
  require_normalized(psi);
  if (dt == 0.0) return psi;
  const double c = sign * hbar * dt / (2.0 * mass);
  auto data = fourier_multiply(grid, {psi.begin(), psi.end()},
                               [c](std::size_t, double k) { return std::polar(1.0, c * k * k); });
  return ComplexField(grid, std::move(data));
}

}  // namespace detail

/// psi(t + dt) for the free Hamiltonian (periodic grids only).
inline ComplexField step_schrodinger(const ComplexField& psi, double dt, double hbar, double mass) {
  return detail::free_phase_step(psi, dt, hbar, mass, -1.0);
}

/// Evolves the conjugate wavefunction, which obeys the sign-flipped equation.
inline ComplexField conjugate_step(const ComplexField& psi_star, double dt, double hbar, double mass) {
  return detail::free_phase_step(psi_star, dt, hbar, mass, +1.0);
}

struct UnitaryRun {
  ComplexField psi0;
  double dt = 0.0;
  std::size_t n_steps = 1;
  double hbar = 1.0;
  double mass = 1.0;
};

/// Folds step_schrodinger over the run; `observe(step, psi)` sees every state
/// including the initial one.
template <class Observer>
ComplexField run(const UnitaryRun& r, Observer&& observe) {
  if (r.n_steps == 0) throw InvalidArgument("a run needs at least one step");
  ComplexField psi = r.psi0;
  observe(std::size_t{0}, psi);
  for (std::size_t i = 1; i <= r.n_steps; ++i) {
    psi = step_schrodinger(psi, r.dt, r.hbar, r.mass);
    observe(i, psi);
  }
  return psi;
}

inline ComplexField run(const UnitaryRun& r) {
  return run(r, [](std::size_t, const ComplexField&) {});
}

/// (hbar^2/2m) integral |psi'|^2 with a spectral derivative.
inline double kinetic_energy(const ComplexField& psi, double hbar, double mass) {
  const auto d = spectral_gradient(psi);
  return hbar * hbar / (2.0 * mass) * integrate(abs2(d));
}

struct MadelungResidual {
  double hj = 0.0;
  double continuity = 0.0;
  /// Largest magnitude of the quantum (Bohm) term in the Hamilton-Jacobi equation.
  double quantum_term_max = 0.0;
};

namespace detail {

struct MadelungRhs {
  RealField hj;        // -|s'|^2/2m + (hbar^2/2m) sqrt(rho)''/sqrt(rho)
  RealField quantum;   // the second term above
  RealField flux_div;  // (rho s'/m)'
};

inline MadelungRhs madelung_rhs(const HydroState& st, const std::vector<bool>& mask) {
  const auto& grid = st.grid();
  const double m = st.mass();
  const double hbar = st.hbar();
  const auto p = momentum_field(st);
  const auto root = map(st.rho(), [](double r) { return std::sqrt(r); });
  const auto root_dd = second_derivative(root);
  RealField quantum(grid), hj(grid);
  for (std::size_t i = 0; i < grid.n(); ++i) {
    quantum[i] = mask[i] ? hbar * hbar / (2.0 * m) * root_dd[i] / root[i] : 0.0;
    hj[i] = -p[i] * p[i] / (2.0 * m) + quantum[i];
  }
  const auto flux = zip_with(st.rho(), p, [m](double r, double v) { return r * v / m; });
  return {std::move(hj), std::move(quantum), gradient(flux)};
}

}  // namespace detail

/// Max-norm residuals of the modified Hamilton-Jacobi and continuity
/// equations between two states dt apart, with centered time differences.
/// The Hamilton-Jacobi residual is taken modulo a spatial constant (the
/// phase reference of s is arbitrary at each time).
inline MadelungResidual madelung_residual(const HydroState& s0, const HydroState& s1, double dt,
                                          double relative_threshold = kDensityThreshold) {
  if (!(s0.grid() == s1.grid())) throw InvalidArgument("states live on different grids");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const auto m0 = density_mask(s0.rho(), relative_threshold);
  const auto m1 = density_mask(s1.rho(), relative_threshold);
  std::vector<bool> mask(m0.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = m0[i] && m1[i];
  const auto r0 = detail::madelung_rhs(s0, mask);
  const auto r1 = detail::madelung_rhs(s1, mask);

  const std::size_t n = s0.grid().n();
  std::vector<double> hj(n, 0.0);
  double weight = 0.0, mean = 0.0;
  MadelungResidual out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    hj[i] = (s1.s()[i] - s0.s()[i]) / dt - 0.5 * (r0.hj[i] + r1.hj[i]);
    const double w = 0.5 * (s0.rho()[i] + s1.rho()[i]);
    weight += w;
    mean += w * hj[i];
    const double cont = (s1.rho()[i] - s0.rho()[i]) / dt + 0.5 * (r0.flux_div[i] + r1.flux_div[i]);
    out.continuity = std::max(out.continuity, std::abs(cont));
    out.quantum_term_max = std::max(out.quantum_term_max, std::abs(0.5 * (r0.quantum[i] + r1.quantum[i])));
  }
  mean /= weight;
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) out.hj = std::max(out.hj, std::abs(hj[i] - mean));
  return out;
}

}  // namespace bridgelab
