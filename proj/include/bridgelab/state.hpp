#pragma once

// Hydrodynamic state (rho, s) and its wavefunction / forward-backward pair
// representations, plus the scaling gauge action on the action field.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "bridgelab/errors.hpp"
#include "bridgelab/grid.hpp"

namespace bridgelab {

/// Relative density below which phase and log operations are skipped.
inline constexpr double kDensityThreshold = 1e-13;
/// Largest |s|/hbar accepted by the real-exponential pair representation.
inline constexpr double kMaxActionRatio = 300.0;
/// Unwrapping continues down to this relative density so the phase has no
/// kink where it could still be seen by spectral operators.
inline constexpr double kPhaseTrackingFloor = 1e-30;

inline double max_value(const RealField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, v);
  return m;
}

inline std::vector<bool> density_mask(const RealField& rho, double relative = kDensityThreshold) {
  const double cut = relative * max_value(rho);
  std::vector<bool> mask(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) mask[i] = rho[i] >= cut && rho[i] > 0.0;
  return mask;
}

inline std::size_t argmax(const RealField& f) {
  return static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
}

class HydroState {
 public:
  HydroState(RealField rho, RealField s, double hbar, double mass)
      : rho_(std::move(rho)), s_(std::move(s)), hbar_(hbar), mass_(mass) {
    if (!(rho_.grid() == s_.grid())) throw InvalidArgument("rho and s live on different grids");
    if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) throw InvalidArgument("hbar must be positive");
    if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw InvalidArgument("mass must be positive");
    for (double r : rho_)
      if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("density must be finite and nonnegative");
    const double norm = integrate(rho_);
    if (std::abs(norm - 1.0) > 1e-8)
      throw InvalidArgument("density integrates to " + std::to_string(norm) + ", expected 1");
    const auto mask = density_mask(rho_);
    for (std::size_t i = 0; i < s_.size(); ++i)
      if (mask[i] && !std::isfinite(s_[i])) throw InvalidArgument("action is not finite where density is resolved");
  }

  const Grid1D& grid() const noexcept { return rho_.grid(); }
  const RealField& rho() const noexcept { return rho_; }
  const RealField& s() const noexcept { return s_; }
  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }

  /// Points where the density is above threshold and the action is meaningful.
  std::vector<bool> phase_defined() const { return density_mask(rho_); }

  HydroState with_action(RealField s) const { return HydroState(rho_, std::move(s), hbar_, mass_); }
  HydroState with_constants(double hbar, double mass) const { return HydroState(rho_, s_, hbar, mass); }

 private:
  RealField rho_;
  RealField s_;
  double hbar_;
  double mass_;
};

/// Normalizes a nonnegative profile on its grid.
inline RealField normalized(RealField f) {
  const double norm = integrate(f);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("cannot normalize a profile with zero mass");
  for (auto& v : f) v /= norm;
  return f;
}

struct NlgtParam {
  double alpha_r = 0.0;
  int k = 0;
};

struct BridgePair {
  RealField phi_fwd;
  RealField phi_bwd;
  double hbar = 1.0;
  double mass = 1.0;

  const Grid1D& grid() const noexcept { return phi_fwd.grid(); }

  RealField density() const {
    return zip_with(phi_fwd, phi_bwd, [](double a, double b) { return a * b; });
  }

  BridgePair swapped() const { return BridgePair{phi_bwd, phi_fwd, hbar, mass}; }
};

inline ComplexField to_wavefunction(const HydroState& state) {
  ComplexField psi(state.grid());
  const double h = state.hbar();
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = std::polar(std::sqrt(state.rho()[i]), state.s()[i] / h);
  return psi;
}

namespace detail {

// Outward sweep from the anchor. `step(i, from, s_from)` gives s[i] from the
// last tracked point; points failing `tracked` inherit the last tracked value.
template <class Tracked, class Step>
RealField sweep_from_anchor(const Grid1D& grid, std::size_t anchor, double s_anchor, Tracked&& tracked,
                            Step&& step) {
  RealField s(grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.n());
  s[anchor] = s_anchor;
  for (int dir : {+1, -1}) {
    std::size_t last = anchor;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(anchor) + dir; i >= 0 && i < n; i += dir) {
      const auto u = static_cast<std::size_t>(i);
      if (tracked(u)) {
        s[u] = step(u, last, s[last]);
        last = u;
      } else {
        s[u] = s[last];
      }
    }
  }
  return s;
}

}  // namespace detail

/// Madelung decomposition. The density is renormalized on the grid, and the
/// action is unwrapped outward from the peak of |psi| where it is set to zero.
inline HydroState from_wavefunction(const ComplexField& psi, double hbar, double mass) {
  RealField rho = abs2(psi);
  const double norm = integrate(rho);
  if (std::abs(norm - 1.0) > 1e-6)
    throw InvalidArgument("wavefunction norm " + std::to_string(norm) + " differs from 1 by more than 1e-6");
  for (auto& r : rho) r /= norm;
  const std::size_t anchor = argmax(rho);
  const double floor = kPhaseTrackingFloor * rho[anchor];
  RealField s = detail::sweep_from_anchor(
      psi.grid(), anchor, 0.0, [&](std::size_t i) { return rho[i] >= floor && rho[i] > 0.0; },
      [&](std::size_t i, std::size_t from, double s_from) {
        return s_from + hbar * std::arg(psi[i] * std::conj(psi[from]));
      });
  return HydroState(std::move(rho), std::move(s), hbar, mass);
}

/// phi_fwd = sqrt(rho) e^{-s/hbar}, phi_bwd = sqrt(rho) e^{+s/hbar}.
inline BridgePair to_bridge_pair(const HydroState& state) {
  const auto mask = state.phase_defined();
  const double h = state.hbar();
  RealField fwd(state.grid()), bwd(state.grid());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    double ratio = state.s()[i] / h;
    if (mask[i]) {
      if (std::abs(ratio) > kMaxActionRatio)
        throw ScalingError("|s|/hbar = " + std::to_string(std::abs(ratio)) + " exceeds " +
                           std::to_string(kMaxActionRatio) + " at x = " + std::to_string(state.grid().x(i)));
    } else {
      ratio = std::clamp(ratio, -kMaxActionRatio, kMaxActionRatio);
    }
    const double amp = std::sqrt(state.rho()[i]);
    fwd[i] = amp * std::exp(-ratio);
    bwd[i] = amp * std::exp(ratio);
  }
  return BridgePair{std::move(fwd), std::move(bwd), h, state.mass()};
}

/// rho = phi_fwd phi_bwd, s = (hbar/2) ln(phi_bwd/phi_fwd). Where either
/// function is not positive or the density is below threshold the action
/// holds the value of the nearest resolved point.
inline HydroState from_bridge_pair(const BridgePair& pair) {
  RealField rho = pair.density();
  for (auto& r : rho) r = std::max(r, 0.0);
  const auto mask = density_mask(rho);
  const std::size_t anchor = argmax(rho);
  auto defined = [&](std::size_t i) { return mask[i] && pair.phi_fwd[i] > 0.0 && pair.phi_bwd[i] > 0.0; };
  if (!defined(anchor)) throw InvalidArgument("bridge pair has no positive overlap");
  auto action = [&](std::size_t i) { return 0.5 * pair.hbar * std::log(pair.phi_bwd[i] / pair.phi_fwd[i]); };
  RealField s = detail::sweep_from_anchor(pair.grid(), anchor, action(anchor), defined,
                                          [&](std::size_t i, std::size_t, double) { return action(i); });
  return HydroState(std::move(rho), std::move(s), pair.hbar, pair.mass);
}

/// Scaling gauge action s -> e^{-alpha_r} s (real parameter only).
inline HydroState apply_nlgt(const HydroState& state, NlgtParam p) {
  if (p.k != 0) throw InvalidArgument("apply_nlgt takes a real parameter; use apply_discrete_nlgt for k != 0");
  if (!std::isfinite(p.alpha_r)) throw InvalidArgument("alpha must be finite");
  const double scale = std::exp(-p.alpha_r);
  return state.with_action(map(state.s(), [scale](double v) { return scale * v; }));
}

inline HydroState apply_nlgt(const HydroState& state, double alpha_r) { return apply_nlgt(state, NlgtParam{alpha_r, 0}); }

using DiscreteImage = std::variant<ComplexField, BridgePair>;

/// Imaginary parameter k*pi/2: k=0 wavefunction, k=2 its conjugate,
/// k=-1 the forward/backward pair, k=+1 the same pair with roles exchanged.
inline DiscreteImage apply_discrete_nlgt(const HydroState& state, int k) {
  switch (k) {
    case 0:
      return to_wavefunction(state);
    case 2: {
      auto psi = to_wavefunction(state);
      for (auto& z : psi) z = std::conj(z);
      return psi;
    }
    case -1:
      return to_bridge_pair(state);
    case 1:
      return to_bridge_pair(state).swapped();
    default:
      throw InvalidArgument("discrete gauge index must be one of -1, 0, 1, 2; got " + std::to_string(k));
  }
}

/// Composition of two discrete actions: the phase factors e^{-i k pi/2}
/// multiply, so indices add modulo 4 (reported in {-1, 0, 1, 2}).
inline int compose_discrete(int k1, int k2) {
  int k = ((k1 + k2) % 4 + 4) % 4;
  return k == 3 ? -1 : k;
}

/// psi(alpha) = sqrt(rho) exp(i e^{-alpha} s / hbar).
inline ComplexField nlgt_wavefunction(const HydroState& state, double alpha_r) {
  return to_wavefunction(apply_nlgt(state, alpha_r));
}

/// psi(alpha) = psi^{(1+e^{-alpha})/2} (psi*)^{(1-e^{-alpha})/2}, with the
/// complex powers taken through log psi = ln(rho)/2 + i s/hbar.
inline ComplexField nlgt_wavefunction_power(const HydroState& state, double alpha_r) {
  const double e = std::exp(-alpha_r);
  const Complex p{0.5 * (1.0 + e), 0.0};
  const Complex q{0.5 * (1.0 - e), 0.0};
  ComplexField out(state.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = state.rho()[i];
    if (r <= 0.0) continue;
    const Complex log_psi{0.5 * std::log(r), state.s()[i] / state.hbar()};
    out[i] = std::exp(p * log_psi + q * std::conj(log_psi));
  }
  return out;
}

/// Multiplies psi by a constant phase and re-derives the state (gauge constant in s).
inline HydroState gauge_wavefunction(const HydroState& state, Complex factor) {
  auto psi = to_wavefunction(state);
  for (auto& z : psi) z *= factor;
  return from_wavefunction(psi, state.hbar(), state.mass());
}

}  // namespace bridgelab
