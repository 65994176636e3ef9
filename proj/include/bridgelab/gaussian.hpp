#pragma once

// Closed-form Gaussian results: spreading packet, bridge width family and the
// solve for its parameter, the collapse profile, and exact heat / anti-heat
// and Schrödinger steps of Gaussian fields.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "bridgelab/errors.hpp"
#include "bridgelab/grid.hpp"
#include "bridgelab/state.hpp"

namespace bridgelab {

/// Variance of a free Gaussian packet whose t=0 variance is sigma.
inline double packet_width(double sigma, double t, double hbar = 1.0, double mass = 1.0) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const double r = hbar * t / (2.0 * mass * sigma);
  return sigma * (1.0 + r * r);
}

inline double spreading_factor(double sigma, double t, double hbar = 1.0, double mass = 1.0) {
  return packet_width(sigma, t, hbar, mass) / sigma;
}

struct GaussianPacket {
  double sigma = 1.0;
  double t = 0.0;
  double center = 0.0;
  double hbar = 1.0;
  double mass = 1.0;
};

/// psi(x, t) = exp(-(x - c)^2 / (4 sigma + 2 i hbar t / m)), normalized on the grid.
inline ComplexField packet_wavefunction(const GaussianPacket& p, const Grid1D& grid) {
  if (!(p.sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const Complex inv_width{4.0 * p.sigma, 2.0 * p.hbar * p.t / p.mass};
  auto psi = sample_complex(grid, [&](double x) {
    const double d = x - p.center;
    return std::exp(-d * d / inv_width);
  });
  const double norm = std::sqrt(integrate(abs2(psi)));
  for (auto& z : psi) z /= norm;
  return psi;
}

/// Normalized Gaussian density sampled on the grid and renormalized by quadrature.
inline RealField gaussian_density(const Grid1D& grid, double center, double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  return normalized(sample(grid, [&](double x) {
    const double d = x - center;
    return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
  }));
}

struct GaussianBridgeSpec {
  double sigma = 1.0;
  double tau = 1.0;
  /// Bridge-family parameter of the width law (not the gauge parameter).
  double alpha_param = 1.0;
  double x_m = 0.0;
  /// hbar/m; the width law is written for hbar/m = 1 and rescales tau' by it.
  double hbar_over_m = 1.0;
};

namespace detail {

// Width law in terms of u = 1/alpha and r = (hbar/m) tau' / sigma.
inline double width_factor(double u, double r) { return (1.0 + u * r) * (1.0 - (1.0 - u) * r); }

}  // namespace detail

/// sigma (1 + u tau'/sigma)(1 - (1 - u) tau'/sigma) with u = 1/alpha_param.
inline double bridge_width(const GaussianBridgeSpec& spec, double tau_prime) {
  if (tau_prime < 0.0 || tau_prime > spec.tau) throw InvalidArgument("tau' must lie in [0, tau]");
  const double u = 1.0 / spec.alpha_param;
  const double w = spec.sigma * detail::width_factor(u, spec.hbar_over_m * tau_prime / spec.sigma);
  if (!(w > 0.0))
    throw NonPositiveWidth("bridge width " + std::to_string(w) + " at tau' = " + std::to_string(tau_prime));
  return w;
}

/// Inverse bridge parameter u = 1/alpha for which the width law reaches the
/// packet's spreading factor a(t) at tau' = tau. With r = (hbar/m) tau/sigma
/// the condition is r^2 u^2 + (2r - r^2) u + (1 - r - a) = 0. A root is kept
/// when both linear factors stay positive on [0, tau]; ties go to the
/// smaller |u|.
inline double solve_inverse_alpha(double sigma, double t, double tau, double hbar = 1.0, double mass = 1.0) {
  if (!(sigma > 0.0) || !(tau > 0.0)) throw InvalidArgument("sigma and tau must be positive");
  const double a = spreading_factor(sigma, t, hbar, mass);
  const double r = hbar / mass * tau / sigma;
  const double root = std::sqrt(r * r + 4.0 * a);
  // Stable pair: the product of the roots is (1 - r - a)/r^2.
  const double b = r - 2.0;
  const double q = 0.5 * (b + std::copysign(root, b == 0.0 ? 1.0 : b));
  const double u1 = q / r;
  const double u2 = q != 0.0 ? (1.0 - r - a) / (r * q) : (b - root) / (2.0 * r);
  auto valid = [r](double u) { return 1.0 + u * r > 0.0 && 1.0 - (1.0 - u) * r > 0.0; };
  std::optional<double> best;
  for (double u : {u1, u2})
    if (valid(u) && (!best || std::abs(u) < std::abs(*best))) best = u;
  if (!best) throw NoValidRoot("no bridge parameter keeps the width positive for sigma=" + std::to_string(sigma) +
                               ", t=" + std::to_string(t) + ", tau=" + std::to_string(tau));
  const double check = detail::width_factor(*best, r);
  if (std::abs(check - a) > 1e-10 * std::max(1.0, a))
    throw ConsistencyError("bridge parameter fails back-substitution: " + std::to_string(check) + " vs " +
                           std::to_string(a));
  return *best;
}

/// alpha_param = 1/u; infinite when the solution is u = 0.
inline double solve_alpha(double sigma, double t, double tau, double hbar = 1.0, double mass = 1.0) {
  const double u = solve_inverse_alpha(sigma, t, tau, hbar, mass);
  return u == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / u;
}

struct CollapseProfile {
  double center = 0.0;
  double width = 0.0;
};

/// Centre x_m tau'/tau and width sigma B(tau') with
/// B = [1 + (1/sigma - 1) s](1 - s), s = tau'/tau, plus the floor offset
/// sigma b_floor s so that the final width is sigma b_floor.
inline CollapseProfile collapse_profile(double sigma, double tau, double b_floor, double x_m, double tau_prime) {
  if (!(sigma > 0.0) || !(tau > 0.0)) throw InvalidArgument("sigma and tau must be positive");
  if (b_floor < 0.0) throw InvalidArgument("width floor must be nonnegative");
  if (tau_prime < 0.0 || tau_prime > tau) throw InvalidArgument("tau' must lie in [0, tau]");
  const double s = tau_prime / tau;
  const double b = (1.0 + (1.0 / sigma - 1.0) * s) * (1.0 - s);
  return {x_m * s, sigma * b + sigma * b_floor * s};
}

/// exp(log_amplitude - (x - center)^2 / (2 variance)).
struct GaussianProfile {
  double center = 0.0;
  double variance = 1.0;
  double log_amplitude = 0.0;

  double operator()(double x) const {
    const double d = x - center;
    return std::exp(log_amplitude - d * d / (2.0 * variance));
  }
};

inline RealField sample(const Grid1D& grid, const GaussianProfile& g) {
  return sample(grid, [&g](double x) { return g(x); });
}

struct GaussianPairParams {
  GaussianProfile fwd;
  GaussianProfile bwd;
};

/// Exact heat flow of the forward profile and anti-heat flow of the backward
/// one over dtau (kernel variance (hbar/m) dtau).
inline GaussianPairParams gaussian_tau_step(const GaussianPairParams& pair, double dtau, double hbar = 1.0,
                                            double mass = 1.0) {
  if (dtau < 0.0) throw InvalidArgument("dtau must be nonnegative");
  const double d = hbar / mass * dtau;
  GaussianPairParams out = pair;
  const double vb = pair.bwd.variance - d;
  if (!(vb > 0.0))
    throw VarianceCollapse("anti-heat step drives the backward variance to " + std::to_string(vb));
  out.fwd.variance = pair.fwd.variance + d;
  out.fwd.log_amplitude += 0.5 * std::log(pair.fwd.variance / out.fwd.variance);
  out.bwd.variance = vb;
  out.bwd.log_amplitude += 0.5 * std::log(pair.bwd.variance / vb);
  return out;
}

/// psi(x) = exp(-a x^2 + b x + c) with Re a > 0.
struct ComplexGaussian {
  Complex a{0.25, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};

  Complex operator()(double x) const { return std::exp(-a * x * x + b * x + c); }

  /// Fisher length squared (= variance) of |psi|^2.
  double fisher_len2() const { return 1.0 / (4.0 * a.real()); }
  double mean() const { return b.real() / (2.0 * a.real()); }
};

/// Exact free Schrödinger evolution: 1/a -> 1/a + 2 i hbar t / m with the
/// complex centre b/(2a) preserved.
inline ComplexGaussian gaussian_t_step(const ComplexGaussian& g, double t, double hbar = 1.0, double mass = 1.0) {
  const Complex inv = 1.0 / g.a + Complex{0.0, 2.0 * hbar * t / mass};
  const Complex a_new = 1.0 / inv;
  ComplexGaussian out;
  out.a = a_new;
  out.b = g.b * a_new / g.a;
  const Complex centre = g.b / (2.0 * g.a);
  out.c = g.c + 0.5 * std::log(a_new / g.a) - a_new * centre * centre + g.a * centre * centre;
  return out;
}

/// Exact bridge step: forward factor sqrt(rho) e^{-s/hbar} under heat flow,
/// backward factor sqrt(rho) e^{+s/hbar} under anti-heat flow, recombined.
inline ComplexGaussian gaussian_bridge_step(const ComplexGaussian& g, double dtau, double hbar = 1.0,
                                            double mass = 1.0) {
  const double p = g.a.real(), q = g.a.imag();
  const double br = g.b.real(), bi = g.b.imag();
  // exp(-f x^2 + bf x) and exp(-h x^2 + bh x)
  double f = p - q, bf = br - bi;
  double h = p + q, bh = br + bi;
  const double d = 2.0 * hbar / mass * dtau;
  const double f_new = 1.0 / (1.0 / f + d);
  const double h_inv = 1.0 / h - d;
  if (!(h_inv > 0.0)) throw VarianceCollapse("anti-heat step collapses the backward factor");
  const double h_new = 1.0 / h_inv;
  bf *= f_new / f;
  bh *= h_new / h;
  f = f_new;
  h = h_new;
  ComplexGaussian out;
  out.a = Complex{0.5 * (f + h), 0.5 * (h - f)};
  out.b = Complex{0.5 * (bf + bh), 0.5 * (bh - bf)};
  out.c = g.c;
  return out;
}

/// Mixed difference [Delta^2(t-step, then tau-step) - Delta^2(tau-step, then t-step)] / (dt dtau)
/// evaluated on closed-form Gaussians.
inline double gaussian_curvature_estimate(const ComplexGaussian& g, double dt, double dtau, double hbar = 1.0,
                                          double mass = 1.0) {
  const auto t_then_tau = gaussian_bridge_step(gaussian_t_step(g, dt, hbar, mass), dtau, hbar, mass);
  const auto tau_then_t = gaussian_t_step(gaussian_bridge_step(g, dtau, hbar, mass), dt, hbar, mass);
  return (t_then_tau.fisher_len2() - tau_then_t.fisher_len2()) / (dt * dtau);
}

/// Real Gaussian with variance v, mean x0 and action s = p0 x.
inline ComplexGaussian gaussian_state(double variance, double x0 = 0.0, double p0 = 0.0, double hbar = 1.0) {
  ComplexGaussian g;
  g.a = Complex{1.0 / (4.0 * variance), 0.0};
  g.b = Complex{x0 / (2.0 * variance), p0 / hbar};
  return g;
}

}  // namespace bridgelab
