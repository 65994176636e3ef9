#pragma once

// Schrödinger bridge between two densities: Gaussian heat kernel, the
// alternating (Sinkhorn / Fortet) solution of the boundary system, interior
// propagation, forward/backward tau steps and the collapse construction.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bridgelab/errors.hpp"
#include "bridgelab/functionals.hpp"
#include "bridgelab/grid.hpp"
#include "bridgelab/state.hpp"

namespace bridgelab {

/// Dense discretization of f -> integral h(x - y) f(y) dy with a Gaussian
/// h of the given variance. Resolved kernels use trapezoid weights (with
/// periodic images on periodic grids); kernels narrower than 1.5 dx on a
/// closed grid fall back to a moment-matched three-point diffusion stencil.
class HeatKernel {
 public:
  HeatKernel(const Grid1D& grid, double variance) : grid_(grid), n_(grid.n()), matrix_(n_ * n_, 0.0) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) throw InvalidArgument("kernel variance must be nonnegative");
    const double dx = grid.dx();
    const double sd = std::sqrt(variance);
    if (variance == 0.0) {
      for (std::size_t i = 0; i < n_; ++i) matrix_[i * n_ + i] = 1.0;
      return;
    }
    if (grid.periodic()) {
      const double L = grid.length();
      const double norm = dx / std::sqrt(2.0 * std::numbers::pi * variance);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          double sum = 0.0;
          for (int img = -2; img <= 2; ++img) {
            const double d = grid.x(i) - grid.x(j) + img * L;
            sum += std::exp(-d * d / (2.0 * variance));
          }
          matrix_[i * n_ + j] = norm * sum;
        }
      return;
    }
    if (sd >= 1.5 * dx) {
      const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          const double d = grid.x(i) - grid.x(j);
          const double w = (j == 0 || j + 1 == n_) ? 0.5 * dx : dx;
          matrix_[i * n_ + j] = w * norm * std::exp(-d * d / (2.0 * variance));
        }
      return;
    }
    // Narrow kernel: m explicit diffusion sweeps [w, 1 - 2w, w] with
    // w = variance / (2 m dx^2) <= 1/2. Each sweep conserves mass and adds
    // exactly variance/m, so the moments match the Gaussian.
    const auto sweeps = static_cast<std::size_t>(std::ceil(variance / (dx * dx)));
    const double w = variance / (2.0 * static_cast<double>(sweeps) * dx * dx);
    for (std::size_t i = 0; i < n_; ++i) matrix_[i * n_ + i] = 1.0;
    std::vector<double> col(n_);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < n_; ++i) col[i] = matrix_[i * n_ + j];
        for (std::size_t i = 0; i < n_; ++i) {
          const double left = i > 0 ? col[i - 1] : 0.0;
          const double right = i + 1 < n_ ? col[i + 1] : 0.0;
          matrix_[i * n_ + j] = (1.0 - 2.0 * w) * col[i] + w * (left + right);
        }
      }
  }

  const Grid1D& grid() const noexcept { return grid_; }

  RealField apply(const RealField& f) const {
    if (!(f.grid() == grid_)) throw InvalidArgument("field and kernel live on different grids");
    RealField out(grid_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = &matrix_[i * n_];
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) sum += row[j] * f[j];
      out[i] = sum;
    }
    return out;
  }

 private:
  Grid1D grid_;
  std::size_t n_;
  std::vector<double> matrix_;
};

/// Heat flow over dtau: Gaussian convolution of variance (hbar/m) dtau.
inline RealField heat_kernel_apply(const RealField& f, double dtau, double hbar, double mass) {
  if (!(dtau > 0.0)) throw InvalidArgument("dtau must be positive");
  const double variance = hbar / mass * dtau;
  const auto& grid = f.grid();
  if (grid.periodic()) {
    const double c = 0.5 * variance;
    auto data = detail::fourier_multiply(grid, detail::to_complex(f),
                                         [c](std::size_t, double k) { return Complex{std::exp(-c * k * k), 0.0}; });
    return detail::real_part(grid, data);
  }
  return HeatKernel(grid, variance).apply(f);
}

struct BridgeProblem {
  RealField rho0;
  RealField rho1;
  double tau = 1.0;
  double hbar = 1.0;
  double mass = 1.0;

  const Grid1D& grid() const noexcept { return rho0.grid(); }

  void validate() const {
    if (!(rho0.grid() == rho1.grid())) throw InvalidArgument("marginals live on different grids");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive");
    if (!(hbar > 0.0) || !(mass > 0.0)) throw InvalidArgument("hbar and mass must be positive");
    for (const RealField* r : {&rho0, &rho1}) {
      for (double v : *r)
        if (!(v > 0.0) || !std::isfinite(v)) throw ZeroMarginal("bridge marginal is not strictly positive on the grid");
      const double norm = integrate(*r);
      if (std::abs(norm - 1.0) > 1e-8)
        throw InvalidArgument("bridge marginal integrates to " + std::to_string(norm));
    }
  }
};

struct BridgeSolution {
  RealField phi0;
  RealField phiT;
  std::size_t iterations = 0;
  double marginal_residual = 0.0;
  std::vector<double> residual_history;
  double tau = 1.0;
  double hbar = 1.0;
  double mass = 1.0;

  const Grid1D& grid() const noexcept { return phi0.grid(); }
};

inline constexpr double kDefaultBridgeTol = 1e-10;
inline constexpr std::size_t kDefaultBridgeMaxIter = 10000;

namespace detail {

inline double l1_defect(const RealField& a, const RealField& b) {
  return integrate(zip_with(a, b, [](double x, double y) { return std::abs(x - y); }));
}

inline RealField divide(const RealField& num, const RealField& den) {
  return zip_with(num, den, [](double a, double b) {
    if (!(b > 0.0)) throw ZeroMarginal("kernel image underflowed to zero");
    return a / b;
  });
}

}  // namespace detail

/// Alternating solution of phi0 K(phiT) = rho0, phiT K(phi0) = rho1 starting
/// from phiT = 1. The residual is the L1 defect of the marginal not matched
/// by the latest update; the result is gauge fixed to equal integrals.
inline BridgeSolution solve_schrodinger_system(const BridgeProblem& problem, double tol = kDefaultBridgeTol,
                                               std::size_t max_iter = kDefaultBridgeMaxIter) {
  problem.validate();
  if (!(tol >= 1e-12)) throw InvalidArgument("tolerance must be at least 1e-12");
  if (max_iter == 0) throw InvalidArgument("max_iter must be positive");
  const auto& grid = problem.grid();
  const HeatKernel kernel(grid, problem.hbar / problem.mass * problem.tau);

  BridgeSolution sol{RealField(grid), RealField(grid), 0, 0.0, {}, problem.tau, problem.hbar, problem.mass};
  RealField phiT = sample(grid, [](double) { return 1.0; });
  RealField phi0(grid);
  double residual = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    phi0 = detail::divide(problem.rho0, kernel.apply(phiT));
    const auto image = kernel.apply(phi0);
    const auto rho1_now = zip_with(phiT, image, [](double a, double b) { return a * b; });
    residual = detail::l1_defect(rho1_now, problem.rho1);
    sol.residual_history.push_back(residual);
    sol.iterations = it;
    if (!std::isfinite(residual)) throw NonConvergence(it, residual);
    if (residual <= tol) break;
    phiT = detail::divide(problem.rho1, image);
  }
  if (residual > tol) throw NonConvergence(sol.iterations, residual);

  const double c = std::sqrt(integrate(phiT) / integrate(phi0));
  for (auto& v : phi0) v *= c;
  for (auto& v : phiT) v /= c;
  sol.phi0 = std::move(phi0);
  sol.phiT = std::move(phiT);
  sol.marginal_residual = residual;
  return sol;
}

struct BridgeInterior {
  BridgePair pair;
  RealField rho;
};

/// Forward function propagated over tau', backward over tau - tau', and
/// their product.
inline BridgeInterior interior(const BridgeSolution& sol, double tau_prime) {
  if (tau_prime < 0.0 || tau_prime > sol.tau) throw InvalidArgument("tau' must lie in [0, tau]");
  const double d = sol.hbar / sol.mass;
  const auto fwd = tau_prime == 0.0 ? sol.phi0 : HeatKernel(sol.grid(), d * tau_prime).apply(sol.phi0);
  const double rest = sol.tau - tau_prime;
  const auto bwd = rest == 0.0 ? sol.phiT : HeatKernel(sol.grid(), d * rest).apply(sol.phiT);
  BridgePair pair{fwd, bwd, sol.hbar, sol.mass};
  auto rho = pair.density();
  return {std::move(pair), std::move(rho)};
}

/// Heat flow of the forward function and spectrally cut-off anti-heat flow of
/// the backward one (periodic grids only).
inline BridgePair tau_step(const BridgePair& pair, double dtau) {
  const auto& grid = pair.grid();
  grid.require_periodic("tau_step");
  if (dtau < 0.0) throw InvalidArgument("dtau must be nonnegative");
  if (dtau == 0.0) return pair;
  const double c = 0.5 * pair.hbar / pair.mass * dtau;
  const double k_cut = (2.0 / 3.0) * grid.k_max();

  auto fwd = detail::fourier_multiply(grid, detail::to_complex(pair.phi_fwd),
                                      [c](std::size_t, double k) { return Complex{std::exp(-c * k * k), 0.0}; });

  std::vector<Complex> spec(pair.phi_bwd.begin(), pair.phi_bwd.end());
  detail::fft_inplace(spec, FFTW_FORWARD);
  const auto k = grid.wavenumbers();
  double kept = 0.0, dropped = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    spec[j] *= std::exp(c * k[j] * k[j]);
    if (std::abs(k[j]) > k_cut) {
      dropped += std::norm(spec[j]);
      spec[j] = 0.0;
    } else {
      kept += std::norm(spec[j]);
    }
  }
  const double fraction = std::sqrt(dropped / (kept + dropped));
  if (!(fraction <= 1e-12))
    throw AntiHeatUnstable("anti-heat step leaves a fraction " + std::to_string(fraction) +
                           " of the backward function above the spectral cutoff");
  detail::fft_inplace(spec, FFTW_BACKWARD);
  const double inv_n = 1.0 / static_cast<double>(grid.n());
  for (auto& z : spec) z *= inv_n;
  return BridgePair{detail::real_part(grid, fwd), detail::real_part(grid, spec), pair.hbar, pair.mass};
}

/// Relative floor added to the measured density so the bridge marginal stays
/// strictly positive on grids wider than its numerical support.
inline constexpr double kCollapseDensityFloor = 1e-250;

/// Bridge from the density of state0 to a narrow Gaussian at x_m with
/// variance width_floor times the initial position variance.
inline BridgeSolution collapse_bridge(const HydroState& state0, double x_m, double width_floor, double tau,
                                      double tol = kDefaultBridgeTol, std::size_t max_iter = kDefaultBridgeMaxIter) {
  if (!(width_floor > 0.0)) throw InvalidArgument("width floor must be positive");
  const double sigma = position_variance(state0);
  const double v = sigma * width_floor;
  const auto& grid = state0.grid();
  RealField target = sample(grid, [&](double x) {
    const double d = x - x_m;
    return std::exp(-d * d / (2.0 * v));
  });
  const double peak = max_value(target);
  for (auto& t : target) t = std::max(t, kCollapseDensityFloor * peak);
  BridgeProblem problem{state0.rho(), normalized(std::move(target)), tau, state0.hbar(), state0.mass()};
  return solve_schrodinger_system(problem, tol, max_iter);
}

enum class SignStatus { agree, violated, inconclusive };

inline const char* to_string(SignStatus s) {
  switch (s) {
    case SignStatus::agree: return "agree";
    case SignStatus::violated: return "violated";
    default: return "inconclusive";
  }
}

struct SignSample {
  double tau_prime = 0.0;
  double d_fisher = 0.0;   // d Delta_x^2 / d tau'
  double d_sigma_p = 0.0;  // d sigma_p^2 / d tau'
  SignStatus status = SignStatus::inconclusive;
};

inline constexpr double kSignThreshold = 1e-8;

/// Central differences of the Fisher length and momentum uncertainty along
/// the bridge interior at each requested tau' (step h, clipped to the interval).
inline std::vector<SignSample> sign_property_profile(const BridgeSolution& sol, const std::vector<double>& samples,
                                                     double h) {
  if (!(h > 0.0)) throw InvalidArgument("difference step must be positive");
  auto measure = [&](double tp) {
    const auto st = from_bridge_pair(interior(sol, tp).pair);
    const auto r = energies(st);
    return std::pair{r.fisher_len2, r.sigma2_p};
  };
  std::vector<SignSample> out;
  for (double tp : samples) {
    if (tp - h < 0.0 || tp + h > sol.tau) throw InvalidArgument("sign sample too close to the interval ends");
    const auto [f_lo, p_lo] = measure(tp - h);
    const auto [f_hi, p_hi] = measure(tp + h);
    SignSample s;
    s.tau_prime = tp;
    s.d_fisher = (f_hi - f_lo) / (2.0 * h);
    s.d_sigma_p = (p_hi - p_lo) / (2.0 * h);
    if (std::abs(s.d_fisher) <= kSignThreshold || std::abs(s.d_sigma_p) <= kSignThreshold)
      s.status = SignStatus::inconclusive;
    else
      s.status = s.d_fisher * s.d_sigma_p < 0.0 ? SignStatus::agree : SignStatus::violated;
    out.push_back(s);
  }
  return out;
}

}  // namespace bridgelab
