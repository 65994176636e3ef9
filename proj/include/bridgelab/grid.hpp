#pragma once

// Uniform 1-D lattices, sampled fields, quadrature, differentiation and the
// unitary discrete Fourier transform shared by every other module.

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bridgelab/errors.hpp"

namespace bridgelab {

using Complex = std::complex<double>;

enum class GridMode { closed, periodic };

inline const char* to_string(GridMode mode) {
  return mode == GridMode::closed ? "closed" : "periodic";
}

/// Uniform lattice on [x_min, x_max].
///
/// In closed mode both endpoints are grid points and dx = (x_max - x_min)/(n - 1).
/// In periodic mode x_max is identified with x_min, dx = (x_max - x_min)/n and
/// n must be a power of two no smaller than 8.
class Grid1D {
 public:
  static Grid1D closed(double x_min, double x_max, std::size_t n) {
    if (n < 2) throw InvalidArgument("closed grid needs at least 2 points");
    return Grid1D(x_min, x_max, n, GridMode::closed);
  }

  static Grid1D periodic(double x_min, double x_max, std::size_t n) {
    if (n < 8 || !std::has_single_bit(n))
      throw InvalidArgument("periodic grid needs a power-of-two n >= 8, got " + std::to_string(n));
    return Grid1D(x_min, x_max, n, GridMode::periodic);
  }

  static Grid1D make(GridMode mode, double x_min, double x_max, std::size_t n) {
    return mode == GridMode::closed ? closed(x_min, x_max, n) : periodic(x_min, x_max, n);
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t n() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  GridMode mode() const noexcept { return mode_; }
  bool periodic() const noexcept { return mode_ == GridMode::periodic; }
  double length() const noexcept { return x_max_ - x_min_; }

  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }

  std::vector<double> points() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
  }

  /// Composite Simpson weights (with a 3/8 panel when n is even) in closed
  /// mode, rectangle weights in periodic mode.
  std::vector<double> quadrature_weights() const {
    std::vector<double> w(n_, dx_);
    if (periodic()) return w;
    if (n_ < 3) throw InvalidArgument("closed-mode quadrature needs at least 3 points");
    std::fill(w.begin(), w.end(), 0.0);
    const std::size_t intervals = n_ - 1;
    const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
      w[i] += dx_ / 3.0;
      w[i + 1] += 4.0 * dx_ / 3.0;
      w[i + 2] += dx_ / 3.0;
    }
    if (simpson_end != intervals) {
      const std::size_t i = simpson_end;
      w[i] += 3.0 * dx_ / 8.0;
      w[i + 1] += 9.0 * dx_ / 8.0;
      w[i + 2] += 9.0 * dx_ / 8.0;
      w[i + 3] += 3.0 * dx_ / 8.0;
    }
    return w;
  }

  /// Angular wavenumbers in FFT storage order (periodic mode only).
  std::vector<double> wavenumbers() const {
    require_periodic("wavenumbers");
    std::vector<double> k(n_);
    const double base = 2.0 * std::numbers::pi / length();
    const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
    for (std::size_t j = 0; j < n_; ++j) {
      auto m = static_cast<std::ptrdiff_t>(j);
      if (m >= half) m -= static_cast<std::ptrdiff_t>(n_);
      k[j] = base * static_cast<double>(m);
    }
    return k;
  }

  double k_max() const { return std::numbers::pi / dx_; }

  void require_periodic(const char* what) const {
    if (!periodic()) throw InvalidArgument(std::string(what) + " requires a periodic grid");
  }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  Grid1D(double x_min, double x_max, std::size_t n, GridMode mode)
      : x_min_(x_min), x_max_(x_max), n_(n), mode_(mode) {
    if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_max > x_min))
      throw InvalidArgument("grid bounds must be finite with x_max > x_min");
    dx_ = mode == GridMode::closed ? (x_max - x_min) / static_cast<double>(n - 1)
                                   : (x_max - x_min) / static_cast<double>(n);
  }

  double x_min_;
  double x_max_;
  std::size_t n_;
  GridMode mode_;
  double dx_ = 0.0;
};

/// Samples of a real or complex function on a grid.
template <class T>
class Field {
 public:
  using value_type = T;

  explicit Field(const Grid1D& grid) : grid_(grid), values_(grid.n(), T{}) {}

  Field(const Grid1D& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n())
      throw InvalidArgument("field length " + std::to_string(values_.size()) +
                            " does not match grid size " + std::to_string(grid_.n()));
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const T> values() const noexcept { return values_; }
  std::span<T> values() noexcept { return values_; }
  const std::vector<T>& data() const noexcept { return values_; }

  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

 private:
  Grid1D grid_;
  std::vector<T> values_;
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

template <class F>
RealField sample(const Grid1D& grid, F&& f) {
  RealField out(grid);
  for (std::size_t i = 0; i < grid.n(); ++i) out[i] = f(grid.x(i));
  return out;
}

template <class F>
ComplexField sample_complex(const Grid1D& grid, F&& f) {
  ComplexField out(grid);
  for (std::size_t i = 0; i < grid.n(); ++i) out[i] = f(grid.x(i));
  return out;
}

template <class T, class F>
auto map(const Field<T>& in, F&& f) {
  using R = std::decay_t<decltype(f(in[0]))>;
  Field<R> out(in.grid());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return out;
}

template <class A, class B, class F>
auto zip_with(const Field<A>& a, const Field<B>& b, F&& f) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
  using R = std::decay_t<decltype(f(a[0], b[0]))>;
  Field<R> out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

inline RealField abs2(const ComplexField& psi) {
  return map(psi, [](Complex z) { return std::norm(z); });
}

inline double integrate(const RealField& f) {
  const auto w = f.grid().quadrature_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
  return sum;
}

/// Integral of f*g without materializing the product.
inline double integrate_product(const RealField& f, const RealField& g) {
  if (!(f.grid() == g.grid())) throw InvalidArgument("fields live on different grids");
  const auto w = f.grid().quadrature_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i] * g[i];
  return sum;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace detail {

// The FFTW planner is not re-entrant; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
};

/// Unnormalized in-place DFT; sign = FFTW_FORWARD (-1) or FFTW_BACKWARD (+1).
inline void fft_inplace(std::vector<Complex>& data, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
}

/// Applies a diagonal Fourier multiplier m(k) to a periodic field.
template <class M>
std::vector<Complex> fourier_multiply(const Grid1D& grid, std::vector<Complex> data, M&& multiplier) {
  grid.require_periodic("spectral operator");
  fft_inplace(data, FFTW_FORWARD);
  const auto k = grid.wavenumbers();
  const double inv_n = 1.0 / static_cast<double>(grid.n());
  for (std::size_t j = 0; j < data.size(); ++j) data[j] *= multiplier(j, k[j]) * inv_n;
  fft_inplace(data, FFTW_BACKWARD);
  return data;
}

inline std::vector<Complex> to_complex(const RealField& f) {
  return {f.begin(), f.end()};
}

inline RealField real_part(const Grid1D& grid, const std::vector<Complex>& data) {
  RealField out(grid);
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
  return out;
}

}  // namespace detail

enum class Direction { forward, inverse };

/// Unitary DFT (1/sqrt(n) in both directions). Periodic power-of-two grids only.
inline ComplexField spectral_transform(const ComplexField& f, Direction direction) {
  const auto& grid = f.grid();
  grid.require_periodic("spectral_transform");
  if (!std::has_single_bit(grid.n()))
    throw InvalidArgument("spectral_transform requires a power-of-two grid");
  std::vector<Complex> data(f.begin(), f.end());
  detail::fft_inplace(data, direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.n()));
  for (auto& z : data) z *= scale;
  return ComplexField(grid, std::move(data));
}

/// Spectral first derivative; the Nyquist mode is dropped.
inline ComplexField spectral_gradient(const ComplexField& f) {
  const auto& grid = f.grid();
  const std::size_t nyquist = grid.n() / 2;
  auto data = detail::fourier_multiply(grid, {f.begin(), f.end()}, [nyquist](std::size_t j, double k) {
    return j == nyquist ? Complex{} : Complex{0.0, k};
  });
  return ComplexField(grid, std::move(data));
}

inline ComplexField spectral_laplacian(const ComplexField& f) {
  auto data = detail::fourier_multiply(f.grid(), {f.begin(), f.end()},
                                       [](std::size_t, double k) { return Complex{-k * k, 0.0}; });
  return ComplexField(f.grid(), std::move(data));
}

/// First derivative: second-order finite differences (closed) or spectral (periodic).
inline RealField gradient(const RealField& f) {
  const auto& grid = f.grid();
  if (grid.periodic()) {
    const std::size_t nyquist = grid.n() / 2;
    auto data = detail::fourier_multiply(grid, detail::to_complex(f), [nyquist](std::size_t j, double k) {
      return j == nyquist ? Complex{} : Complex{0.0, k};
    });
    return detail::real_part(grid, data);
  }
  const std::size_t n = grid.n();
  if (n < 3) throw InvalidArgument("closed-mode gradient needs at least 3 points");
  const double h = grid.dx();
  RealField out(grid);
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return out;
}

/// Second derivative: three-point stencil (closed) or spectral (periodic).
inline RealField second_derivative(const RealField& f) {
  const auto& grid = f.grid();
  if (grid.periodic()) {
    auto data = detail::fourier_multiply(grid, detail::to_complex(f),
                                         [](std::size_t, double k) { return Complex{-k * k, 0.0}; });
    return detail::real_part(grid, data);
  }
  const std::size_t n = grid.n();
  if (n < 4) throw InvalidArgument("closed-mode second derivative needs at least 4 points");
  const double h2 = grid.dx() * grid.dx();
  RealField out(grid);
  out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return out;
}

}  // namespace bridgelab
