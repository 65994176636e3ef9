#pragma once

// Seeded smooth random states: Gaussian-mixture densities with a damped
// quadratic action. Used by the property tests and the `check` experiment.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bridgelab/grid.hpp"
#include "bridgelab/state.hpp"

namespace bridgelab {

/// Bit-exact uniform [0, 1) from the top 53 bits, so sequences do not depend
/// on the standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

 private:
  std::mt19937_64 engine_;
};

struct MixtureComponent {
  double weight = 1.0;
  double center = 0.0;
  double variance = 1.0;
};

/// rho = normalized sum of Gaussians; s = (c1 x + c2 x^2) exp(-x^2 / (2 w^2)).
struct RandomStateSpec {
  std::vector<MixtureComponent> components;
  double c1 = 0.0;
  double c2 = 0.0;
  double envelope = 3.0;
  double hbar = 1.0;
  double mass = 1.0;

  bool single_gaussian() const { return components.size() == 1; }

  double action(double x) const { return (c1 * x + c2 * x * x) * std::exp(-x * x / (2.0 * envelope * envelope)); }

  HydroState sample(const Grid1D& grid) const {
    auto rho = bridgelab::sample(grid, [this](double x) {
      double sum = 0.0;
      for (const auto& c : components) {
        const double d = x - c.center;
        sum += c.weight * std::exp(-d * d / (2.0 * c.variance)) / std::sqrt(2.0 * std::numbers::pi * c.variance);
      }
      return sum;
    });
    auto s = bridgelab::sample(grid, [this](double x) { return action(x); });
    return HydroState(normalized(std::move(rho)), std::move(s), hbar, mass);
  }
};

/// Largest |s|/hbar allowed for generated states. The gauge sweep reaches
/// e^3 times this, which must stay below the pair representation's limit.
inline constexpr double kRandomActionCap = 14.0;

/// Index i of a seeded sequence; every fifth state is a single Gaussian so the
/// Cramér-Rao equality case is always covered.
inline RandomStateSpec random_state_spec(Rng& rng, std::size_t index, double hbar = 1.0, double mass = 1.0) {
  RandomStateSpec spec;
  spec.hbar = hbar;
  spec.mass = mass;
  const int count = (index % 5 == 4) ? 1 : rng.integer(2, 4);
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    MixtureComponent c;
    c.weight = rng.uniform(0.2, 1.0);
    c.center = rng.uniform(-2.0, 2.0);
    c.variance = rng.uniform(0.5, 2.0);
    total += c.weight;
    spec.components.push_back(c);
  }
  for (auto& c : spec.components) c.weight /= total;
  spec.c1 = rng.uniform(-1.0, 1.0);
  spec.c2 = rng.uniform(-1.0, 1.0);
  // Scale the action to a random fraction of the cap.
  double peak = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.01) peak = std::max(peak, std::abs(spec.action(x)));
  const double target = rng.uniform(0.2, 1.0) * kRandomActionCap * hbar;
  if (peak > 0.0) {
    spec.c1 *= target / peak;
    spec.c2 *= target / peak;
  }
  return spec;
}

inline std::vector<RandomStateSpec> random_state_specs(std::uint64_t seed, std::size_t count, double hbar = 1.0,
                                                       double mass = 1.0) {
  Rng rng(seed);
  std::vector<RandomStateSpec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_state_spec(rng, i, hbar, mass));
  return out;
}

}  // namespace bridgelab
