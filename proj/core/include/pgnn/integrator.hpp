#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "pgnn/systems.hpp"

namespace pgnn {

using RhsFn = std::function<Vec(double t, const Vec& x)>;

// Accepted steps of an adaptive integration. Derivatives are the cached
// right-hand side evaluated at each accepted point.
struct SolverSteps {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> derivs;
};

// States on the uniform grid t0 + k*h.
struct Trajectory {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<Vec> states;

  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), t(time) {}
  double t;
};

struct Dp45Step {
  Vec x5;       // 5th-order solution after one step
  double err;   // scaled max-norm of the embedded 4th/5th difference
};

// One Dormand-Prince 5(4) step of size h. The error is
// max_i |x5_i - x4_i| / (atol + rtol*max(|x_i|, |x5_i|)); a step is
// acceptable when err <= 1. k1, when given, must equal f(t, x) (FSAL reuse);
// k7_out, when given, receives f(t + h, x5).
Dp45Step dp45_step(const RhsFn& f, const Vec& x, double t, double h,
                   double rtol = 1e-6, double atol = 1e-9,
                   const Vec* k1 = nullptr, Vec* k7_out = nullptr);

// Adaptive integration from t0 to T. The last step is clamped so the final
// accepted time is exactly T. Throws IntegrationError on blow-up, step
// underflow or more than 10^7 steps.
SolverSteps integrate_adaptive(const RhsFn& f, const Vec& x0, double t0, double T,
                               double rtol = 1e-6, double atol = 1e-9);

// Cubic Hermite resampling of accepted steps onto the grid t0 + k*h,
// k = 0..floor((T - t0)/h). Grid points coinciding with an accepted time
// (within 1e-12) copy the accepted state exactly.
Trajectory resample_uniform(const SolverSteps& steps, double t0, double h, double T);

// Convenience: adaptive integration of a system from x0 followed by uniform
// resampling at the spec's timestep.
Trajectory simulate(const SystemSpec& spec, const Vec& x0, double T, double h,
                    double rtol = 1e-6, double atol = 1e-9);

}  // namespace pgnn
