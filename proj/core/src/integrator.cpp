#include "pgnn/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace pgnn {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0;
constexpr double kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0;
constexpr double kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;

// 5th-order weights; b2 = b7 = 0.
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0;
constexpr double kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;

// Difference between the 5th- and embedded 4th-order weights.
constexpr double kE1 = kB1 - 5179.0 / 57600.0;
constexpr double kE3 = kB3 - 7571.0 / 16695.0;
constexpr double kE4 = kB4 - 393.0 / 640.0;
constexpr double kE5 = kB5 + 92097.0 / 339200.0;
constexpr double kE6 = kB6 - 187.0 / 2100.0;
constexpr double kE7 = -1.0 / 40.0;

constexpr double kMaxGrow = 5.0, kMinShrink = 0.2, kSafety = 0.9;
constexpr long kMaxSteps = 10'000'000;
constexpr double kTimeTol = 1e-12;

void check_finite(const Vec& v, double t) {
  if (!v.allFinite()) {
    throw IntegrationError("non-finite value in integration stage at t = " + std::to_string(t), t);
  }
}

double controller_factor(double err) {
  if (err <= 0.0) return kMaxGrow;
  return std::min(kMaxGrow, std::max(kMinShrink, kSafety * std::pow(err, -0.2)));
}

}  // namespace

Dp45Step dp45_step(const RhsFn& f, const Vec& x, double t, double h,
                   double rtol, double atol, const Vec* k1, Vec* k7_out) {
  if (!(h > 0.0)) throw std::invalid_argument("dp45_step: h must be positive");

  Vec k1v;
  if (k1 == nullptr) {
    k1v = f(t, x);
    check_finite(k1v, t);
    k1 = &k1v;
  }

  Vec k2 = f(t + kC2 * h, x + h * (kA21 * (*k1)));
  check_finite(k2, t + kC2 * h);
  Vec k3 = f(t + kC3 * h, x + h * (kA31 * (*k1) + kA32 * k2));
  check_finite(k3, t + kC3 * h);
  Vec k4 = f(t + kC4 * h, x + h * (kA41 * (*k1) + kA42 * k2 + kA43 * k3));
  check_finite(k4, t + kC4 * h);
  Vec k5 = f(t + kC5 * h, x + h * (kA51 * (*k1) + kA52 * k2 + kA53 * k3 + kA54 * k4));
  check_finite(k5, t + kC5 * h);
  Vec k6 = f(t + h, x + h * (kA61 * (*k1) + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
  check_finite(k6, t + h);

  Dp45Step out;
  out.x5 = x + h * (kB1 * (*k1) + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
  check_finite(out.x5, t + h);

  Vec k7 = f(t + h, out.x5);  // FSAL stage
  check_finite(k7, t + h);

  Vec diff = h * (kE1 * (*k1) + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
  double err = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(x(i)), std::abs(out.x5(i)));
    err = std::max(err, std::abs(diff(i)) / scale);
  }
  out.err = err;

  if (k7_out != nullptr) *k7_out = std::move(k7);
  return out;
}

SolverSteps integrate_adaptive(const RhsFn& f, const Vec& x0, double t0, double T,
                               double rtol, double atol) {
  if (!(T > t0)) throw std::invalid_argument("integrate_adaptive: T must exceed t0");
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw std::invalid_argument("integrate_adaptive: tolerances must be positive");
  }

  const double span = T - t0;
  const double h_min = 1e-14 * span;

  SolverSteps steps;
  Vec x = x0;
  Vec k1 = f(t0, x);
  check_finite(k1, t0);
  steps.times.push_back(t0);
  steps.states.push_back(x);
  steps.derivs.push_back(k1);

  double t = t0;
  double h = 1e-3 * span;
  long attempts = 0;

  while (t < T - kTimeTol * span) {
    bool clamped = false;
    if (t + h >= T) {
      h = T - t;
      clamped = true;
    }
    if (h < h_min) {
      throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
    }
    if (++attempts > kMaxSteps) {
      throw IntegrationError("step limit exceeded at t = " + std::to_string(t), t);
    }

    Vec k7;
    Dp45Step step = dp45_step(f, x, t, h, rtol, atol, &k1, &k7);
    if (step.err <= 1.0) {
      t = clamped ? T : t + h;
      x = std::move(step.x5);
      k1 = std::move(k7);
      steps.times.push_back(t);
      steps.states.push_back(x);
      steps.derivs.push_back(k1);
      h *= controller_factor(step.err);
    } else {
      h *= controller_factor(step.err);
      clamped = false;
    }
  }
  return steps;
}

Trajectory resample_uniform(const SolverSteps& steps, double t0, double h, double T) {
  if (!(h > 0.0)) throw std::invalid_argument("resample_uniform: h must be positive");
  if (steps.times.size() < 1 || steps.states.empty()) {
    throw std::invalid_argument("resample_uniform: empty solver steps");
  }
  if (t0 < steps.times.front() - kTimeTol || T > steps.times.back() + kTimeTol) {
    throw std::out_of_range("resample_uniform: grid [" + std::to_string(t0) + ", " +
                            std::to_string(T) + "] outside solver coverage [" +
                            std::to_string(steps.times.front()) + ", " +
                            std::to_string(steps.times.back()) + "]");
  }

  const long n_steps = static_cast<long>(std::floor((T - t0) / h + 1e-9));
  Trajectory traj;
  traj.t0 = t0;
  traj.h = h;
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);

  std::size_t seg = 0;
  for (long k = 0; k <= n_steps; ++k) {
    const double tk = t0 + static_cast<double>(k) * h;
    if (tk > steps.times.back() + kTimeTol) {
      throw std::out_of_range("resample_uniform: grid point beyond solver coverage");
    }
    while (seg + 1 < steps.times.size() && steps.times[seg + 1] < tk - kTimeTol) ++seg;

    if (std::abs(tk - steps.times[seg]) <= kTimeTol) {
      traj.states.push_back(steps.states[seg]);
      continue;
    }
    if (seg + 1 < steps.times.size() && std::abs(tk - steps.times[seg + 1]) <= kTimeTol) {
      traj.states.push_back(steps.states[seg + 1]);
      continue;
    }
    if (seg + 1 >= steps.times.size()) {
      throw std::out_of_range("resample_uniform: grid point beyond solver coverage");
    }

    // Cubic Hermite on the bracketing accepted step, using cached derivatives.
    const double ta = steps.times[seg], tb = steps.times[seg + 1];
    const double dt = tb - ta;
    const double s = (tk - ta) / dt;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    traj.states.push_back(h00 * steps.states[seg] + (h10 * dt) * steps.derivs[seg] +
                          h01 * steps.states[seg + 1] + (h11 * dt) * steps.derivs[seg + 1]);
  }
  return traj;
}

Trajectory simulate(const SystemSpec& spec, const Vec& x0, double T, double h,
                    double rtol, double atol) {
  const SystemSpec local = spec;
  RhsFn f = [&local](double, const Vec& x) { return rhs(local, x); };
  SolverSteps steps = integrate_adaptive(f, x0, 0.0, T, rtol, atol);
  return resample_uniform(steps, 0.0, h, T);
}

}  // namespace pgnn
