#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pgnn/integrator.hpp"
#include "pgnn/network.hpp"

namespace pgnn {

using DerivModel = std::function<Vec(const Vec& x)>;

// Magnitude guard: a rollout whose state exceeds this (or goes non-finite)
// is flagged as diverged.
inline constexpr double kDivergenceThreshold = 1e6;

// Forward-Euler rollout, possibly truncated. states holds the finite prefix
// (always at least x0); diverged_step is the index of the first bad state.
struct Rollout {
  Trajectory traj;
  bool diverged = false;
  int diverged_step = -1;

  std::size_t alive_steps() const { return traj.states.size(); }
};

// x_{k+1} = x_k + h*model(x_k) for n_steps steps. Divergence is data, not
// an error: iteration stops at the first non-finite or out-of-bounds state.
Rollout euler_rollout(const DerivModel& model, const Vec& x0, double h, int n_steps);

// Mean over steps k*h <= window and state components of (pred - truth)^2;
// +inf when the prediction diverged before the window's end.
double rfmse(const Rollout& pred, const Trajectory& truth, double window, double h);

// Per-step ensemble statistics over the members alive at each step.
struct EnsembleStats {
  std::vector<Vec> mean;      // defined while >= 2 members are alive
  std::vector<Vec> band_lo;   // mean - z*std (sample std, n-1)
  std::vector<Vec> band_hi;
  std::vector<int> n_alive;   // per grid step, full horizon
};

EnsembleStats ensemble_stats(const std::vector<Rollout>& members, double z);

struct ForecastResult {
  Trajectory truth;
  std::vector<Rollout> members;
  EnsembleStats stats;
  std::vector<double> rfmse_per_member;  // +inf for early-diverging members
};

// Rolls out every model from the truth's initial state over its full
// horizon and scores each member over spec.eval_window (or the override).
// z scales the confidence band (1.96: 95%, 1.0: 68%).
ForecastResult ensemble_forecast(const std::vector<NetParams>& models,
                                 const SystemSpec& spec, const Trajectory& truth,
                                 std::optional<double> window_override = {},
                                 double z = 1.96);

// One row of the experiment report. layer 0 / no term is the baseline.
struct ReportRow {
  SystemId system = SystemId::LotkaVolterra;
  std::optional<InjectionTerm> term;
  int layer = 0;
  double rfmse_mean = 0.0;   // mean over finite member RFMSEs; +inf if none
  double rfmse_std = 0.0;    // sample std over finite member RFMSEs
  int n_diverged = 0;
  double relative_rfmse = 0.0;
};

// Mean/std/divergence-count aggregation of per-member RFMSEs.
void aggregate_rfmse(const std::vector<double>& member_rfmse, ReportRow& row);

// Divides each row's rfmse_mean by the minimum finite rfmse_mean within its
// system group; +inf entries stay +inf and the minimum maps to exactly 1.
// Throws std::runtime_error when a group has no finite entry.
void compute_relative_rfmse(std::vector<ReportRow>& rows);

}  // namespace pgnn
