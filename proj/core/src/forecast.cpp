#include "pgnn/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace pgnn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool state_ok(const Vec& x) {
  return x.allFinite() && x.cwiseAbs().maxCoeff() <= kDivergenceThreshold;
}
}  // namespace

Rollout euler_rollout(const DerivModel& model, const Vec& x0, double h, int n_steps) {
  if (!(h > 0.0)) throw std::invalid_argument("euler_rollout: h must be positive");
  if (n_steps < 1) throw std::invalid_argument("euler_rollout: n_steps must be >= 1");

  Rollout out;
  out.traj.t0 = 0.0;
  out.traj.h = h;
  out.traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.traj.states.push_back(x0);

  Vec x = x0;
  for (int k = 0; k < n_steps; ++k) {
    x = x + h * model(x);
    if (!state_ok(x)) {
      out.diverged = true;
      out.diverged_step = k + 1;
      break;
    }
    out.traj.states.push_back(x);
  }
  return out;
}

double rfmse(const Rollout& pred, const Trajectory& truth, double window, double h) {
  if (truth.states.empty()) throw std::invalid_argument("rfmse: empty truth trajectory");
  if (pred.traj.h != truth.h || pred.traj.h != h) {
    throw std::invalid_argument("rfmse: trajectories disagree on timestep");
  }
  if (pred.traj.t0 != truth.t0) {
    throw std::invalid_argument("rfmse: trajectories disagree on start time");
  }

  const long last = static_cast<long>(std::floor(window / h + 1e-9));
  if (last >= static_cast<long>(truth.states.size())) {
    throw std::invalid_argument("rfmse: window exceeds truth horizon");
  }
  if (static_cast<long>(pred.traj.states.size()) <= last) {
    return kInf;  // diverged before the window's end
  }

  const double dim = static_cast<double>(truth.states.front().size());
  double sum = 0.0;
  for (long k = 0; k <= last; ++k) {
    sum += (pred.traj.states[static_cast<std::size_t>(k)] -
            truth.states[static_cast<std::size_t>(k)])
               .squaredNorm();
  }
  return sum / (static_cast<double>(last + 1) * dim);
}

EnsembleStats ensemble_stats(const std::vector<Rollout>& members, double z) {
  if (members.empty()) throw std::invalid_argument("ensemble_stats: no members");

  std::size_t horizon = 0;
  for (const auto& m : members) horizon = std::max(horizon, m.alive_steps());

  EnsembleStats stats;
  stats.n_alive.resize(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    int alive = 0;
    for (const auto& m : members) {
      if (m.alive_steps() > k) ++alive;
    }
    stats.n_alive[k] = alive;
  }

  const Eigen::Index dim = members.front().traj.states.front().size();
  for (std::size_t k = 0; k < horizon && stats.n_alive[k] >= 2; ++k) {
    const int alive = stats.n_alive[k];
    // Deviations from the first alive member keep identical members exactly
    // coincident (zero band width) and avoid cancellation for tight bands.
    const Vec* anchor = nullptr;
    for (const auto& m : members) {
      if (m.alive_steps() > k) {
        anchor = &m.traj.states[k];
        break;
      }
    }
    Vec dbar = Vec::Zero(dim);
    for (const auto& m : members) {
      if (m.alive_steps() > k) dbar += m.traj.states[k] - *anchor;
    }
    dbar /= static_cast<double>(alive);

    Vec var = Vec::Zero(dim);
    for (const auto& m : members) {
      if (m.alive_steps() > k) var += ((m.traj.states[k] - *anchor) - dbar).cwiseAbs2();
    }
    var /= static_cast<double>(alive - 1);
    const Vec sd = var.cwiseSqrt();

    const Vec mean = *anchor + dbar;
    stats.mean.push_back(mean);
    stats.band_lo.push_back(mean - z * sd);
    stats.band_hi.push_back(mean + z * sd);
  }
  return stats;
}

ForecastResult ensemble_forecast(const std::vector<NetParams>& models, const SystemSpec& spec,
                                 const Trajectory& truth,
                                 std::optional<double> window_override, double z) {
  if (models.size() < 2) {
    throw std::invalid_argument("ensemble_forecast: need at least 2 members, got " +
                                std::to_string(models.size()));
  }
  if (truth.states.size() < 2) {
    throw std::invalid_argument("ensemble_forecast: truth trajectory too short");
  }

  const int n_steps = static_cast<int>(truth.states.size()) - 1;
  const Vec& x0 = truth.states.front();
  const double window = window_override.value_or(spec.eval_window);

  ForecastResult result;
  result.truth = truth;
  result.members.reserve(models.size());
  result.rfmse_per_member.reserve(models.size());
  for (const auto& params : models) {
    DerivModel model = [&params, &spec](const Vec& x) {
      return predict_derivative(params, spec, x);
    };
    Rollout r = euler_rollout(model, x0, truth.h, n_steps);
    result.rfmse_per_member.push_back(rfmse(r, truth, window, truth.h));
    result.members.push_back(std::move(r));
  }
  result.stats = ensemble_stats(result.members, z);
  return result;
}

void aggregate_rfmse(const std::vector<double>& member_rfmse, ReportRow& row) {
  double sum = 0.0;
  int n_finite = 0;
  row.n_diverged = 0;
  for (double v : member_rfmse) {
    if (std::isfinite(v)) {
      sum += v;
      ++n_finite;
    } else {
      ++row.n_diverged;
    }
  }
  if (n_finite == 0) {
    row.rfmse_mean = kInf;
    row.rfmse_std = 0.0;
    return;
  }
  row.rfmse_mean = sum / n_finite;
  double ss = 0.0;
  for (double v : member_rfmse) {
    if (std::isfinite(v)) ss += (v - row.rfmse_mean) * (v - row.rfmse_mean);
  }
  row.rfmse_std = n_finite > 1 ? std::sqrt(ss / (n_finite - 1)) : 0.0;
}

void compute_relative_rfmse(std::vector<ReportRow>& rows) {
  std::map<SystemId, double> group_min;
  for (const auto& row : rows) {
    if (std::isfinite(row.rfmse_mean)) {
      auto [it, inserted] = group_min.try_emplace(row.system, row.rfmse_mean);
      if (!inserted) it->second = std::min(it->second, row.rfmse_mean);
    } else {
      group_min.try_emplace(row.system, kInf);
    }
  }
  for (const auto& [system, min_value] : group_min) {
    if (!std::isfinite(min_value)) {
      throw std::runtime_error("relative RFMSE: every ensemble diverged for " +
                               to_string(system));
    }
  }
  for (auto& row : rows) {
    row.relative_rfmse = row.rfmse_mean / group_min.at(row.system);
  }
}

}  // namespace pgnn
