#include "pgnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pgnn/rng.hpp"

namespace pgnn {

namespace {
// Stream tags so split selection, per-epoch shuffles and weight init draw
// from unrelated generators even when they share a seed.
constexpr std::uint64_t kSplitStream = 0xA11CEull;
constexpr std::uint64_t kBatchStream = 0xC0FFEEull;
}  // namespace

Dataset build_dataset(const SystemSpec& spec, const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) {
    throw std::invalid_argument("build_dataset: no trajectories");
  }
  Dataset ds;
  ds.system = spec.id;
  ds.h = trajectories.front().h;

  std::size_t total = 0;
  for (const auto& traj : trajectories) {
    if (traj.states.size() < 2) {
      throw std::invalid_argument("build_dataset: trajectory with fewer than 2 points");
    }
    if (traj.h != ds.h) {
      throw std::invalid_argument("build_dataset: trajectories disagree on timestep");
    }
    if (traj.states.front().size() != spec.dim) {
      throw std::invalid_argument("build_dataset: trajectory dimension " +
                                  std::to_string(traj.states.front().size()) +
                                  " does not match system dimension " +
                                  std::to_string(spec.dim));
    }
    total += traj.states.size() - 1;
  }
  ds.pairs.reserve(total);

  for (const auto& traj : trajectories) {
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
      DataPair p;
      p.t = traj.time_at(k);
      p.x = traj.states[k];
      p.y = (traj.states[k + 1] - traj.states[k]) / traj.h;
      ds.pairs.push_back(std::move(p));
    }
  }
  return ds;
}

Split split_dataset(const Dataset& dataset, double fraction, std::uint64_t seed) {
  const std::size_t n = dataset.pairs.size();
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: fraction must be in (0, 1)");
  }
  if (n < 5) {
    throw std::invalid_argument("split_dataset: need at least 5 pairs, got " + std::to_string(n));
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = Rng::keyed(seed, kSplitStream);
  rng.shuffle(idx);

  const std::size_t n_val =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  Split split;
  split.val_idx.assign(idx.begin(), idx.begin() + static_cast<long>(n_val));
  split.train_idx.assign(idx.begin() + static_cast<long>(n_val), idx.end());
  std::sort(split.val_idx.begin(), split.val_idx.end());
  std::sort(split.train_idx.begin(), split.train_idx.end());
  return split;
}

std::vector<std::vector<int>> batches(const Split& split, int batch_size, int epoch,
                                      std::uint64_t seed) {
  if (batch_size < 1) throw std::invalid_argument("batches: batch_size must be >= 1");
  if (split.train_idx.empty()) throw std::invalid_argument("batches: empty training set");

  std::vector<int> order = split.train_idx;
  Rng rng = Rng::keyed(seed, kBatchStream + static_cast<std::uint64_t>(epoch));
  rng.shuffle(order);

  std::vector<std::vector<int>> out;
  out.reserve((order.size() + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    out.emplace_back(order.begin() + static_cast<long>(start),
                     order.begin() + static_cast<long>(stop));
  }
  return out;
}

}  // namespace pgnn
