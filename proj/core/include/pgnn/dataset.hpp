#pragma once

#include <cstdint>
#include <vector>

#include "pgnn/integrator.hpp"
#include "pgnn/systems.hpp"

namespace pgnn {

// Supervised pair: state and forward-difference derivative estimate.
struct DataPair {
  double t = 0.0;
  Vec x;
  Vec y;
};

struct Dataset {
  std::vector<DataPair> pairs;
  SystemId system = SystemId::LotkaVolterra;
  double h = 0.0;

  std::size_t size() const { return pairs.size(); }
};

struct Split {
  std::vector<int> train_idx;
  std::vector<int> val_idx;
};

// Builds (x_k, (x_{k+1} - x_k)/h) pairs from each trajectory, concatenated
// in trajectory order. Each trajectory of N points contributes N-1 pairs.
Dataset build_dataset(const SystemSpec& spec, const std::vector<Trajectory>& trajectories);

// Reserves round(fraction*N) uniformly random indices as the validation set.
// Deterministic for a fixed seed; both index lists are sorted.
Split split_dataset(const Dataset& dataset, double fraction, std::uint64_t seed);

// Shuffles the training indices with a permutation keyed on (seed, epoch)
// and chunks them into batches; the last batch may be smaller. Every
// training index appears exactly once per epoch.
std::vector<std::vector<int>> batches(const Split& split, int batch_size, int epoch,
                                      std::uint64_t seed);

}  // namespace pgnn
