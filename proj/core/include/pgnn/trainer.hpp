#pragma once

#include <cstdint>
#include <vector>

#include "pgnn/dataset.hpp"
#include "pgnn/network.hpp"

namespace pgnn {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  std::uint64_t seed = 0;
  int ensemble_size = 10;
  AdamHyper adam;
  Activation activation = Activation::Relu;
};

// Per-epoch mean training loss and full-validation loss. When training
// diverges the curves are truncated at the last finite epoch.
struct LossHistory {
  std::vector<double> train;
  std::vector<double> val;
  bool diverged = false;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  explicit AdamState(const NetParams& params);
};

// One ADAM update with bias correction, in place. step is the 1-based
// update counter.
void adam_step(NetParams& params, const Gradients& grads, AdamState& state,
               long step, const AdamHyper& hyper);

struct TrainedModel {
  NetParams params;
  LossHistory history;
};

// Hidden widths of the benchmark architecture.
std::vector<int> benchmark_sizes(int dim);

// Trains one model: Glorot init from member_seed, per-epoch batch shuffle
// keyed on (member_seed, epoch), ADAM updates, per-epoch loss recording.
// Fully deterministic for fixed inputs.
TrainedModel train_model(const Dataset& dataset, const Split& split,
                         const SystemSpec& spec, const InjectionConfig& injection,
                         const TrainConfig& config, std::uint64_t member_seed);

// Trains ensemble_size members with member_seed = config.seed + i, sharing
// the dataset and split. Members run on up to `workers` threads (0 = number
// of hardware threads); results are ordered by member index.
std::vector<TrainedModel> train_ensemble(const Dataset& dataset, const Split& split,
                                         const SystemSpec& spec,
                                         const InjectionConfig& injection,
                                         const TrainConfig& config, int workers = 0);

// Exponential moving average, s_0 = x_0, s_k = alpha*x_k + (1-alpha)*s_{k-1}.
std::vector<double> ema_smooth(const std::vector<double>& series, double alpha = 0.2);

}  // namespace pgnn
