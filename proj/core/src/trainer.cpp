#include "pgnn/trainer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pgnn {

AdamState::AdamState(const NetParams& params) {
  m_w.reserve(params.weights.size());
  v_w.reserve(params.weights.size());
  m_b.reserve(params.biases.size());
  v_b.reserve(params.biases.size());
  for (const auto& w : params.weights) {
    m_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    v_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : params.biases) {
    m_b.push_back(Eigen::VectorXd::Zero(b.size()));
    v_b.push_back(Eigen::VectorXd::Zero(b.size()));
  }
}

namespace {

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, double lr_t, double beta1,
                 double beta2, double eps, double bc1, double bc2) {
  if (!grad.allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient");
  }
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v.array() + (1.0 - beta2) * grad.array().square();
  param.array() -= lr_t * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace

void adam_step(NetParams& params, const Gradients& grads, AdamState& state, long step,
               const AdamHyper& hyper) {
  if (step < 1) throw std::invalid_argument("adam_step: step counter must be >= 1");
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    adam_update(params.weights[l], grads.weights[l], state.m_w[l], state.v_w[l],
                hyper.lr, hyper.beta1, hyper.beta2, hyper.eps, bc1, bc2);
    adam_update(params.biases[l], grads.biases[l], state.m_b[l], state.v_b[l],
                hyper.lr, hyper.beta1, hyper.beta2, hyper.eps, bc1, bc2);
  }
}

std::vector<int> benchmark_sizes(int dim) { return {dim, 32, 64, 32, dim}; }

namespace {

// Gathers dataset columns for the given indices.
void gather(const Eigen::MatrixXd& src, const std::vector<int>& idx, Eigen::MatrixXd& dst) {
  dst.resize(src.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    dst.col(static_cast<Eigen::Index>(j)) = src.col(idx[j]);
  }
}

}  // namespace

TrainedModel train_model(const Dataset& dataset, const Split& split, const SystemSpec& spec,
                         const InjectionConfig& injection, const TrainConfig& config,
                         std::uint64_t member_seed) {
  if (config.epochs < 1) throw std::invalid_argument("train_model: epochs must be >= 1");
  if (config.batch_size < 1) throw std::invalid_argument("train_model: batch_size must be >= 1");
  if (dataset.pairs.empty()) throw std::invalid_argument("train_model: empty dataset");
  if (split.train_idx.empty() || split.val_idx.empty()) {
    throw std::invalid_argument("train_model: split has an empty side");
  }
  if (injection.active() && term_system(*injection.term) != spec.id) {
    throw std::invalid_argument("train_model: injection term belongs to " +
                                to_string(term_system(*injection.term)) + ", dataset is " +
                                to_string(spec.id));
  }

  const int dim = spec.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.pairs.size());
  const int m = injection.active() ? 1 : 0;

  Eigen::MatrixXd all_x(dim, n), all_y(dim, n), all_f(m, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    all_x.col(i) = dataset.pairs[static_cast<std::size_t>(i)].x;
    all_y.col(i) = dataset.pairs[static_cast<std::size_t>(i)].y;
    if (m > 0) {
      all_f(0, i) = injection_feature(*injection.term, dataset.pairs[static_cast<std::size_t>(i)].x);
    }
  }

  Eigen::MatrixXd val_x, val_y, val_f(m, static_cast<Eigen::Index>(split.val_idx.size()));
  gather(all_x, split.val_idx, val_x);
  gather(all_y, split.val_idx, val_y);
  if (m > 0) gather(all_f, split.val_idx, val_f);

  TrainedModel result;
  result.params = init_params(benchmark_sizes(dim), config.activation, injection, member_seed);
  AdamState adam(result.params);
  Gradients grads;
  NetWorkspace ws;
  Eigen::MatrixXd batch_x, batch_y, batch_f;
  long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_sum = 0.0;
    std::size_t n_batches = 0;
    bool bad = false;
    try {
      for (const auto& batch : batches(split, config.batch_size, epoch, member_seed)) {
        gather(all_x, batch, batch_x);
        gather(all_y, batch, batch_y);
        if (m > 0) {
          gather(all_f, batch, batch_f);
        } else {
          batch_f.resize(0, static_cast<Eigen::Index>(batch.size()));
        }
        const double loss = loss_and_grad(result.params, batch_x, batch_y, batch_f, grads, ws);
        if (!std::isfinite(loss)) {
          bad = true;
          break;
        }
        adam_step(result.params, grads, adam, ++step, config.adam);
        epoch_sum += loss;
        ++n_batches;
      }
    } catch (const std::runtime_error&) {
      // Overflowing activations or gradients: treat as divergence.
      bad = true;
    }
    if (bad) {
      result.history.diverged = true;
      break;
    }

    Eigen::MatrixXd val_out = forward_batch(result.params, val_x, val_f);
    const double val_loss =
        (val_out - val_y).squaredNorm() /
        (static_cast<double>(val_x.cols()) * static_cast<double>(dim));
    if (!std::isfinite(val_loss)) {
      result.history.diverged = true;
      break;
    }
    result.history.train.push_back(epoch_sum / static_cast<double>(n_batches));
    result.history.val.push_back(val_loss);
  }
  return result;
}

std::vector<TrainedModel> train_ensemble(const Dataset& dataset, const Split& split,
                                         const SystemSpec& spec,
                                         const InjectionConfig& injection,
                                         const TrainConfig& config, int workers) {
  if (config.ensemble_size < 1) {
    throw std::invalid_argument("train_ensemble: ensemble_size must be >= 1");
  }
  const int n = config.ensemble_size;
  std::vector<TrainedModel> members(static_cast<std::size_t>(n));

  int pool = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  pool = std::max(1, std::min(pool, n));

  if (pool == 1) {
    for (int i = 0; i < n; ++i) {
      members[static_cast<std::size_t>(i)] = train_model(
          dataset, split, spec, injection, config, config.seed + static_cast<std::uint64_t>(i));
    }
    return members;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(pool));
  for (int w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          members[static_cast<std::size_t>(i)] =
              train_model(dataset, split, spec, injection, config,
                          config.seed + static_cast<std::uint64_t>(i));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return members;
}

std::vector<double> ema_smooth(const std::vector<double>& series, double alpha) {
  if (series.empty()) throw std::invalid_argument("ema_smooth: empty series");
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument("ema_smooth: alpha must be in (0, 1]");
  }
  std::vector<double> out(series.size());
  out[0] = series[0];
  for (std::size_t k = 1; k < series.size(); ++k) {
    // Incremental form of alpha*x + (1-alpha)*s; keeps constant series fixed.
    out[k] = alpha == 1.0 ? series[k] : out[k - 1] + alpha * (series[k] - out[k - 1]);
  }
  return out;
}

}  // namespace pgnn
