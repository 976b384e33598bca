#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pgnn/systems.hpp"

namespace pgnn {

enum class Activation { Tanh, Relu, Sigmoid };

// Where (and whether) the known feature is concatenated: layer 0 means no
// injection; layer i in 1..3 appends the feature to the post-activation
// output of hidden layer i, so it is consumed by layer i+1 (the output
// layer when i = 3).
struct InjectionConfig {
  std::optional<InjectionTerm> term;
  int layer = 0;

  bool active() const { return layer > 0; }
};

InjectionConfig no_injection();
InjectionConfig inject(InjectionTerm term, int layer);

struct NetParams {
  std::vector<int> sizes;                  // [n_in, h1, ..., n_out]
  std::vector<Eigen::MatrixXd> weights;    // weights[l] maps layer l to l+1
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::Relu;
  InjectionConfig injection;
  std::uint64_t seed = 0;

  int n_in() const { return sizes.front(); }
  int n_out() const { return sizes.back(); }
  int n_layers() const { return static_cast<int>(sizes.size()) - 1; }
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Number of inputs consumed by layer l+1 (0-based weight index l), i.e.
// sizes[l] plus one when the injected feature is appended there.
int fan_in(const std::vector<int>& sizes, const InjectionConfig& injection, int l);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out)), injected column
// included in fan_in), zero biases. Deterministic per seed.
NetParams init_params(const std::vector<int>& sizes, Activation activation,
                      const InjectionConfig& injection, std::uint64_t seed);

std::size_t param_count(const NetParams& params);

// Forward pass for one sample. feat must have length 1 when the injection
// is active and length 0 otherwise.
Vec forward(const NetParams& params, const Vec& x, const Vec& feat);

// Scratch buffers reused across loss_and_grad calls.
struct NetWorkspace {
  std::vector<Eigen::MatrixXd> inputs;  // per layer, with feature row appended
  std::vector<Eigen::MatrixXd> zs;
  Eigen::MatrixXd delta;
  Eigen::MatrixXd delta_prev;
};

// Mean-squared error over the batch, (1/(B*n_out)) * sum ||Y_k - f(X_k)||^2,
// and its exact reverse-mode gradient. X is n_in x B, Y is n_out x B, F is
// 1 x B when the injection is active and 0 x B otherwise. Throws
// std::runtime_error naming the layer if an activation goes non-finite.
double loss_and_grad(const NetParams& params, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, const Eigen::MatrixXd& F,
                     Gradients& grads, NetWorkspace& ws);
double loss_and_grad(const NetParams& params, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, const Eigen::MatrixXd& F,
                     Gradients& grads);

// Batched forward pass; returns the n_out x B output matrix.
Eigen::MatrixXd forward_batch(const NetParams& params, const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd& F);

// The learned derivative estimate f̂(x): computes the injection feature from
// the raw state when configured, then runs the forward pass.
Vec predict_derivative(const NetParams& params, const SystemSpec& spec, const Vec& x);

std::string to_string(Activation activation);
Activation activation_from_string(const std::string& name);

}  // namespace pgnn
