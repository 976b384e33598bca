#include "pgnn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "pgnn/rng.hpp"

namespace pgnn {

namespace {

constexpr std::uint64_t kInitStream = 0xB0Bull;

void apply_activation(Activation act, Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::Tanh:
      z = z.array().tanh();
      break;
    case Activation::Relu:
      z = z.array().max(0.0);
      break;
    case Activation::Sigmoid:
      z = (1.0 + (-z.array()).exp()).inverse();
      break;
  }
}

// Derivative of the activation expressed through pre-activation z and
// activated value a (whichever is cheaper per choice).
Eigen::ArrayXXd activation_deriv(Activation act, const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::Tanh:
      return 1.0 - a.array().square();
    case Activation::Relu:
      return (z.array() > 0.0).cast<double>();
    case Activation::Sigmoid:
      return a.array() * (1.0 - a.array());
  }
  throw std::invalid_argument("unknown activation");
}

void validate_injection(const std::vector<int>& sizes, const InjectionConfig& inj) {
  const int n_layers = static_cast<int>(sizes.size()) - 1;
  if (inj.layer < 0 || inj.layer > n_layers - 1) {
    throw std::invalid_argument("injection layer " + std::to_string(inj.layer) +
                                " out of range [0, " + std::to_string(n_layers - 1) + "]");
  }
  if ((inj.layer == 0) == inj.term.has_value()) {
    throw std::invalid_argument("injection term must be present exactly when layer >= 1");
  }
}

}  // namespace

InjectionConfig no_injection() { return InjectionConfig{}; }

InjectionConfig inject(InjectionTerm term, int layer) {
  if (layer < 1) throw std::invalid_argument("inject: layer must be >= 1");
  InjectionConfig cfg;
  cfg.term = term;
  cfg.layer = layer;
  return cfg;
}

int fan_in(const std::vector<int>& sizes, const InjectionConfig& injection, int l) {
  return sizes[l] + ((injection.layer == l && l >= 1) ? 1 : 0);
}

NetParams init_params(const std::vector<int>& sizes, Activation activation,
                      const InjectionConfig& injection, std::uint64_t seed) {
  if (sizes.size() < 2) throw std::invalid_argument("init_params: need at least 2 layer sizes");
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("init_params: layer sizes must be positive");
  }
  validate_injection(sizes, injection);

  NetParams p;
  p.sizes = sizes;
  p.activation = activation;
  p.injection = injection;
  p.seed = seed;

  Rng rng = Rng::keyed(seed, kInitStream);
  const int n_layers = static_cast<int>(sizes.size()) - 1;
  p.weights.reserve(n_layers);
  p.biases.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int cols = fan_in(sizes, injection, l);
    const int rows = sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(cols + rows));
    Eigen::MatrixXd w(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(rows));
  }
  return p;
}

std::size_t param_count(const NetParams& params) {
  std::size_t n = 0;
  for (const auto& w : params.weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : params.biases) n += static_cast<std::size_t>(b.size());
  return n;
}

Vec forward(const NetParams& params, const Vec& x, const Vec& feat) {
  const int expected_feat = params.injection.active() ? 1 : 0;
  if (x.size() != params.n_in()) {
    throw std::invalid_argument("forward: expected input of length " +
                                std::to_string(params.n_in()) + ", got " +
                                std::to_string(x.size()));
  }
  if (feat.size() != expected_feat) {
    throw std::invalid_argument("forward: expected feature of length " +
                                std::to_string(expected_feat) + ", got " +
                                std::to_string(feat.size()));
  }

  const int n_layers = params.n_layers();
  Vec act = x;
  for (int l = 0; l < n_layers; ++l) {
    Vec in;
    if (params.injection.layer == l && l >= 1) {
      in.resize(act.size() + 1);
      in << act, feat;
    } else {
      in = act;
    }
    Vec z = params.weights[l] * in + params.biases[l];
    if (l + 1 < n_layers) {
      Eigen::MatrixXd zm = z;
      apply_activation(params.activation, zm);
      act = zm.col(0);
    } else {
      act = z;
    }
  }
  return act;
}

Eigen::MatrixXd forward_batch(const NetParams& params, const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd& F) {
  const int n_layers = params.n_layers();
  Eigen::MatrixXd act = X;
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd in;
    if (params.injection.layer == l && l >= 1) {
      in.resize(act.rows() + 1, act.cols());
      in.topRows(act.rows()) = act;
      in.bottomRows(1) = F;
    } else {
      in = act;
    }
    Eigen::MatrixXd z = params.weights[l] * in;
    z.colwise() += params.biases[l];
    if (l + 1 < n_layers) apply_activation(params.activation, z);
    act = std::move(z);
  }
  return act;
}

double loss_and_grad(const NetParams& params, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, const Eigen::MatrixXd& F,
                     Gradients& grads, NetWorkspace& ws) {
  const int n_layers = params.n_layers();
  const Eigen::Index batch = X.cols();
  const int m = params.injection.active() ? 1 : 0;
  if (batch == 0) throw std::invalid_argument("loss_and_grad: empty batch");
  if (X.rows() != params.n_in() || Y.rows() != params.n_out() || Y.cols() != batch ||
      F.rows() != m || (m > 0 && F.cols() != batch)) {
    throw std::invalid_argument("loss_and_grad: inconsistent batch shapes");
  }

  if (grads.weights.size() != static_cast<std::size_t>(n_layers)) {
    grads.weights.resize(n_layers);
    grads.biases.resize(n_layers);
  }
  ws.inputs.resize(n_layers);
  ws.zs.resize(n_layers);

  // Forward pass, keeping each layer's (possibly feature-extended) input.
  for (int l = 0; l < n_layers; ++l) {
    const Eigen::MatrixXd& prev = (l == 0) ? X : ws.zs[l - 1];
    Eigen::MatrixXd& in = ws.inputs[l];
    if (params.injection.layer == l && l >= 1) {
      in.resize(prev.rows() + 1, batch);
      in.topRows(prev.rows()) = prev;
      in.bottomRows(1) = F;
    } else {
      in = prev;
    }
    Eigen::MatrixXd& z = ws.zs[l];
    z.noalias() = params.weights[l] * in;
    z.colwise() += params.biases[l];
    if (l + 1 < n_layers) {
      // zs[l] holds the activated output; the derivative is reconstructed
      // from it (tanh/sigmoid) or from its sign pattern (relu).
      apply_activation(params.activation, z);
    }
    if (!z.allFinite()) {
      throw std::runtime_error("loss_and_grad: non-finite activations in layer " +
                               std::to_string(l + 1));
    }
  }

  const Eigen::MatrixXd& out = ws.zs[n_layers - 1];
  const double denom = static_cast<double>(batch) * static_cast<double>(params.n_out());
  const double loss = (out - Y).squaredNorm() / denom;

  // Reverse pass.
  ws.delta = (2.0 / denom) * (out - Y);
  for (int l = n_layers - 1; l >= 0; --l) {
    grads.weights[l].noalias() = ws.delta * ws.inputs[l].transpose();
    grads.biases[l] = ws.delta.rowwise().sum();
    if (l == 0) break;

    ws.delta_prev.noalias() = params.weights[l].transpose() * ws.delta;
    const Eigen::Index rows = ws.zs[l - 1].rows();  // strip the feature row, if any
    const Eigen::MatrixXd& a = ws.zs[l - 1];
    // relu needs the pre-activation sign; a.max(0) > 0 iff z > 0, so the
    // activated value works for all three choices.
    ws.delta = ws.delta_prev.topRows(rows).array() *
               activation_deriv(params.activation, a, a);
  }
  return loss;
}

double loss_and_grad(const NetParams& params, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, const Eigen::MatrixXd& F,
                     Gradients& grads) {
  NetWorkspace ws;
  return loss_and_grad(params, X, Y, F, grads, ws);
}

Vec predict_derivative(const NetParams& params, const SystemSpec& spec, const Vec& x) {
  if (x.size() != spec.dim) {
    throw std::invalid_argument("predict_derivative: expected state of length " +
                                std::to_string(spec.dim) + ", got " + std::to_string(x.size()));
  }
  Vec feat(params.injection.active() ? 1 : 0);
  if (params.injection.active()) {
    feat(0) = injection_feature(*params.injection.term, x);
  }
  return forward(params, x, feat);
}

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  throw std::invalid_argument("unknown activation");
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

}  // namespace pgnn
