#include "ltn/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ltn/error.hpp"
#include "ltn/metrics/metrics.hpp"

namespace ltn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Elu: return "elu";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "elu") return Activation::Elu;
  if (s == "relu") return Activation::Relu;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "softmax") return Activation::Softmax;
  if (s == "identity") return Activation::Identity;
  throw Error("unknown activation '" + s + "' (valid: elu, relu, sigmoid, softmax, identity)");
}

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw Error("mlp: dimensions must be at least 1");
  if (std::find(hidden_dims.begin(), hidden_dims.end(), 0u) != hidden_dims.end()) {
    throw Error("mlp: hidden layer widths must be at least 1");
  }
  if (hidden_activation != Activation::Elu && hidden_activation != Activation::Relu) {
    throw Error("mlp: hidden activation must be elu or relu");
  }
  if (output_activation == Activation::Elu || output_activation == Activation::Relu) {
    throw Error("mlp: output activation must be sigmoid, softmax or identity");
  }
}

std::vector<std::size_t> MlpSpec::dims() const {
  std::vector<std::size_t> d{input_dim};
  d.insert(d.end(), hidden_dims.begin(), hidden_dims.end());
  d.push_back(output_dim);
  return d;
}

MlpParams mlp_init(const MlpSpec& spec) {
  spec.validate();
  const auto dims = spec.dims();
  std::mt19937_64 rng(spec.seed);
  MlpParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<double> w(dims[l] * dims[l + 1]);
    for (auto& v : w) v = dist(rng);
    p.weights.emplace_back(Shape{dims[l], dims[l + 1]}, std::move(w));
    p.biases.push_back(Array::zeros(Shape{dims[l + 1]}));
  }
  return p;
}

namespace {

NodeId activate(Graph& g, NodeId x, Activation a) {
  switch (a) {
    case Activation::Elu: return g.elu(x);
    case Activation::Relu: return g.relu(x);
    case Activation::Sigmoid: return g.sigmoid(x);
    case Activation::Softmax: return g.softmax(x);
    case Activation::Identity: return x;
  }
  return x;
}

NodeId forward_layers(Graph& g, const MlpSpec& spec, std::span<const NodeId> w, std::span<const NodeId> b,
                      NodeId batch) {
  const auto& in = g.shape(batch);
  if (in.size() != 2 || in[1] != spec.input_dim) {
    throw ShapeError("mlp: expected batch of width " + std::to_string(spec.input_dim) + ", got shape " +
                     shape_string(in));
  }
  NodeId h = batch;
  for (std::size_t l = 0; l < w.size(); ++l) {
    h = g.add(g.matmul(h, w[l]), b[l]);
    h = activate(g, h, l + 1 == w.size() ? spec.output_activation : spec.hidden_activation);
  }
  return h;
}

}  // namespace

Array mlp_forward(const MlpSpec& spec, const MlpParams& params, const Array& batch) {
  Graph g;
  std::vector<NodeId> w, b;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    w.push_back(g.constant(params.weights[l]));
    b.push_back(g.constant(params.biases[l]));
  }
  return g.value(forward_layers(g, spec, w, b, g.constant(batch)));
}

Mlp::Mlp(std::string name, MlpSpec spec) : name_(std::move(name)), spec_(std::move(spec)) { spec_.validate(); }

std::string Mlp::weight_name(std::size_t layer) const { return name_ + ".w" + std::to_string(layer); }
std::string Mlp::bias_name(std::size_t layer) const { return name_ + ".b" + std::to_string(layer); }

void Mlp::register_params(ParameterStore& store) const {
  auto p = mlp_init(spec_);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    store.add(weight_name(l), std::move(p.weights[l]));
    store.add(bias_name(l), std::move(p.biases[l]));
  }
}

MlpParams Mlp::params(const ParameterStore& store) const {
  MlpParams p;
  for (std::size_t l = 0; l + 1 < spec_.dims().size(); ++l) {
    p.weights.push_back(store.get(weight_name(l)));
    p.biases.push_back(store.get(bias_name(l)));
  }
  return p;
}

NodeId Mlp::forward(Graph& g, NodeId batch) const {
  std::vector<NodeId> w, b;
  const auto layers = spec_.dims().size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    w.push_back(g.parameter(weight_name(l)));
    b.push_back(g.parameter(bias_name(l)));
  }
  return forward_layers(g, spec_, w, b, batch);
}

namespace {

void check_onehot(const Array& onehot) {
  if (onehot.rank() != 2) throw ShapeError("cross_entropy: labels must be a matrix");
  const auto n = onehot.dim(0), c = onehot.dim(1);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < c; ++j) {
      const double v = onehot[r * c + j];
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = 2;
        break;
      }
    }
    if (ones != 1) throw Error("cross_entropy: label row " + std::to_string(r) + " is not one-hot");
  }
}

}  // namespace

NodeId cross_entropy(Graph& g, NodeId probs, const Array& onehot) {
  check_onehot(onehot);
  if (g.shape(probs) != onehot.shape()) {
    throw ShapeError("cross_entropy: probabilities " + shape_string(g.shape(probs)) + " vs labels " +
                     shape_string(onehot.shape()));
  }
  const double n = static_cast<double>(onehot.dim(0));
  NodeId logp = g.log(g.clamp(probs, 1e-12, 1.0));
  NodeId picked = g.sum_all(g.mul(logp, g.constant(onehot)));
  return g.mul(picked, g.scalar(-1.0 / n));
}

double cross_entropy(const Array& probs, const Array& onehot) {
  check_onehot(onehot);
  if (probs.shape() != onehot.shape()) throw ShapeError("cross_entropy: shape mismatch");
  const auto n = probs.dim(0), c = probs.dim(1);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += probs[r * c + j];
    if (std::fabs(s - 1.0) > 1e-6) throw Error("cross_entropy: probability row " + std::to_string(r) + " does not sum to 1");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (onehot[i] == 1.0) acc += std::log(std::max(probs[i], 1e-12));
  }
  return -acc / static_cast<double>(n);
}

std::vector<DnnRecord> train_dnn(const Mlp& model, ParameterStore& store, const Array& x_train,
                                 const Array& y_train, const Array& x_test, const Array& y_test,
                                 const DnnTrainConfig& config) {
  if (config.batch_size == 0) throw Error("train_dnn: batch size must be at least 1");
  if (x_train.rank() != 2 || x_train.dim(0) == 0) throw ShapeError("train_dnn: empty training set");

  auto evaluate = [&](const Array& x, const Array& y, double& loss, double& acc) {
    Graph g(&store);
    NodeId probs = model.forward(g, g.constant(x));
    loss = g.value(cross_entropy(g, probs, y)).item();
    acc = categorical_accuracy(g.value(probs), y);
  };
  auto record = [&](std::size_t epoch) {
    DnnRecord r;
    r.epoch = epoch;
    evaluate(x_train, y_train, r.loss_train, r.acc_train);
    evaluate(x_test, y_test, r.loss_test, r.acc_test);
    return r;
  };

  std::vector<DnnRecord> history{record(0)};
  Adam adam(AdamConfig{.learning_rate = config.learning_rate});
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(x_train.dim(0));
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      Graph g(&store);
      NodeId probs = model.forward(g, g.constant(x_train.take_rows(idx)));
      NodeId loss = cross_entropy(g, probs, y_train.take_rows(idx));
      adam.step(store, g.parameter_gradients(g.backward(loss)));
    }
    history.push_back(record(epoch));
  }
  return history;
}

}  // namespace ltn
