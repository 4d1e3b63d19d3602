#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltn/tensor/adam.hpp"
#include "ltn/tensor/graph.hpp"

namespace ltn {

enum class Activation { Elu, Relu, Sigmoid, Softmax, Identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims = {64, 64};
  std::size_t output_dim = 1;
  Activation hidden_activation = Activation::Elu;
  Activation output_activation = Activation::Sigmoid;
  std::uint64_t seed = 0;

  /// Throws on zero dimensions or an activation used in the wrong slot.
  void validate() const;
  /// input, hidden..., output
  std::vector<std::size_t> dims() const;
  /// At least two hidden layers.
  bool deep() const { return hidden_dims.size() >= 2; }
};

struct MlpParams {
  std::vector<Array> weights;  // layer l: (dims[l], dims[l+1])
  std::vector<Array> biases;   // layer l: (dims[l+1],)
};

/// Glorot-uniform weights, zero biases; deterministic per spec.seed.
MlpParams mlp_init(const MlpSpec& spec);

/// Plain evaluation on a batch (n, input_dim).
Array mlp_forward(const MlpSpec& spec, const MlpParams& params, const Array& batch);

/// An MLP whose parameters live in a ParameterStore as
/// "<name>.w<l>" and "<name>.b<l>".
class Mlp {
 public:
  Mlp(std::string name, MlpSpec spec);

  void register_params(ParameterStore& store) const;
  MlpParams params(const ParameterStore& store) const;
  NodeId forward(Graph& g, NodeId batch) const;

  const std::string& name() const { return name_; }
  const MlpSpec& spec() const { return spec_; }
  std::string weight_name(std::size_t layer) const;
  std::string bias_name(std::size_t layer) const;

 private:
  std::string name_;
  MlpSpec spec_;
};

/// -(1/n) * sum log(prob of the true class), probabilities clamped to
/// at least 1e-12. `onehot` rows must be one-hot.
NodeId cross_entropy(Graph& g, NodeId probs, const Array& onehot);
double cross_entropy(const Array& probs, const Array& onehot);

struct DnnTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double learning_rate = 0.001;
  std::uint64_t seed = 0;
};

struct DnnRecord {
  std::size_t epoch = 0;
  double loss_train = 0.0;
  double loss_test = 0.0;
  double acc_train = 0.0;
  double acc_test = 0.0;
};

/// Mini-batch Adam on cross-entropy for a softmax classifier. Emits an
/// epoch-0 record before any update, then one record per epoch;
/// accuracy is argmax agreement.
std::vector<DnnRecord> train_dnn(const Mlp& model, ParameterStore& store, const Array& x_train,
                                 const Array& y_train, const Array& x_test, const Array& y_test,
                                 const DnnTrainConfig& config);

}  // namespace ltn
