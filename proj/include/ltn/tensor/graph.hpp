#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltn/tensor/array.hpp"
#include "ltn/tensor/parameters.hpp"

namespace ltn {

struct NodeId {
  std::size_t index = 0;
  friend bool operator==(NodeId, NodeId) = default;
  friend auto operator<=>(NodeId, NodeId) = default;
};

enum class Op : std::uint8_t {
  Input,
  Parameter,
  Constant,
  Add,
  Sub,
  Mul,
  Div,
  MatMul,
  Pow,
  Abs,
  Sqrt,
  Exp,
  Log,
  Sum,
  Mean,
  Min,
  Sigmoid,
  Elu,
  Relu,
  Softmax,
  Clamp,
  Expand,
  Reshape,
  Concat,
  Select,
};

std::string_view op_name(Op op);

using Feeds = std::map<std::string, Array>;

/// Reverse-mode computation graph.
///
/// Nodes are appended in construction order, so parents always precede
/// children and the node list is already a topological order. Values are
/// computed eagerly when a node is created; `forward` re-evaluates every
/// node from (possibly new) feeds and the current parameter values.
///
/// Elementwise binary ops broadcast only when one operand's shape is a
/// trailing suffix of the other's (scalar, or a bias row against a batch).
class Graph {
 public:
  Graph() = default;
  explicit Graph(const ParameterStore* params) : params_(params) {}

  NodeId input(std::string name, Array value, bool trainable = false);
  NodeId constant(Array value);
  NodeId scalar(double v) { return constant(Array::scalar(v)); }
  /// Leaf bound to the named entry of the parameter store; always trainable.
  NodeId parameter(const std::string& name);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId matmul(NodeId a, NodeId b);
  NodeId pow(NodeId x, double exponent);
  NodeId abs(NodeId x);
  NodeId sqrt(NodeId x);
  NodeId exp(NodeId x);
  NodeId log(NodeId x);
  NodeId sum(NodeId x, std::size_t axis);
  NodeId mean(NodeId x, std::size_t axis);
  NodeId min(NodeId x, std::size_t axis);
  NodeId sigmoid(NodeId x);
  NodeId elu(NodeId x, double alpha = 1.0);
  NodeId relu(NodeId x);
  /// Softmax over the last axis.
  NodeId softmax(NodeId x);
  NodeId clamp(NodeId x, double lo, double hi);
  /// Places input axis i at output axis `axis_map[i]` and repeats the
  /// input along every output axis not named in the map.
  NodeId expand(NodeId x, Shape out_shape, std::vector<std::size_t> axis_map);
  NodeId reshape(NodeId x, Shape shape);
  /// Concatenation along the last axis.
  NodeId concat(std::span<const NodeId> parts);
  /// Slice `index` of the last axis, dropping that axis.
  NodeId select(NodeId x, std::size_t index);

  NodeId sum_all(NodeId x);
  NodeId mean_all(NodeId x);
  NodeId one_minus(NodeId x) { return sub(scalar(1.0), x); }

  const Array& value(NodeId id) const { return nodes_.at(id.index).value; }
  const Shape& shape(NodeId id) const { return value(id).shape(); }
  Op op(NodeId id) const { return nodes_.at(id.index).op; }
  bool trainable(NodeId id) const { return nodes_.at(id.index).trainable; }
  std::size_t size() const { return nodes_.size(); }

  /// Re-evaluates every node. Feeds replace input values by name; inputs
  /// without a feed keep their current value.
  void forward(const Feeds& feeds = {});

  /// Gradients of the scalar `root` with respect to every node. Entries of
  /// nodes that do not influence the root through a trainable path are zero.
  std::vector<Array> backward(NodeId root) const;

  /// Per-parameter sums of the gradients of all Parameter nodes.
  Gradients parameter_gradients(const std::vector<Array>& grads) const;

 private:
  struct Node {
    Op op = Op::Constant;
    std::vector<std::size_t> parents;
    Array value;
    bool trainable = false;
    bool requires_grad = false;
    std::string name;
    double a = 0.0;
    double b = 0.0;
    std::size_t axis = 0;
    Shape shape_attr;
    std::vector<std::size_t> axis_map;
    std::vector<std::size_t> gather;  // Expand: input offset per output element
  };

  NodeId push(Node node);
  void evaluate(Node& node) const;
  void check_finite(const Node& node, std::size_t index) const;
  NodeId unary(Op op, NodeId x, double a = 0.0, double b = 0.0);
  NodeId binary(Op op, NodeId a, NodeId b);
  NodeId reduce(Op op, NodeId x, std::size_t axis);

  const ParameterStore* params_ = nullptr;
  std::vector<Node> nodes_;
};

}  // namespace ltn
