#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ltn/nn/mlp.hpp"
#include "ltn/tensor/graph.hpp"

namespace ltn {

/// A predicate maps one (N, d_i) batch per non-label argument to N truth
/// values in [0, 1]. Predicates with class labels instead return (N, C)
/// and a label constant among the arguments selects the column.
class Predicate {
 public:
  virtual ~Predicate() = default;
  virtual NodeId apply(Graph& g, std::span<const NodeId> args) const = 0;
  virtual const std::vector<std::string>& labels() const { return no_labels_; }

 private:
  static inline const std::vector<std::string> no_labels_{};
};

/// Functions map argument batches to an (N, d_out) batch.
class Function {
 public:
  virtual ~Function() = default;
  virtual NodeId apply(Graph& g, std::span<const NodeId> args) const = 0;
};

/// Concatenates its arguments and feeds them through an MLP. With labels,
/// the MLP has one output per label; otherwise it must have one output.
class MlpPredicate final : public Predicate {
 public:
  MlpPredicate(Mlp mlp, std::vector<std::string> labels = {});
  NodeId apply(Graph& g, std::span<const NodeId> args) const override;
  const std::vector<std::string>& labels() const override { return labels_; }
  const Mlp& mlp() const { return mlp_; }

 private:
  Mlp mlp_;
  std::vector<std::string> labels_;
};

class LambdaPredicate final : public Predicate {
 public:
  using Fn = std::function<NodeId(Graph&, std::span<const NodeId>)>;
  explicit LambdaPredicate(Fn fn, std::vector<std::string> labels = {})
      : fn_(std::move(fn)), labels_(std::move(labels)) {}
  NodeId apply(Graph& g, std::span<const NodeId> args) const override { return fn_(g, args); }
  const std::vector<std::string>& labels() const override { return labels_; }

 private:
  Fn fn_;
  std::vector<std::string> labels_;
};

class MlpFunction final : public Function {
 public:
  explicit MlpFunction(Mlp mlp) : mlp_(std::move(mlp)) {}
  NodeId apply(Graph& g, std::span<const NodeId> args) const override;
  const Mlp& mlp() const { return mlp_; }

 private:
  Mlp mlp_;
};

class LambdaFunction final : public Function {
 public:
  using Fn = std::function<NodeId(Graph&, std::span<const NodeId>)>;
  explicit LambdaFunction(Fn fn) : fn_(std::move(fn)) {}
  NodeId apply(Graph& g, std::span<const NodeId> args) const override { return fn_(g, args); }

 private:
  Fn fn_;
};

/// Symbols of the language and their meaning: predicate and function
/// models, constant vectors, and the trainable parameters behind them.
struct Grounding {
  ParameterStore params;
  std::map<std::string, std::shared_ptr<const Predicate>> predicates;
  std::map<std::string, std::shared_ptr<const Function>> functions;
  std::map<std::string, Array> constants;

  /// Registers the MLP's parameters in `params`.
  void add_mlp_predicate(const std::string& name, const MlpSpec& spec, std::vector<std::string> labels = {});
  void add_mlp_function(const std::string& name, const MlpSpec& spec);
  void add_predicate(const std::string& name, std::shared_ptr<const Predicate> p);
  void add_function(const std::string& name, std::shared_ptr<const Function> f);
  /// Trainable constants are stored in `params` under their own name.
  void add_constant(const std::string& name, Array value, bool trainable = false);

  const Predicate& predicate(const std::string& name) const;
  const Function& function(const std::string& name) const;
  bool has_constant(const std::string& name) const;
};

/// A variable is a batch of individuals (n, d). Variables that share an
/// axis name are paired: individual i of one goes with individual i of
/// the other instead of ranging over the cross product.
struct VariableBinding {
  Array values;
  std::string axis;
};

class Bindings {
 public:
  void bind(const std::string& var, Array values);
  void bind_paired(const std::string& axis, const std::vector<std::pair<std::string, Array>>& vars);
  const VariableBinding* find(const std::string& var) const;
  const std::map<std::string, VariableBinding>& all() const { return vars_; }

 private:
  void insert(const std::string& var, Array values, std::string axis);
  std::map<std::string, VariableBinding> vars_;
};

}  // namespace ltn
