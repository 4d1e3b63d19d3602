#include "ltn/logic/grounding.hpp"

#include "ltn/error.hpp"

namespace ltn {

MlpPredicate::MlpPredicate(Mlp mlp, std::vector<std::string> labels)
    : mlp_(std::move(mlp)), labels_(std::move(labels)) {
  const auto expected = labels_.empty() ? 1 : labels_.size();
  if (mlp_.spec().output_dim != expected) {
    throw LogicError("predicate '" + mlp_.name() + "': MLP has " + std::to_string(mlp_.spec().output_dim) +
                     " outputs, expected " + std::to_string(expected));
  }
  if (mlp_.spec().output_activation == Activation::Identity) {
    throw LogicError("predicate '" + mlp_.name() + "': output must be squashed into [0, 1]");
  }
}

NodeId MlpPredicate::apply(Graph& g, std::span<const NodeId> args) const {
  NodeId input = args.size() == 1 ? args[0] : g.concat(args);
  NodeId out = mlp_.forward(g, input);
  return labels_.empty() ? g.select(out, 0) : out;
}

NodeId MlpFunction::apply(Graph& g, std::span<const NodeId> args) const {
  NodeId input = args.size() == 1 ? args[0] : g.concat(args);
  return mlp_.forward(g, input);
}

void Grounding::add_mlp_predicate(const std::string& name, const MlpSpec& spec, std::vector<std::string> labels) {
  Mlp mlp(name, spec);
  auto p = std::make_shared<MlpPredicate>(mlp, std::move(labels));
  mlp.register_params(params);
  add_predicate(name, std::move(p));
}

void Grounding::add_mlp_function(const std::string& name, const MlpSpec& spec) {
  Mlp mlp(name, spec);
  mlp.register_params(params);
  add_function(name, std::make_shared<MlpFunction>(std::move(mlp)));
}

void Grounding::add_predicate(const std::string& name, std::shared_ptr<const Predicate> p) {
  if (!predicates.emplace(name, std::move(p)).second) throw LogicError("predicate '" + name + "' defined twice");
}

void Grounding::add_function(const std::string& name, std::shared_ptr<const Function> f) {
  if (!functions.emplace(name, std::move(f)).second) throw LogicError("function '" + name + "' defined twice");
}

void Grounding::add_constant(const std::string& name, Array value, bool trainable) {
  if (has_constant(name)) throw LogicError("constant '" + name + "' defined twice");
  if (value.rank() != 1) throw ShapeError("constant '" + name + "' must be a vector");
  if (trainable) {
    params.add(name, std::move(value));
  } else {
    constants.emplace(name, std::move(value));
  }
}

const Predicate& Grounding::predicate(const std::string& name) const {
  auto it = predicates.find(name);
  if (it == predicates.end()) throw LogicError("unresolved predicate '" + name + "'");
  return *it->second;
}

const Function& Grounding::function(const std::string& name) const {
  auto it = functions.find(name);
  if (it == functions.end()) throw LogicError("unresolved function '" + name + "'");
  return *it->second;
}

bool Grounding::has_constant(const std::string& name) const {
  return constants.count(name) != 0 || params.contains(name);
}

void Bindings::insert(const std::string& var, Array values, std::string axis) {
  if (values.rank() == 1) values = values.reshaped(Shape{values.dim(0), 1});
  if (values.rank() != 2) throw ShapeError("variable '" + var + "' must be bound to an (n, d) batch");
  if (values.dim(0) == 0) throw LogicError("variable '" + var + "' is bound to an empty batch");
  vars_.insert_or_assign(var, VariableBinding{std::move(values), std::move(axis)});
}

void Bindings::bind(const std::string& var, Array values) { insert(var, std::move(values), var); }

void Bindings::bind_paired(const std::string& axis, const std::vector<std::pair<std::string, Array>>& vars) {
  if (vars.empty()) return;
  const auto n = vars.front().second.rank() ? vars.front().second.dim(0) : 0;
  for (const auto& [name, values] : vars) {
    if (values.rank() == 0 || values.dim(0) != n) {
      throw ShapeError("paired variables on axis '" + axis + "' must have equal batch lengths");
    }
  }
  for (const auto& [name, values] : vars) insert(name, values, axis);
}

const VariableBinding* Bindings::find(const std::string& var) const {
  auto it = vars_.find(var);
  return it == vars_.end() ? nullptr : &it->second;
}

}  // namespace ltn
