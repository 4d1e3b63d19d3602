#include "ltn/logic/eval.hpp"

#include <algorithm>

#include "ltn/error.hpp"

namespace ltn {

void QuantifierConfig::validate() const {
  if (!(p_train >= 1.0) || !(p_forall_query >= 1.0) || !(p_exists_query >= 1.0)) {
    throw LogicError("quantifier exponents must be at least 1");
  }
}

std::vector<std::string> variable_axes(const Bindings& bindings, const std::vector<std::string>& vars) {
  std::vector<std::string> axes;
  for (const auto& v : vars) {
    const auto* b = bindings.find(v);
    if (b == nullptr) throw LogicError("unbound variable '" + v + "'");
    if (std::find(axes.begin(), axes.end(), b->axis) == axes.end()) axes.push_back(b->axis);
  }
  return axes;
}

Evaluator::Evaluator(Graph& g, const Grounding& grounding, const Bindings& bindings, QuantifierConfig config,
                     EvalMode mode)
    : g_(g), grounding_(grounding), bindings_(bindings), config_(config), mode_(mode) {
  config_.validate();
}

Evaluator::TermValue Evaluator::variable(const std::string& name) {
  const auto* b = bindings_.find(name);
  if (b == nullptr) throw LogicError("unbound variable '" + name + "'");
  return {g_.input(name, b->values), {b->axis}};
}

Evaluator::TermValue Evaluator::eval_term(const Term& t) {
  const auto key = (t.kind == Term::Kind::Variable ? "v:" : "t:") + to_string(t);
  if (auto it = term_cache_.find(key); it != term_cache_.end()) return it->second;

  TermValue out;
  switch (t.kind) {
    case Term::Kind::Variable:
      out = variable(t.name);
      break;
    case Term::Kind::Constant: {
      if (auto it = grounding_.constants.find(t.name); it != grounding_.constants.end()) {
        out = {g_.constant(it->second), {}};
      } else if (grounding_.params.contains(t.name)) {
        out = {g_.parameter(t.name), {}};
      } else if (bindings_.find(t.name) != nullptr) {
        out = variable(t.name);
      } else {
        throw LogicError("unresolved constant '" + t.name + "'");
      }
      break;
    }
    case Term::Kind::Function: {
      const Function& fn = grounding_.function(t.name);
      std::vector<TermValue> args;
      for (const auto& a : t.args) args.push_back(eval_term(a));
      Aligned al = align(args);
      NodeId y = fn.apply(g_, al.flat);
      const Shape& ys = g_.shape(y);
      if (ys.size() != 2 || ys[0] != shape_size(al.extents)) {
        throw ShapeError("function '" + t.name + "' returned shape " + shape_string(ys));
      }
      Shape grid = al.extents;
      grid.push_back(ys[1]);
      out = {g_.reshape(y, grid), al.axes};
      break;
    }
  }
  term_cache_.emplace(key, out);
  return out;
}

Evaluator::Aligned Evaluator::align(const std::vector<TermValue>& values) {
  Aligned al;
  for (const auto& v : values) {
    const Shape& s = g_.shape(v.node);
    for (std::size_t i = 0; i < v.axes.size(); ++i) {
      auto it = std::find(al.axes.begin(), al.axes.end(), v.axes[i]);
      if (it == al.axes.end()) {
        al.axes.push_back(v.axes[i]);
        al.extents.push_back(s[i]);
      } else if (al.extents[static_cast<std::size_t>(it - al.axes.begin())] != s[i]) {
        throw ShapeError("axis '" + v.axes[i] + "' is bound to batches of different lengths");
      }
    }
  }
  const auto n = shape_size(al.extents);
  for (const auto& v : values) {
    const auto width = g_.shape(v.node).back();
    NodeId e = expand_to_axes(g_, v.node, v.axes, al.axes, al.extents, 1);
    al.flat.push_back(g_.reshape(e, Shape{n, width}));
  }
  return al;
}

TruthGrid Evaluator::eval_predicate(const Formula& f) {
  const Predicate& pred = grounding_.predicate(f.name());
  const auto& labels = pred.labels();

  std::optional<std::size_t> label_index;
  std::vector<const Term*> inputs;
  std::string key = f.name() + "(";
  for (const auto& t : f.terms()) {
    const bool label_like = t.kind == Term::Kind::Constant ||
                            (t.kind == Term::Kind::Variable && bindings_.find(t.name) == nullptr);
    if (label_like && !labels.empty()) {
      auto it = std::find(labels.begin(), labels.end(), t.name);
      if (it != labels.end()) {
        if (label_index) throw LogicError("predicate '" + f.name() + "' has more than one label argument");
        label_index = static_cast<std::size_t>(it - labels.begin());
        continue;
      }
    }
    inputs.push_back(&t);
    key += to_string(t) + ",";
  }
  key += ")";
  if (!labels.empty() && !label_index) {
    throw LogicError("predicate '" + f.name() + "' needs one of its class labels as an argument");
  }
  if (inputs.empty()) throw LogicError("predicate '" + f.name() + "' has no input arguments");

  auto it = predicate_cache_.find(key);
  if (it == predicate_cache_.end()) {
    std::vector<TermValue> args;
    for (const auto* t : inputs) args.push_back(eval_term(*t));
    Aligned al = align(args);
    NodeId out = pred.apply(g_, al.flat);
    const Shape& os = g_.shape(out);
    const auto n = shape_size(al.extents);
    const bool ok = labels.empty() ? (os == Shape{n}) : (os == Shape{n, labels.size()});
    if (!ok) throw ShapeError("predicate '" + f.name() + "' returned shape " + shape_string(os));
    for (double v : g_.value(out).data()) {
      if (!(v >= 0.0 && v <= 1.0)) throw LogicError("predicate '" + f.name() + "' produced a value outside [0, 1]");
    }
    it = predicate_cache_.emplace(key, Applied{out, al.axes, al.extents}).first;
  }
  const Applied& applied = it->second;
  NodeId flat = label_index ? g_.select(applied.out, *label_index) : applied.out;
  return {g_.reshape(flat, applied.extents), applied.axes};
}

TruthGrid Evaluator::eval_quantifier(const Formula& f) {
  TruthGrid body = eval(f.child(0));
  double p = 0.0;
  if (f.p()) {
    p = *f.p();
  } else if (mode_ == EvalMode::Train) {
    p = config_.p_train;
  } else {
    p = f.kind() == FormulaKind::Forall ? config_.p_forall_query : config_.p_exists_query;
  }
  // Variables that do not occur in the body leave it unchanged.
  std::vector<std::string> over;
  for (const auto& axis : variable_axes(bindings_, f.vars())) {
    if (std::find(body.axes.begin(), body.axes.end(), axis) != body.axes.end()) over.push_back(axis);
  }
  if (over.empty()) return body;
  return f.kind() == FormulaKind::Forall ? aggregate_forall(g_, body, over, p) : aggregate_exists(g_, body, over, p);
}

TruthGrid Evaluator::eval(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Predicate:
      return eval_predicate(f);
    case FormulaKind::Not:
      return apply_connective(g_, Connective::Not, eval(f.child(0)));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies: {
      const TruthGrid a = eval(f.child(0));
      const TruthGrid b = eval(f.child(1));
      const auto kind = f.kind() == FormulaKind::And  ? Connective::And
                        : f.kind() == FormulaKind::Or ? Connective::Or
                                                      : Connective::Implies;
      return apply_connective(g_, kind, a, &b);
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return eval_quantifier(f);
  }
  throw LogicError("unknown formula kind");
}

TruthGrid eval_formula(Graph& g, const Formula& f, const Grounding& grounding, const Bindings& bindings,
                       const QuantifierConfig& config, EvalMode mode) {
  f.validate();
  Evaluator ev(g, grounding, bindings, config, mode);
  return ev.eval(f);
}

}  // namespace ltn
