#include "ltn/kb/kb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "ltn/error.hpp"
#include "ltn/logic/truth_grid.hpp"
#include "ltn/tensor/adam.hpp"

namespace ltn {

namespace {

const std::string kAxiomAxis = "axiom";

// Variables a formula quantifies over or leaves free, excluding label
// names the predicate selects a column with.
void collect_variables(const Formula& f, const Grounding& grounding, std::vector<std::string>& out) {
  if (f.is_quantifier()) {
    out.insert(out.end(), f.vars().begin(), f.vars().end());
  }
  if (f.kind() == FormulaKind::Predicate) {
    const auto& labels = grounding.predicate(f.name()).labels();
    std::function<void(const Term&)> visit = [&](const Term& t) {
      if (t.kind == Term::Kind::Variable &&
          std::find(labels.begin(), labels.end(), t.name) == labels.end()) {
        out.push_back(t.name);
      }
      for (const auto& a : t.args) visit(a);
    };
    for (const auto& t : f.terms()) visit(t);
  }
  for (std::size_t i = 0; i < f.child_count(); ++i) collect_variables(f.child(i), grounding, out);
}

bool all_bound(const Formula& f, const Grounding& grounding, const Bindings& bindings) {
  std::vector<std::string> vars;
  collect_variables(f, grounding, vars);
  return std::all_of(vars.begin(), vars.end(), [&](const auto& v) { return bindings.find(v) != nullptr; });
}

}  // namespace

void KnowledgeBase::add_axiom(std::string name, Formula formula) {
  formula.validate();
  for (const auto& a : axioms) {
    if (a.name == name) throw LogicError("duplicate axiom name '" + name + "'");
  }
  axioms.push_back({std::move(name), std::move(formula)});
}

SatGraph build_satisfiability(Graph& g, const KnowledgeBase& kb, const Bindings& bindings, EvalMode mode,
                              bool skip_unbound) {
  if (kb.axioms.empty()) throw LogicError("knowledge base has no axioms");
  if (!(kb.axiom_aggregation_p >= 1.0)) throw LogicError("axiom aggregation p must be at least 1");
  SatGraph out;
  Evaluator ev(g, kb.grounding, bindings, kb.quantifier_config, mode);
  std::vector<NodeId> parts;
  for (std::size_t i = 0; i < kb.axioms.size(); ++i) {
    const auto& axiom = kb.axioms[i];
    if (skip_unbound && !all_bound(axiom.formula, kb.grounding, bindings)) continue;
    TruthGrid t = ev.eval(axiom.formula);
    if (!t.axes.empty()) {
      throw LogicError("axiom '" + axiom.name + "' is not closed: free axis '" + t.axes.front() + "'");
    }
    out.axiom_truth.push_back(t.node);
    out.used.push_back(i);
    parts.push_back(g.reshape(t.node, Shape{1}));
  }
  if (parts.empty()) {
    out.sat = g.scalar(1.0);
    return out;
  }
  const std::vector<std::string> over{kAxiomAxis};
  TruthGrid all{g.concat(parts), over};
  out.sat = aggregate_forall(g, all, over, kb.axiom_aggregation_p).node;
  return out;
}

double kb_satisfiability(const KnowledgeBase& kb, const Bindings& bindings) {
  Graph g(&kb.grounding.params);
  return g.value(build_satisfiability(g, kb, bindings).sat).item();
}

double query(const Grounding& grounding, const Formula& f, const Bindings& bindings, const QuantifierConfig& config) {
  Graph g(&grounding.params);
  TruthGrid t = eval_formula(g, f, grounding, bindings, config, EvalMode::Query);
  if (!t.axes.empty()) throw LogicError("query is not closed: free axis '" + t.axes.front() + "'");
  return g.value(t.node).item();
}

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::MultiLabel: return "multi-label";
    case TaskKind::SingleLabel: return "single-label";
    case TaskKind::Regression: return "regression";
  }
  return "?";
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  return {x.take_rows(rows), y.take_rows(rows)};
}

Bindings bind_dataset(const TaskSpec& task, const Dataset& data) {
  if (data.x.rank() != 2 || data.y.rank() != 2 || data.x.dim(0) != data.y.dim(0)) {
    throw ShapeError("dataset needs x (n, d) and y (n, k) with matching rows, got " + shape_string(data.x.shape()) +
                     " and " + shape_string(data.y.shape()));
  }
  Bindings b;
  if (task.kind == TaskKind::Regression) {
    b.bind_paired(task.pair_axis, {{task.input_var, data.x}, {task.target_var, data.y}});
    return b;
  }
  if (data.y.dim(1) != task.labels.size()) {
    throw ShapeError("dataset has " + std::to_string(data.y.dim(1)) + " label columns, task has " +
                     std::to_string(task.labels.size()) + " labels");
  }
  b.bind(task.input_var, data.x);
  for (std::size_t c = 0; c < task.labels.size(); ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < data.size(); ++r) {
      if (data.y.at(r, c) >= 0.5) rows.push_back(r);
    }
    if (!rows.empty()) b.bind(task.input_var + "_" + task.labels[c], data.x.take_rows(rows));
  }
  return b;
}

Array predict(const Grounding& grounding, const TaskSpec& task, const Array& x) {
  Graph g(&grounding.params);
  const NodeId in = g.input(task.input_var, x);
  const NodeId args[] = {in};
  if (task.kind == TaskKind::Regression) return g.value(grounding.function(task.model).apply(g, args));
  return g.value(grounding.predicate(task.model).apply(g, args));
}

double task_accuracy(const Grounding& grounding, const TaskSpec& task, const Dataset& data) {
  const Array pred = predict(grounding, task, data.x);
  switch (task.kind) {
    case TaskKind::MultiLabel: return hamming_accuracy(pred, data.y);
    case TaskKind::SingleLabel: return categorical_accuracy(pred, data.y);
    case TaskKind::Regression: return rmse_score(rmse(pred.data(), data.y.data()));
  }
  return 0.0;
}

MetricsLog train(KnowledgeBase& kb, const TaskSpec& task, const Dataset& train_data, const Dataset& test_data,
                 const TrainConfig& config) {
  if (config.batch_size == 0) throw Error("batch size must be at least 1");
  if (train_data.size() == 0) throw DataError("empty training set");
  std::vector<std::string> names;
  for (const auto& q : config.queries) {
    q.formula.validate();
    names.push_back(q.name);
  }
  MetricsLog log(names);
  const Bindings train_all = bind_dataset(task, train_data);
  const Bindings test_all = bind_dataset(task, test_data);

  auto record = [&](std::size_t epoch) {
    MetricsRecord r;
    r.epoch = epoch;
    r.sat_train = kb_satisfiability(kb, train_all);
    r.sat_test = kb_satisfiability(kb, test_all);
    r.acc_train = task_accuracy(kb.grounding, task, train_data);
    r.acc_test = task_accuracy(kb.grounding, task, test_data);
    for (const auto& q : config.queries) {
      r.queries.push_back(query(kb.grounding, q.formula, train_all, kb.quantifier_config));
    }
    if (!std::isfinite(r.sat_train) || !std::isfinite(r.sat_test)) {
      throw NumericError("satisfiability is not finite");
    }
    log.append(std::move(r));
  };

  std::size_t epoch = 0;
  try {
    record(0);
    Adam adam(AdamConfig{.learning_rate = config.learning_rate});
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_data.size());
    for (epoch = 1; epoch <= config.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const auto len = std::min(config.batch_size, order.size() - start);
        const Dataset batch = train_data.subset(std::span(order).subspan(start, len));
        const Bindings bindings = bind_dataset(task, batch);
        Graph g(&kb.grounding.params);
        SatGraph sg = build_satisfiability(g, kb, bindings, EvalMode::Train, true);
        if (sg.used.empty()) continue;
        const NodeId loss = g.one_minus(sg.sat);
        adam.step(kb.grounding.params, g.parameter_gradients(g.backward(loss)));
      }
      record(epoch);
    }
  } catch (const NumericError& e) {
    throw Error("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
  }
  return log;
}

}  // namespace ltn
