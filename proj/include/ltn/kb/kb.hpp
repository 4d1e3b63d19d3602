#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltn/logic/eval.hpp"
#include "ltn/logic/formula.hpp"
#include "ltn/logic/grounding.hpp"
#include "ltn/metrics/metrics.hpp"
#include "ltn/tensor/graph.hpp"

namespace ltn {

struct Axiom {
  std::string name;
  Formula formula;
};

struct KnowledgeBase {
  std::vector<Axiom> axioms;
  Grounding grounding;
  QuantifierConfig quantifier_config;
  double axiom_aggregation_p = 2.0;

  /// Validates the formula and rejects duplicate names.
  void add_axiom(std::string name, Formula formula);
};

struct SatGraph {
  NodeId sat;                      // scalar
  std::vector<NodeId> axiom_truth; // scalar per evaluated axiom
  std::vector<std::size_t> used;   // indices into kb.axioms
};

/// Grounds every axiom in `g` and combines the axiom truths with
/// 1 - (mean (1 - a_i)^p)^(1/p), p = axiom_aggregation_p. With
/// `skip_unbound`, axioms mentioning a variable missing from `bindings`
/// are left out (a mini-batch without any sample of some class); if
/// nothing is left the result has no `used` entries and `sat` is 1.
SatGraph build_satisfiability(Graph& g, const KnowledgeBase& kb, const Bindings& bindings,
                              EvalMode mode = EvalMode::Train, bool skip_unbound = false);

double kb_satisfiability(const KnowledgeBase& kb, const Bindings& bindings);

/// Truth of a closed formula in query mode. Never touches parameters.
double query(const Grounding& grounding, const Formula& f, const Bindings& bindings,
             const QuantifierConfig& config);

enum class TaskKind { MultiLabel, SingleLabel, Regression };

std::string to_string(TaskKind k);

/// How a dataset is bound to the variables of a KB and how the trained
/// model is read back out. Classification binds `input_var` to every row
/// and `<input_var>_<label>` to the rows of each class; regression binds
/// `input_var` and `target_var` paired on one axis.
struct TaskSpec {
  TaskKind kind = TaskKind::MultiLabel;
  std::string model = "P";  // class predicate, or regression function
  std::vector<std::string> labels;
  std::string input_var = "x";
  std::string target_var = "y";
  std::string pair_axis = "sample";
};

struct Dataset {
  Array x;  // (n, d)
  Array y;  // (n, C) 0/1 labels, or (n, 1) targets

  std::size_t size() const { return x.rank() == 0 ? 0 : x.dim(0); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

Bindings bind_dataset(const TaskSpec& task, const Dataset& data);

/// Class memberships (n, C) or regression outputs (n, 1).
Array predict(const Grounding& grounding, const TaskSpec& task, const Array& x);

/// Hamming accuracy for multi-label, argmax accuracy for single-label,
/// max(0, 1 - rmse) for regression.
double task_accuracy(const Grounding& grounding, const TaskSpec& task, const Dataset& data);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double learning_rate = 0.001;
  std::uint64_t seed = 0;
  std::vector<Axiom> queries;
};

/// Mini-batch Adam on 1 - satisfiability. Records epoch 0 before any
/// update, then one record per epoch: satisfiability of the full train
/// and test sets, task accuracy, and each query's truth on the train set.
/// Throws Error naming the epoch if training diverges.
MetricsLog train(KnowledgeBase& kb, const TaskSpec& task, const Dataset& train_data, const Dataset& test_data,
                 const TrainConfig& config);

}  // namespace ltn
