#pragma once

#include <map>
#include <string>
#include <vector>

#include "ltn/logic/formula.hpp"
#include "ltn/logic/grounding.hpp"
#include "ltn/logic/truth_grid.hpp"

namespace ltn {

struct QuantifierConfig {
  double p_train = 2.0;
  double p_forall_query = 4.0;
  double p_exists_query = 6.0;

  void validate() const;
};

enum class EvalMode { Train, Query };

/// Grounds formulas into one graph. Variable inputs, terms and predicate
/// applications are memoised per evaluator, so formulas evaluated through
/// the same evaluator share subgraphs (P(x, a) and P(x, b) run the network
/// for P once).
class Evaluator {
 public:
  Evaluator(Graph& g, const Grounding& grounding, const Bindings& bindings, QuantifierConfig config, EvalMode mode);

  TruthGrid eval(const Formula& f);

 private:
  struct TermValue {
    NodeId node;                     // (extents..., width)
    std::vector<std::string> axes;
  };
  struct Applied {
    NodeId out;  // (N,) or (N, C)
    std::vector<std::string> axes;
    Shape extents;
  };
  struct Aligned {
    std::vector<std::string> axes;
    Shape extents;
    std::vector<NodeId> flat;  // (N, width) per argument
  };

  TermValue eval_term(const Term& t);
  TermValue variable(const std::string& name);
  Aligned align(const std::vector<TermValue>& values);
  TruthGrid eval_predicate(const Formula& f);
  TruthGrid eval_quantifier(const Formula& f);

  Graph& g_;
  const Grounding& grounding_;
  const Bindings& bindings_;
  QuantifierConfig config_;
  EvalMode mode_;
  std::map<std::string, TermValue> term_cache_;
  std::map<std::string, Applied> predicate_cache_;
};

TruthGrid eval_formula(Graph& g, const Formula& f, const Grounding& grounding, const Bindings& bindings,
                       const QuantifierConfig& config, EvalMode mode);

/// Axis names of the variables a formula's quantifiers range over, for
/// the given bindings.
std::vector<std::string> variable_axes(const Bindings& bindings, const std::vector<std::string>& vars);

}  // namespace ltn
