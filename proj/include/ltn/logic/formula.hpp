#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ltn {

struct Term {
  enum class Kind { Variable, Constant, Function };

  Kind kind = Kind::Variable;
  std::string name;
  std::vector<Term> args;  // Function only

  static Term variable(std::string name) { return {Kind::Variable, std::move(name), {}}; }
  static Term constant(std::string name) { return {Kind::Constant, std::move(name), {}}; }
  static Term function(std::string name, std::vector<Term> args) {
    return {Kind::Function, std::move(name), std::move(args)};
  }

  friend bool operator==(const Term&, const Term&) = default;
};

std::string to_string(const Term& t);

enum class FormulaKind { Predicate, Not, And, Or, Implies, Forall, Exists };

/// Immutable formula tree with shared subtrees.
class Formula {
 public:
  static Formula predicate(std::string name, std::vector<Term> args);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula implication(Formula a, Formula b);
  /// `p` overrides the configured aggregation exponent when present.
  static Formula forall(std::vector<std::string> vars, Formula body, std::optional<double> p = {});
  static Formula exists(std::vector<std::string> vars, Formula body, std::optional<double> p = {});

  FormulaKind kind() const;
  const std::string& name() const;        // Predicate
  const std::vector<Term>& terms() const; // Predicate
  std::size_t child_count() const;
  const Formula& child(std::size_t i) const;
  const std::vector<std::string>& vars() const;  // Forall / Exists
  std::optional<double> p() const;               // Forall / Exists
  bool is_quantifier() const { return kind() == FormulaKind::Forall || kind() == FormulaKind::Exists; }

  /// Variables not bound by an enclosing quantifier, in first-use order.
  std::vector<std::string> free_variables() const;
  std::size_t depth() const;

  /// Throws LogicError when a quantifier repeats a variable or rebinds one
  /// already bound on the same path, or when p < 1.
  void validate() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace ltn
