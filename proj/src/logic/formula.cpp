#include "ltn/logic/formula.hpp"

#include <algorithm>

#include "ltn/error.hpp"

namespace ltn {

struct Formula::Node {
  FormulaKind kind = FormulaKind::Predicate;
  std::string name;
  std::vector<Term> terms;
  std::vector<Formula> children;
  std::vector<std::string> vars;
  std::optional<double> p;
};

std::string to_string(const Term& t) {
  if (t.kind != Term::Kind::Function) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(t.args[i]);
  }
  return out + ")";
}

Formula Formula::predicate(std::string name, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Predicate;
  n->name = std::move(name);
  n->terms = std::move(args);
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Not;
  n->children = {std::move(f)};
  return Formula(std::move(n));
}

Formula Formula::conjunction(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::And;
  n->children = {std::move(a), std::move(b)};
  return Formula(std::move(n));
}

Formula Formula::disjunction(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Or;
  n->children = {std::move(a), std::move(b)};
  return Formula(std::move(n));
}

Formula Formula::implication(Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Implies;
  n->children = {std::move(a), std::move(b)};
  return Formula(std::move(n));
}

Formula Formula::forall(std::vector<std::string> vars, Formula body, std::optional<double> p) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Forall;
  n->vars = std::move(vars);
  n->children = {std::move(body)};
  n->p = p;
  return Formula(std::move(n));
}

Formula Formula::exists(std::vector<std::string> vars, Formula body, std::optional<double> p) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Exists;
  n->vars = std::move(vars);
  n->children = {std::move(body)};
  n->p = p;
  return Formula(std::move(n));
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
std::size_t Formula::child_count() const { return node_->children.size(); }
const Formula& Formula::child(std::size_t i) const { return node_->children.at(i); }
const std::vector<std::string>& Formula::vars() const { return node_->vars; }
std::optional<double> Formula::p() const { return node_->p; }

namespace {

void collect_term_vars(const Term& t, const std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (t.kind == Term::Kind::Variable) {
    if (std::find(bound.begin(), bound.end(), t.name) == bound.end() &&
        std::find(out.begin(), out.end(), t.name) == out.end()) {
      out.push_back(t.name);
    }
  }
  for (const auto& a : t.args) collect_term_vars(a, bound, out);
}

void collect_free(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (f.kind() == FormulaKind::Predicate) {
    for (const auto& t : f.terms()) collect_term_vars(t, bound, out);
    return;
  }
  const auto mark = bound.size();
  if (f.is_quantifier()) bound.insert(bound.end(), f.vars().begin(), f.vars().end());
  for (std::size_t i = 0; i < f.child_count(); ++i) collect_free(f.child(i), bound, out);
  bound.resize(mark);
}

void validate_node(const Formula& f, std::vector<std::string>& bound) {
  if (f.kind() == FormulaKind::Predicate) {
    if (f.name().empty()) throw LogicError("predicate with empty name");
    return;
  }
  const auto mark = bound.size();
  if (f.is_quantifier()) {
    if (f.vars().empty()) throw LogicError("quantifier binds no variables");
    if (f.p() && !(*f.p() >= 1.0)) throw LogicError("quantifier exponent must be at least 1");
    for (const auto& v : f.vars()) {
      if (std::find(bound.begin(), bound.end(), v) != bound.end()) {
        throw LogicError("variable '" + v + "' is bound twice on one path");
      }
      bound.push_back(v);
    }
  }
  for (std::size_t i = 0; i < f.child_count(); ++i) validate_node(f.child(i), bound);
  bound.resize(mark);
}

}  // namespace

std::vector<std::string> Formula::free_variables() const {
  std::vector<std::string> bound, out;
  collect_free(*this, bound, out);
  return out;
}

std::size_t Formula::depth() const {
  std::size_t d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth());
  return d + 1;
}

void Formula::validate() const {
  std::vector<std::string> bound;
  validate_node(*this, bound);
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.name == y.name && x.terms == y.terms && x.vars == y.vars && x.p == y.p &&
         x.children == y.children;
}

}  // namespace ltn
