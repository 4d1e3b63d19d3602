#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltn/error.hpp"
#include "ltn/logic/formula.hpp"

namespace ltn {

struct SourceSpan {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
  std::size_t offset = 0;  // byte offset into the input
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, std::vector<std::string> expected, std::string found);

  const SourceSpan& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
  std::string found_;
};

struct ParseOptions {
  /// Unbound identifiers in argument position that appear here (class
  /// labels, declared constants) parse as constants; any other unbound
  /// identifier is a free variable.
  std::set<std::string> constants;
  /// Added to reported line numbers (for multi-line sources).
  std::size_t first_line = 1;
};

/// Grammar:
///   formula := quant formula | implies
///   quant   := ("forall" | "exists") ident ("," ident)* ["p" "=" number] ":"
///   implies := or ["->" formula]          (right-associative)
///   or      := and ("|" and)*
///   and     := unary ("&" unary)*
///   unary   := "~" unary | "(" formula ")" | quant formula | atom
///   atom    := ident "(" term ("," term)* ")"
///   term    := ident ["(" term ("," term)* ")"]
/// The symbols ∀ ∃ ¬ ∧ ∨ → are accepted as alternatives.
Formula parse_formula(std::string_view text, const ParseOptions& options = {});

/// Canonical text: minimal parentheses, ", " between arguments, single
/// spaces around binary operators, quantified sub-formulas parenthesised.
std::string format_formula(const Formula& f);

struct NamedFormula {
  std::string name;
  Formula formula;
  std::size_t line = 0;
};

/// One formula per line; "#" starts a comment; blank lines are skipped.
/// A line may start with "name =" to label the formula, otherwise it is
/// named "axiom<k>" (k counting from 1).
std::vector<NamedFormula> parse_formula_list(std::string_view text, const ParseOptions& options = {});
std::vector<NamedFormula> load_axiom_file(const std::filesystem::path& path, const ParseOptions& options = {});

}  // namespace ltn
