#include "ltn/parser/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace ltn {

namespace {

std::string describe(const SourceSpan& span, const std::vector<std::string>& expected, const std::string& found) {
  std::string msg = "line " + std::to_string(span.line) + ", column " + std::to_string(span.column) + ": expected ";
  if (expected.size() > 1) msg += "one of ";
  for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
  return msg + " but found " + found;
}

enum class Tok { Ident, Number, LParen, RParen, Comma, Colon, Not, And, Or, Implies, Equals, Forall, Exists, End };

std::string tok_text(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Equals: return "'='";
    case Tok::Forall: return "'forall'";
    case Tok::Exists: return "'exists'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::size_t first_line) : src_(src), line_(first_line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = here();
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const auto start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance(1);
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = t.text == "forall" ? Tok::Forall : t.text == "exists" ? Tok::Exists : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const auto start = pos_;
        while (pos_ < src_.size()) {
          const char d = src_[pos_];
          const bool exp_sign = (d == '+' || d == '-') && pos_ > start && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E');
          if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' || exp_sign) {
            advance(1);
          } else {
            break;
          }
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (src_.substr(pos_, 2) == "->") {
        t.kind = Tok::Implies;
        t.text = "->";
        advance(2);
      } else if (auto u = unicode()) {
        t.kind = u->first;
        t.text = std::string(src_.substr(pos_, u->second));
        advance(u->second);
      } else {
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          case ':': t.kind = Tok::Colon; break;
          case '~': t.kind = Tok::Not; break;
          case '&': t.kind = Tok::And; break;
          case '|': t.kind = Tok::Or; break;
          case '=': t.kind = Tok::Equals; break;
          default:
            throw ParseError(t.span, {"a formula symbol"}, "'" + std::string(1, c) + "'");
        }
        t.text = std::string(1, c);
        advance(1);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  std::optional<std::pair<Tok, std::size_t>> unicode() const {
    static const std::pair<std::string_view, Tok> table[] = {
        {"∀", Tok::Forall}, {"∃", Tok::Exists}, {"¬", Tok::Not},
        {"∧", Tok::And},    {"∨", Tok::Or},     {"→", Tok::Implies},
    };
    for (const auto& [sym, kind] : table) {
      if (src_.substr(pos_, sym.size()) == sym) return std::make_pair(kind, sym.size());
    }
    return std::nullopt;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance(1);
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  SourceSpan here() const { return {line_, col_, pos_}; }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options) : toks_(std::move(tokens)), options_(options) {}

  Formula parse_all() {
    Formula f = formula();
    expect(Tok::End);
    return f;
  }

  /// Optional "name =" prefix of an axiom line.
  std::optional<std::string> label() {
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Equals) {
      std::string name = next().text;
      next();
      return name;
    }
    return std::nullopt;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.span, std::move(expected), found);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail({tok_text(kind)});
    return next();
  }

  Formula formula() {
    if (peek().kind == Tok::Forall || peek().kind == Tok::Exists) return quantified();
    return implication();
  }

  Formula quantified() {
    const bool universal = next().kind == Tok::Forall;
    std::vector<std::string> vars;
    for (;;) {
      const Token& t = expect(Tok::Ident);
      if (std::find(bound_.begin(), bound_.end(), t.text) != bound_.end() ||
          std::find(vars.begin(), vars.end(), t.text) != vars.end()) {
        throw ParseError(t.span, {"a variable not already bound"}, "'" + t.text + "'");
      }
      vars.push_back(t.text);
      if (peek().kind != Tok::Comma) break;
      next();
    }
    std::optional<double> p;
    if (peek().kind == Tok::Ident && peek().text == "p" && peek(1).kind == Tok::Equals) {
      next();
      next();
      const Token& num = peek();
      if (num.kind != Tok::Number) fail({"number"});
      double v = 0.0;
      const auto* first = num.text.data();
      const auto* last = first + num.text.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail({"number"});
      if (!(v >= 1.0)) throw ParseError(num.span, {"exponent >= 1"}, "'" + num.text + "'");
      next();
      p = v;
    }
    if (peek().kind != Tok::Colon) {
      fail(vars.size() == 1 && !p ? std::vector<std::string>{"','", "'p='", "':'"}
                                  : std::vector<std::string>{"':'"});
    }
    next();
    const auto mark = bound_.size();
    bound_.insert(bound_.end(), vars.begin(), vars.end());
    Formula body = formula();
    bound_.resize(mark);
    return universal ? Formula::forall(std::move(vars), std::move(body), p)
                     : Formula::exists(std::move(vars), std::move(body), p);
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      next();
      return Formula::implication(std::move(lhs), formula());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Or) {
      next();
      f = Formula::disjunction(std::move(f), conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (peek().kind == Tok::And) {
      next();
      f = Formula::conjunction(std::move(f), unary());
    }
    return f;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Not:
        next();
        return Formula::negation(unary());
      case Tok::LParen: {
        next();
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Forall:
      case Tok::Exists:
        return quantified();
      case Tok::Ident:
        return atom();
      default:
        fail({"'~'", "'('", "'forall'", "'exists'", "identifier"});
    }
  }

  Formula atom() {
    std::string name = next().text;
    expect(Tok::LParen);
    std::vector<Term> args = term_list();
    return Formula::predicate(std::move(name), std::move(args));
  }

  std::vector<Term> term_list() {
    std::vector<Term> args{term()};
    while (peek().kind == Tok::Comma) {
      next();
      args.push_back(term());
    }
    expect(Tok::RParen);
    return args;
  }

  Term term() {
    if (peek().kind != Tok::Ident) fail({"identifier"});
    std::string name = next().text;
    if (peek().kind == Tok::LParen) {
      next();
      return Term::function(std::move(name), term_list());
    }
    if (std::find(bound_.begin(), bound_.end(), name) != bound_.end()) return Term::variable(std::move(name));
    if (options_.constants.count(name)) return Term::constant(std::move(name));
    return Term::variable(std::move(name));
  }

  std::vector<Token> toks_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

// Binding strength; quantified formulas extend as far right as possible,
// so they are parenthesised whenever they are an operand.
int precedence(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Forall:
    case FormulaKind::Exists: return 0;
    case FormulaKind::Implies: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And: return 3;
    case FormulaKind::Not: return 4;
    case FormulaKind::Predicate: return 5;
  }
  return 0;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void format_into(const Formula& f, std::string& out);

void wrapped(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  format_into(f, out);
  if (parens) out += ')';
}

void format_into(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Predicate: {
      out += f.name() + "(";
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ", ";
        out += to_string(f.terms()[i]);
      }
      out += ')';
      return;
    }
    case FormulaKind::Not:
      out += '~';
      wrapped(f.child(0), precedence(f.child(0)) < 4, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      const int prec = precedence(f);
      wrapped(f.child(0), precedence(f.child(0)) < prec, out);
      out += f.kind() == FormulaKind::And ? " & " : " | ";
      wrapped(f.child(1), precedence(f.child(1)) <= prec, out);
      return;
    }
    case FormulaKind::Implies:
      wrapped(f.child(0), precedence(f.child(0)) <= 1, out);
      out += " -> ";
      wrapped(f.child(1), precedence(f.child(1)) < 1, out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      out += f.kind() == FormulaKind::Forall ? "forall " : "exists ";
      for (std::size_t i = 0; i < f.vars().size(); ++i) {
        if (i) out += ", ";
        out += f.vars()[i];
      }
      if (f.p()) out += " p=" + format_number(*f.p());
      out += ": ";
      format_into(f.child(0), out);
      return;
    }
  }
}

std::string strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return std::string(hash == std::string_view::npos ? line : line.substr(0, hash));
}

}  // namespace

ParseError::ParseError(SourceSpan span, std::vector<std::string> expected, std::string found)
    : Error(describe(span, expected, found)),
      span_(span),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  Parser parser(Lexer(text, options.first_line).run(), options);
  return parser.parse_all();
}

std::string format_formula(const Formula& f) {
  std::string out;
  format_into(f, out);
  return out;
}

std::vector<NamedFormula> parse_formula_list(std::string_view text, const ParseOptions& options) {
  std::vector<NamedFormula> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = options.first_line - 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (std::all_of(body.begin(), body.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    ParseOptions local = options;
    local.first_line = line_no;
    Parser parser(Lexer(body, line_no).run(), local);
    auto name = parser.label();
    if (name && std::any_of(out.begin(), out.end(), [&](const NamedFormula& n) { return n.name == *name; })) {
      throw ParseError(SourceSpan{line_no, 1, 0}, {"a new formula name"}, "duplicate name '" + *name + "'");
    }
    Formula f = parser.parse_all();
    out.push_back({name ? *name : "axiom" + std::to_string(out.size() + 1), std::move(f), line_no});
  }
  return out;
}

std::vector<NamedFormula> load_axiom_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read axiom file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_formula_list(ss.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(e.span(), e.expected(), e.found() + " in " + path.string());
  }
}

}  // namespace ltn
