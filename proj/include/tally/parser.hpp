#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tally/ast.hpp"
#include "tally/kb.hpp"
#include "tally/numbers.hpp"

namespace tally {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string file;
  int line = 0;
  int col = 0;
  std::string message;

  std::string to_string() const {
    std::string out = file + ":" + std::to_string(line) + ":" + std::to_string(col);
    out += severity == Severity::Error ? ": error: " : ": warning: ";
    out += message;
    return out;
  }
};

struct ParseOptions {
  // Sentences must be closed. Turn off to parse open formulas for
  // satisfaction-set queries.
  bool require_closed = true;
  // Field variables as statistical bounds are representable in the tree but
  // rejected in knowledge bases.
  bool allow_field_variable_bounds = false;
};

struct SentenceParse {
  FormulaPtr sentence;
  std::vector<Diagnostic> diagnostics;

  bool ok() const {
    if (!sentence) return false;
    for (const Diagnostic& d : diagnostics) {
      if (d.severity == Severity::Error) return false;
    }
    return true;
  }
};

struct KbParse {
  KnowledgeBase kb;
  std::vector<Diagnostic> diagnostics;

  bool ok() const {
    for (const Diagnostic& d : diagnostics) {
      if (d.severity == Severity::Error) return false;
    }
    return true;
  }
};

namespace detail {

enum class Tok {
  Ident,
  Number,
  Percent,
  LParen,
  RParen,
  Comma,
  Dot,
  Tilde,
  Amp,
  Pipe,
  Arrow,
  DArrow,
  Slash,
  End,
  Bad,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok t, std::string text, int l, int c) {
    out.push_back(Token{t, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      push(Tok::Ident, std::string(src.substr(i, j - i)), tl, tc);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      // A '.' continues the numeral only when a digit follows; otherwise it
      // is the statement terminator.
      if (j + 1 < src.size() && src[j] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      push(Tok::Number, std::string(src.substr(i, j - i)), tl, tc);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '%':
        push(Tok::Percent, "%", tl, tc);
        break;
      case '(':
        push(Tok::LParen, "(", tl, tc);
        break;
      case ')':
        push(Tok::RParen, ")", tl, tc);
        break;
      case ',':
        push(Tok::Comma, ",", tl, tc);
        break;
      case '.':
        push(Tok::Dot, ".", tl, tc);
        break;
      case '~':
        push(Tok::Tilde, "~", tl, tc);
        break;
      case '&':
        push(Tok::Amp, "&", tl, tc);
        break;
      case '|':
        push(Tok::Pipe, "|", tl, tc);
        break;
      case '/':
        push(Tok::Slash, "/", tl, tc);
        break;
      case '-':
        if (i + 1 < src.size() && src[i + 1] == '>') {
          push(Tok::Arrow, "->", tl, tc);
          ++i;
          ++col;
        } else {
          push(Tok::Bad, "-", tl, tc);
        }
        break;
      case '<':
        if (i + 2 < src.size() && src[i + 1] == '-' && src[i + 2] == '>') {
          push(Tok::DArrow, "<->", tl, tc);
          i += 2;
          col += 2;
        } else {
          push(Tok::Bad, std::string(1, c), tl, tc);
        }
        break;
      default:
        push(Tok::Bad, std::string(1, c), tl, tc);
        break;
    }
    ++i;
    ++col;
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::string file, ParseOptions options)
      : tokens_(lex(src)), file_(std::move(file)), options_(options) {}

  // One statement, optionally '.'-terminated, then end of input.
  SentenceParse run_single() {
    SentenceParse result;
    FormulaPtr f = parse_formula();
    if (f && peek().type == Tok::Dot) advance();
    if (f && peek().type != Tok::End) {
      error(peek(), "unexpected input after statement");
      f = nullptr;
    }
    if (f) check_sentence(*f, tokens_.front());
    result.sentence = f;
    result.diagnostics = std::move(diags_);
    return result;
  }

  KbParse run_kb() {
    KbParse result;
    SymbolScan scan;
    while (peek().type != Tok::End) {
      if (peek().type == Tok::Dot) {
        error(peek(), "empty statement");
        advance();
        continue;
      }
      Token start = peek();
      size_t errors_before = error_count_;
      FormulaPtr f = parse_formula();
      if (!f || error_count_ > errors_before) {
        recover();
        continue;
      }
      if (peek().type == Tok::Dot) {
        advance();
      } else {
        error(peek(), "expected '.' at end of statement");
        recover();
        continue;
      }
      bool good = check_sentence(*f, start);
      if (good) {
        try {
          scan.scan(*f);
        } catch (const Error& e) {
          error(start, e.what());
          good = false;
        }
      }
      if (good) {
        for (size_t i = 0; i < result.kb.size(); ++i) {
          if (equal(*result.kb.sentences[i], *f)) {
            warn(start, "duplicate of statement " + std::to_string(i + 1) +
                            " (" + result.kb.labels[i].file + ":" +
                            std::to_string(result.kb.labels[i].line) + ")");
            break;
          }
        }
        result.kb.add(f, SourceLabel{file_, start.line});
      }
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    if (i >= tokens_.size()) i = tokens_.size() - 1;
    return tokens_[i];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  void error(const Token& at, std::string message) {
    diags_.push_back(
        Diagnostic{Severity::Error, file_, at.line, at.col, std::move(message)});
    ++error_count_;
  }
  void warn(const Token& at, std::string message) {
    diags_.push_back(
        Diagnostic{Severity::Warning, file_, at.line, at.col, std::move(message)});
  }

  void recover() {
    while (peek().type != Tok::End && peek().type != Tok::Dot) advance();
    if (peek().type == Tok::Dot) advance();
  }

  bool expect(Tok type, const char* what) {
    if (peek().type == type) {
      advance();
      return true;
    }
    error(peek(), std::string("expected ") + what);
    return false;
  }

  bool check_sentence(const Formula& f, const Token& at) {
    bool good = true;
    if (options_.require_closed) {
      auto fv = free_object_vars(f);
      if (!fv.empty()) {
        std::string names;
        for (const std::string& v : fv) {
          if (!names.empty()) names += ", ";
          names += "'" + v + "'";
        }
        error(at, "sentence leaves object variable " + names + " free");
        good = false;
      }
    }
    return good;
  }

  FormulaPtr parse_formula() { return parse_iff(); }

  FormulaPtr parse_iff() {
    FormulaPtr left = parse_implies();
    if (!left) return nullptr;
    if (peek().type == Tok::DArrow) {
      advance();
      FormulaPtr right = parse_iff();
      if (!right) return nullptr;
      return Formula::biconditional(std::move(left), std::move(right));
    }
    return left;
  }

  FormulaPtr parse_implies() {
    FormulaPtr left = parse_or();
    if (!left) return nullptr;
    if (peek().type == Tok::Arrow) {
      advance();
      FormulaPtr right = parse_implies();
      if (!right) return nullptr;
      return Formula::implication(std::move(left), std::move(right));
    }
    return left;
  }

  FormulaPtr parse_or() {
    FormulaPtr left = parse_and();
    if (!left) return nullptr;
    while (peek().type == Tok::Pipe) {
      advance();
      FormulaPtr right = parse_and();
      if (!right) return nullptr;
      left = Formula::disjunction(std::move(left), std::move(right));
    }
    return left;
  }

  FormulaPtr parse_and() {
    FormulaPtr left = parse_unary();
    if (!left) return nullptr;
    while (peek().type == Tok::Amp) {
      advance();
      FormulaPtr right = parse_unary();
      if (!right) return nullptr;
      left = Formula::conjunction(std::move(left), std::move(right));
    }
    return left;
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Tilde: {
        advance();
        FormulaPtr body = parse_unary();
        if (!body) return nullptr;
        return Formula::negation(std::move(body));
      }
      case Tok::LParen: {
        advance();
        FormulaPtr body = parse_formula();
        if (!body) return nullptr;
        if (!expect(Tok::RParen, "')'")) return nullptr;
        return body;
      }
      case Tok::Percent:
        return parse_stat();
      case Tok::Ident:
        if (t.text == "forall" || t.text == "exists") return parse_quantifier();
        if (std::isupper(static_cast<unsigned char>(t.text[0]))) return parse_atom();
        error(t, "expected a formula; '" + t.text +
                     "' names a term (predicates start with an uppercase letter)");
        return nullptr;
      default:
        error(t, "expected a formula");
        return nullptr;
    }
  }

  FormulaPtr parse_quantifier() {
    Token kw = advance();
    const Token& v = peek();
    if (v.type != Tok::Ident || !is_variable_name(v.text)) {
      error(v, kw.text + " must bind an object variable (a name u..z, "
                         "optionally followed by digits)");
      return nullptr;
    }
    advance();
    FormulaPtr body = parse_unary();
    if (!body) return nullptr;
    if (kw.text == "forall") return Formula::forall(v.text, std::move(body));
    return Formula::exists(v.text, std::move(body));
  }

  FormulaPtr parse_atom() {
    Token name = advance();
    std::vector<Term> terms;
    if (peek().type == Tok::LParen) {
      advance();
      while (true) {
        std::optional<Term> t = parse_term();
        if (!t) return nullptr;
        terms.push_back(std::move(*t));
        if (peek().type == Tok::Comma) {
          advance();
          continue;
        }
        break;
      }
      if (!expect(Tok::RParen, "')'")) return nullptr;
    }
    return Formula::atom(name.text, std::move(terms));
  }

  std::optional<Term> parse_term() {
    const Token& t = peek();
    if (t.type != Tok::Ident) {
      error(t, "expected a term");
      return std::nullopt;
    }
    if (std::isupper(static_cast<unsigned char>(t.text[0]))) {
      error(t, "predicate '" + t.text + "' used as a term");
      return std::nullopt;
    }
    Token name = advance();
    if (peek().type == Tok::LParen) {
      advance();
      std::vector<Term> args;
      while (true) {
        std::optional<Term> a = parse_term();
        if (!a) return std::nullopt;
        args.push_back(std::move(*a));
        if (peek().type == Tok::Comma) {
          advance();
          continue;
        }
        break;
      }
      if (!expect(Tok::RParen, "')'")) return std::nullopt;
      return Term::function(name.text, std::move(args));
    }
    if (is_variable_name(name.text)) return Term::variable(name.text);
    return Term::constant(name.text);
  }

  FormulaPtr parse_stat() {
    Token pct = advance();
    if (!expect(Tok::LParen, "'(' after '%'")) return nullptr;
    FormulaPtr target = parse_formula();
    if (!target) return nullptr;
    if (!expect(Tok::Comma, "','")) return nullptr;
    FormulaPtr reference = parse_formula();
    if (!reference) return nullptr;
    if (!expect(Tok::Comma, "','")) return nullptr;
    std::optional<Bound> lo = parse_bound();
    if (!lo) return nullptr;
    if (!expect(Tok::Comma, "','")) return nullptr;
    std::optional<Bound> hi = parse_bound();
    if (!hi) return nullptr;
    if (!expect(Tok::RParen, "')'")) return nullptr;

    bool good = check_component(*target, pct, "target");
    good = check_component(*reference, pct, "reference") && good;
    if (!lo->is_variable() && !hi->is_variable() && lo->value > hi->value) {
      error(pct, "statistical bounds out of order: " + to_text(lo->value) +
                     " > " + to_text(hi->value));
      good = false;
    }
    if (!good) return nullptr;
    return Formula::stat(std::move(target), std::move(reference), std::move(*lo),
                         std::move(*hi));
  }

  bool check_component(const Formula& f, const Token& at, const char* role) {
    bool good = true;
    if (contains_stat(f)) {
      error(at, std::string("statistical atoms cannot nest (in ") + role + ")");
      good = false;
    }
    if (contains_quantifier(f)) {
      error(at, std::string(role) + " of a statistical atom must be quantifier-free");
      good = false;
    }
    if (good && free_object_vars(f).empty()) {
      error(at, std::string(role) +
                    " of a statistical atom must be an open formula (no free "
                    "object variable found)");
      good = false;
    }
    return good;
  }

  std::optional<Bound> parse_bound() {
    const Token& t = peek();
    if (t.type == Tok::Ident) {
      if (!options_.allow_field_variable_bounds) {
        error(t, "statistical bounds must be numerals in [0, 1]");
        return std::nullopt;
      }
      if (!is_variable_name(t.text)) {
        error(t, "field variable bounds follow the u..z naming convention");
        return std::nullopt;
      }
      advance();
      return Bound::variable(t.text);
    }
    if (t.type != Tok::Number) {
      error(t, "expected a numeral bound");
      return std::nullopt;
    }
    Token first = advance();
    std::string text = first.text;
    if (peek().type == Tok::Slash) {
      advance();
      if (peek().type != Tok::Number) {
        error(peek(), "expected a denominator after '/'");
        return std::nullopt;
      }
      text += "/" + advance().text;
    }
    std::optional<Rational> value = parse_numeral(text);
    if (!value) {
      error(first, "malformed numeral '" + text + "'");
      return std::nullopt;
    }
    if (!in_unit_interval(*value)) {
      error(first, "bound " + text + " lies outside [0, 1]");
      return std::nullopt;
    }
    return Bound::literal(std::move(*value));
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  std::string file_;
  ParseOptions options_;
  std::vector<Diagnostic> diags_;
  size_t error_count_ = 0;
};

}  // namespace detail

inline SentenceParse parse_sentence(std::string_view text,
                                    const std::string& file = "<input>",
                                    ParseOptions options = {}) {
  detail::Parser p(text, file, options);
  return p.run_single();
}

inline KbParse parse_kb(std::string_view text, const std::string& file = "<kb>") {
  detail::Parser p(text, file, ParseOptions{});
  return p.run_kb();
}

// Convenience for fixtures and tests: parse or die.
inline FormulaPtr must_parse(std::string_view text, ParseOptions options = {}) {
  SentenceParse r = parse_sentence(text, "<must>", options);
  if (!r.ok()) {
    std::string msg = "parse failed for: " + std::string(text);
    for (const Diagnostic& d : r.diagnostics) msg += "\n  " + d.to_string();
    throw InvalidArgument(msg);
  }
  return r.sentence;
}

inline KnowledgeBase must_parse_kb(std::string_view text,
                                   const std::string& file = "<kb>") {
  KbParse r = parse_kb(text, file);
  if (!r.ok()) {
    std::string msg = "knowledge base parse failed";
    for (const Diagnostic& d : r.diagnostics) msg += "\n  " + d.to_string();
    throw InvalidArgument(msg);
  }
  return r.kb;
}

}  // namespace tally
