#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "tally/ast.hpp"
#include "tally/kb.hpp"
#include "tally/numbers.hpp"
#include "tally/parser.hpp"

using namespace tally;

TEST_CASE("numerals parse to exact rationals") {
  CHECK(*parse_numeral("17") == Rational(17));
  CHECK(*parse_numeral("4/5") == Rational(4, 5));
  CHECK(*parse_numeral("0.8") == Rational(4, 5));
  CHECK(*parse_numeral("0.125") == Rational(1, 8));
  CHECK(*parse_numeral("0.49") == Rational(49, 100));
  CHECK(*parse_numeral("1") == Rational(1));
  CHECK(*parse_numeral("0") == Rational(0));
  CHECK(*parse_numeral("10/4") == Rational(5, 2));

  CHECK_FALSE(parse_numeral("4/0").has_value());
  CHECK_FALSE(parse_numeral("").has_value());
  CHECK_FALSE(parse_numeral("x").has_value());
  CHECK_FALSE(parse_numeral("1.2.3").has_value());
  CHECK_FALSE(parse_numeral(".5").has_value());
}

TEST_CASE("identifiers split into variables and constants by spelling") {
  for (const char* v : {"u", "v", "w", "x", "y", "z", "x1", "z42", "u007"}) {
    CHECK(is_variable_name(v));
  }
  for (const char* c : {"a", "b", "c", "t1", "t2", "s", "ball", "xy", "x1a", "uu"}) {
    CHECK_FALSE(is_variable_name(c));
  }
}

TEST_CASE("canonical sentences survive a print and parse round trip") {
  const std::vector<std::string> sentences = {
      "P(a)",
      "~P(a)",
      "~~P(a)",
      "P(a) & Q(a) & R(a)",
      "P(a) | Q(a) & R(a)",
      "(P(a) | Q(a)) & R(a)",
      "P(a) -> Q(a) -> R(a)",
      "(P(a) -> Q(a)) -> R(a)",
      "P(a) <-> Q(b)",
      "forall x (P(x) -> Q(x))",
      "forall x exists y R(x, y)",
      "exists y (P(y) | Q(y))",
      "forall x P(x) & Q(a)",
      "~(W(t1) & W(t2))",
      "%(A(x), B(x), 4/5, 9/10)",
      "%(A(x) & B(x), C(x), 0, 1/2)",
      "Bp(a)",
  };
  for (const std::string& text : sentences) {
    CAPTURE(text);
    FormulaPtr f = must_parse(text);
    CHECK(to_text(f) == text);
    CHECK(equal(must_parse(to_text(f)), f));
  }
}

TEST_CASE("operator precedence and quantifier scope") {
  FormulaPtr f = must_parse("P(a) | Q(a) & R(a)");
  REQUIRE(f->kind == FormulaKind::Or);
  CHECK(f->rhs->kind == FormulaKind::And);

  f = must_parse("P(a) -> Q(a) -> R(a)");
  REQUIRE(f->kind == FormulaKind::Implies);
  CHECK(f->lhs->kind == FormulaKind::Atom);
  CHECK(f->rhs->kind == FormulaKind::Implies);

  f = must_parse("P(a) <-> Q(a) -> R(a)");
  REQUIRE(f->kind == FormulaKind::Iff);
  CHECK(f->rhs->kind == FormulaKind::Implies);

  f = must_parse("forall x P(x) & Q(a)");
  REQUIRE(f->kind == FormulaKind::And);
  CHECK(f->lhs->kind == FormulaKind::Forall);

  f = must_parse("~P(a) & Q(a)");
  REQUIRE(f->kind == FormulaKind::And);
  CHECK(f->lhs->kind == FormulaKind::Not);
}

TEST_CASE("statistical bounds accept decimals and fractions, exactly") {
  FormulaPtr f = must_parse("%(A(x), B(x), 0.8, 0.9)");
  REQUIRE(f->kind == FormulaKind::Stat);
  CHECK(f->lo.value == Rational(4, 5));
  CHECK(f->hi.value == Rational(9, 10));
  CHECK_FALSE(f->lo.is_variable());

  f = must_parse("%(A(x), B(x), 49/100, 51/100)");
  CHECK(f->lo.value == Rational(49, 100));
  CHECK(f->hi.value == Rational(51, 100));
}

TEST_CASE("malformed statistical atoms are diagnosed") {
  auto first_error = [](const std::string& text) {
    SentenceParse p = parse_sentence(text);
    REQUIRE_FALSE(p.ok());
    REQUIRE_FALSE(p.diagnostics.empty());
    return p.diagnostics.front().message;
  };

  CHECK_THAT(first_error("%(A(x), B(x), 2/3, 1/3)"),
             Catch::Matchers::ContainsSubstring("bounds"));
  CHECK_THAT(first_error("%(A(x), B(x), 1/2, 3/2)"),
             Catch::Matchers::ContainsSubstring("outside [0, 1]"));
  CHECK_THAT(first_error("%(A(x), B(x), 4/0, 1)"),
             Catch::Matchers::ContainsSubstring("numeral"));
  CHECK_THAT(first_error("%(A(a), B(x), 0, 1)"),
             Catch::Matchers::ContainsSubstring("open"));
  CHECK_THAT(first_error("%(forall y R(x, y), B(x), 0, 1)"),
             Catch::Matchers::ContainsSubstring("quantifier"));
  CHECK_THAT(first_error("%(%(A(x), B(x), 0, 1), C(x), 0, 1)"),
             Catch::Matchers::ContainsSubstring("nest"));
}

TEST_CASE("sentences must be closed") {
  SentenceParse p = parse_sentence("P(x)");
  REQUIRE_FALSE(p.ok());
  CHECK_THAT(p.diagnostics.front().message,
             Catch::Matchers::ContainsSubstring("free"));
}

TEST_CASE("arity clashes are reported with their source position") {
  KbParse p = parse_kb("P(a).\nP(a, b).\n", "clash.kb");
  REQUIRE_FALSE(p.ok());
  bool found = false;
  for (const Diagnostic& d : p.diagnostics) {
    if (d.severity != Severity::Error) continue;
    std::string rendered = d.to_string();
    if (rendered.find("clash.kb:2") != std::string::npos &&
        rendered.find("arity") != std::string::npos) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("duplicate statements warn but still parse") {
  KbParse p = parse_kb("P(a).\nQ(b).\nP(a).\n", "dup.kb");
  CHECK(p.ok());
  CHECK(p.kb.size() == 3);
  bool warned = false;
  for (const Diagnostic& d : p.diagnostics) {
    if (d.severity == Severity::Warning &&
        d.message.find("duplicate") != std::string::npos) {
      warned = true;
    }
  }
  CHECK(warned);
}

TEST_CASE("the parser recovers at statement boundaries") {
  KbParse p = parse_kb("P(.\nQ(b).\n", "rec.kb");
  CHECK_FALSE(p.ok());
  REQUIRE(p.kb.size() == 1);
  CHECK(to_text(p.kb.sentences[0]) == "Q(b)");
  CHECK(p.kb.labels[0].line == 2);
}

TEST_CASE("comments and blank lines are ignored") {
  KbParse p = parse_kb("# a knowledge base\n\nP(a). # trailing note\n# done\n");
  REQUIRE(p.ok());
  CHECK(p.kb.size() == 1);
}

TEST_CASE("signatures list symbols sorted and deduplicated") {
  KnowledgeBase kb;
  Signature sig = extract_signature(kb, {must_parse("H(c)")});
  REQUIRE(sig.predicates().size() == 1);
  CHECK(sig.predicates()[0].name == "H");
  CHECK(sig.predicates()[0].arity == 1);
  REQUIRE(sig.constants().size() == 1);
  CHECK(sig.constants()[0] == "c");
  CHECK(sig.functions().empty());

  kb = must_parse_kb("Z(b). A(a). %(M(x), A(x), 0, 1). R(a, b).");
  sig = extract_signature(kb);
  std::vector<std::string> names;
  for (const SymbolInfo& p : sig.predicates()) names.push_back(p.name);
  CHECK(names == std::vector<std::string>{"A", "M", "R", "Z"});
  CHECK(sig.constants() == std::vector<std::string>{"a", "b"});
  CHECK(sig.predicate_id("M") == 1);
  CHECK(sig.arity(2) == 2);
  CHECK_FALSE(sig.monadic());
  CHECK(extract_signature(must_parse_kb("A(a). B(b).")).monadic());
}

TEST_CASE("diagnostics render as file, line, and column") {
  KbParse p = parse_kb("P(a,, b).\n", "bad.kb");
  REQUIRE_FALSE(p.ok());
  std::string rendered = p.diagnostics.front().to_string();
  CHECK_THAT(rendered, Catch::Matchers::StartsWith("bad.kb:1:"));
  CHECK_THAT(rendered, Catch::Matchers::ContainsSubstring("error:"));
}

TEST_CASE("free variable tracking respects quantifier shadowing") {
  FormulaPtr f = must_parse("forall x (P(x) -> exists x Q(x))");
  CHECK(is_closed(*f));
  CHECK(free_object_vars(*must_parse("P(a)")).empty());

  ParseOptions open_ok;
  open_ok.require_closed = false;
  FormulaPtr open = must_parse("P(x) & forall y Q(y)", open_ok);
  CHECK(free_object_vars(*open) == std::set<std::string>{"x"});
}

TEST_CASE("substitution instantiates only free occurrences") {
  ParseOptions open_ok;
  open_ok.require_closed = false;
  FormulaPtr f = must_parse("P(x) & exists x Q(x)", open_ok);
  FormulaPtr g = substitute(f, "x", Term::constant("a"));
  CHECK(to_text(g) == "P(a) & exists x Q(x)");

  FormulaPtr stat = must_parse("%(A(x), B(x), 0, 1)");
  CHECK(equal(substitute(stat, "x", Term::constant("a")), stat));
}
