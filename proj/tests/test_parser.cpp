#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "npls/parser.hpp"
#include "npls/printer.hpp"

using namespace npls;

TEST_CASE("replay program parses to the expected structure") {
  ProgramAst p = parse_program(testutil::story_source());
  CHECK(p.name == "story");
  REQUIRE(p.items.size() == 4);

  const auto& n1 = std::get<NormAst>(p.items[0]);
  CHECK(n1.id == "n1");
  CHECK(to_string(n1.condition) == "vl(X) & X > 5");
  CHECK(n1.kind == ConsequenceKind::Obligation);
  CHECK(to_string(n1.bearer) == "alice");
  CHECK(n1.maintenance->is_truth());
  CHECK(to_string(n1.goal) == "b(0)");
  REQUIRE(n1.deadline_time);
  CHECK(n1.deadline_time->duration_ms() == 3000);
  REQUIRE(n1.triggers[static_cast<int>(Outcome::Unfulfilled)]);
  const auto& calls = *n1.triggers[static_cast<int>(Outcome::Unfulfilled)];
  REQUIRE(calls.size() == 1);
  CHECK(to_string(calls[0]) == "sr1(alice,X)");
  CHECK_FALSE(n1.triggers[static_cast<int>(Outcome::Fulfilled)]);

  const auto& n2 = std::get<NormAst>(p.items[1]);
  CHECK(to_string(n2.condition) == "sanction(A,fine(X)) & extra(C)");
  CHECK(n2.deadline_time->duration_ms() == 2000);

  const auto& sr1 = std::get<SanctionRuleAst>(p.items[2]);
  CHECK(sr1.id == "sr1");
  CHECK(sr1.params == std::vector<std::string>{"A", "V"});
  CHECK(to_string(sr1.condition) == "not emergency(A)");
  CHECK(to_string(sr1.target) == "A");
  CHECK(to_string(sr1.content) == "fine(V)");

  const auto& sr2 = std::get<SanctionRuleAst>(p.items[3]);
  CHECK(sr2.params.empty());
  CHECK_FALSE(sr2.condition);
  CHECK(to_string(sr2.content) == "remove_from_systems");
}

TEST_CASE("empty program") {
  ProgramAst p = parse_program("np empty { }");
  CHECK(p.name == "empty");
  CHECK(p.items.empty());
}

TEST_CASE("rules and facts inside a program") {
  ProgramAst p = parse_program(
      "np t { tall(X) :- height(X, H) & H > 180 . height(bob, 190). }");
  REQUIRE(p.items.size() == 2);
  const auto& r = std::get<InferenceRule>(p.items[0]);
  CHECK(to_string(r.head) == "tall(X)");
  CHECK(to_string(r.body) == "height(X,H) & H > 180");
  const auto& f = std::get<InferenceRule>(p.items[1]);
  CHECK_FALSE(f.body);
}

TEST_CASE("time specifications cover all units") {
  auto ms = [](const std::string& spec) {
    ProgramAst p = parse_program(
        "np t { norm n: p -> obligation(a, true, q, " + spec + ") . }");
    return std::get<NormAst>(p.items[0]).deadline_time->duration_ms();
  };
  CHECK(ms("`500 milliseconds`") == 500);
  CHECK(ms("`1 second`") == 1000);
  CHECK(ms("`2 seconds`") == 2000);
  CHECK(ms("`3 minutes`") == 180000);
  CHECK(ms("`1 hour`") == 3600000);
  CHECK(ms("`2 days`") == 172800000);
  CHECK(ms("`1.5 seconds`") == 1500);
}

TEST_CASE("formula deadlines are accepted") {
  ProgramAst p = parse_program(
      "np t { norm n: p -> obligation(a, true, q, deadline_event | r) . }");
  const auto& n = std::get<NormAst>(p.items[0]);
  CHECK_FALSE(n.deadline_time);
  CHECK(to_string(n.deadline_formula) == "deadline_event | r");
}

TEST_CASE("operator precedence is not over and over or") {
  auto f = parse_formula("not a & b | c");
  CHECK(f->kind() == Formula::Kind::Or);
  CHECK(to_string(f) == "not a & b | c");
  CHECK(to_string(parse_formula("a & (b | c)")) == "a & (b | c)");
  CHECK(to_string(parse_formula("(a | b) & c")) == "(a | b) & c");
  CHECK(to_string(parse_formula("not (a & b)")) == "not (a & b)");
}

TEST_CASE("parenthesized arithmetic versus parenthesized formulas") {
  CHECK(to_string(parse_formula("(X + 1) * 2 > 6")) == "(X+1)*2 > 6");
  CHECK(to_string(parse_formula("(p) & q")) == "p & q");
}

TEST_CASE("string literals") {
  auto t = parse_term("label(\"hello \\\"there\\\"\")");
  CHECK(t->args()[0]->kind() == Term::Kind::Str);
  CHECK(t->args()[0]->str_value() == "hello \"there\"");
  CHECK(to_string(parse_term(to_string(t))) == to_string(t));
}

TEST_CASE("comments are ignored") {
  ProgramAst p = parse_program("np t { // nothing here\n }");
  CHECK(p.items.empty());
}

TEST_CASE("dargs arity errors") {
  CHECK_THROWS_AS(
      parse_program("np t { norm n: p -> obligation(a, true, q) . }"),
      ParseError);
  CHECK_THROWS_AS(
      parse_program("np t { norm n: p -> obligation(a, true) . }"),
      ParseError);
}

TEST_CASE("duplicate trigger clause is a parse error") {
  try {
    parse_program(
        "np t { norm n: p -> obligation(a, true, q, `1 second`) "
        "if unfulfilled: s1 if unfulfilled: s1 . "
        "sanction-rule s1 -> sanction(a, c) . }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate trigger") != std::string::npos);
  }
}

TEST_CASE("reserved words cannot be predicates") {
  CHECK_THROWS_AS(parse_program("np t { norm(a). }"), ParseError);
  CHECK_THROWS_AS(parse_program("np t { obligation(a). }"), ParseError);
  // `sanction` stays usable: norm conditions must be able to observe
  // sanction facts.
  CHECK_NOTHROW(parse_program(
      "np t { norm n: sanction(A, fine(X)) -> obligation(bob, true, q, "
      "`1 second`) . }"));
}

TEST_CASE("sanction rule variable closure") {
  CHECK_THROWS_AS(
      parse_program("np t { sanction-rule s1 -> sanction(X, c) . }"),
      ParseError);
  CHECK_THROWS_AS(
      parse_program("np t { sanction-rule s1(A) -> sanction(A, c(B)) . }"),
      ParseError);
  CHECK_NOTHROW(parse_program(
      "np t { sanction-rule s1(A) : owner(A, B) -> sanction(A, c(B)) . }"));
  CHECK_THROWS_AS(
      parse_program("np t { sanction-rule s1(A, A) -> sanction(A, c) . }"),
      ParseError);
}

TEST_CASE("error positions point at the offending token") {
  try {
    parse_program("np t {\n  norm n1: p ->\n  oblige(a, true, q, `1 second`) . }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
    CHECK(e.token() == "oblige");
  }
  try {
    parse_term("p(a,");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("token mutations always fail with a position") {
  std::string src = testutil::story_source();
  // Deleting any single '.' or ')' must yield a ParseError (or a different
  // valid parse is impossible here), never a crash or silent acceptance.
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] != '.' && src[i] != ')' && src[i] != '>') continue;
    std::string mutated = src.substr(0, i) + src.substr(i + 1);
    try {
      parse_program(mutated);
    } catch (const ParseError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
}

TEST_CASE("canonical text round-trips for the bundled programs") {
  for (const char* file : {"/story.npl", "/unit_de_jure.npl"}) {
    std::string src = testutil::read_file(std::string(NPLS_PROGRAMS_DIR) + file);
    std::string once = pretty_print(parse_program(src));
    std::string twice = pretty_print(parse_program(once));
    CHECK(once == twice);
  }
}

TEST_CASE("generated programs round-trip") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    testutil::AstGen gen(seed);
    std::string why;
    bool ok = testutil::round_trips(gen.program(), &why);
    INFO(why);
    CHECK(ok);
  }
}
