#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "generators.hpp"
#include "plb/error.hpp"
#include "plb/reader.hpp"

using namespace plb;

namespace {

std::string fmt(std::string_view text) {
  SymbolTable syms;
  auto p = parse_term(text, syms);
  return format_term(p.tree, syms);
}

std::string canon(std::string_view text) {
  SymbolTable syms;
  auto p = parse_term(text, syms);
  return plbtest::canonical(p.tree.arena, p.tree.root, syms);
}

SourcePos error_pos(std::string_view text) {
  SymbolTable syms;
  try {
    parse_program(text, syms);
  } catch (const PrologError& e) {
    CHECK(e.kind() == ErrorKind::Syntax);
    return e.pos();
  }
  FAIL("no syntax error for: " << text);
  return {};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// parse(format(t)) is a variant of t and formatting is stable.
void check_round_trip(const TermTree& tree, SymbolTable& syms) {
  std::string text = format_term(tree, syms);
  ParsedTerm back;
  try {
    back = parse_term(text, syms);
  } catch (const PrologError& e) {
    FAIL_CHECK("cannot re-read " << text << ": " << e.what());
    return;
  }
  CHECK_MESSAGE(variant_equal(tree, back.tree), text << "  re-read as  " << format_term(back.tree, syms));
  CHECK(format_term(back.tree, syms) == text);
}

}  // namespace

TEST_CASE("tokenizer") {
  auto toks = tokenize("foo(X, 'a b', -12, 3.5e2, \"s\", [_|T]). % c\n/* b */ x");
  std::vector<std::string> texts;
  for (const auto& t : toks) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"foo", "(", "X", ",", "a b", ",", "-", "12", ",", "3.5e2", ",", "s", ",",
                                          "[", "_", "|", "T", "]", ")", ".", "x"});
  CHECK(toks[0].kind == TokenKind::Atom);
  CHECK(toks[2].kind == TokenKind::Variable);
  CHECK(toks[4].kind == TokenKind::Atom);
  CHECK(toks[7].kind == TokenKind::Integer);
  CHECK(toks[9].kind == TokenKind::Float);
  CHECK(toks[11].kind == TokenKind::String);
  CHECK(toks[19].kind == TokenKind::End);
  CHECK(toks[20].pos.line == 2);
  CHECK(toks[20].pos.column == 9);
}

TEST_CASE("symbol character runs are one token") {
  auto toks = tokenize("X =.. Y, a:-b, 7//-2");
  std::vector<std::string> texts;
  for (const auto& t : toks) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"X", "=..", "Y", ",", "a", ":-", "b", ",", "7", "//-", "2"});
}

TEST_CASE("operators, priorities and associativity") {
  CHECK(canon("1 - 2 - 3") == "'-'('-'(1,2),3)");
  CHECK(canon("2 ^ 3 ^ 4") == "'^'(2,'^'(3,4))");
  CHECK(canon("a :- b, c ; d -> e") == "':-'('a',';'(','('b','c'),'->'('d','e')))");
  CHECK(canon("- 1") == "'-'(1)");
  CHECK(canon("-1") == "-1");
  CHECK(canon("- (1)") == "'-'(1)");
  CHECK(canon("-(1)") == "'-'(1)");
  CHECK(canon("-a") == "'-'('a')");
  CHECK(canon("- - a") == "'-'('-'('a'))");
  CHECK(canon("\\+ a = b") == "'\\+'('='('a','b'))");
  CHECK(canon("f(a, (b, c))") == "'f'('a',','('b','c'))");
  CHECK(canon("[a, b | T]") == "'.'('a','.'('b',_0))");
  CHECK(canon("{a, b}") == "'{}'(','('a','b'))");
  CHECK(canon("'hello world'(x)") == "'hello world'('x')");
  CHECK(canon("X = 'it''s'") == "'='(_0,'it's')");
  CHECK(canon("\"text\"") == "'text'");
  CHECK(canon("- (-(1))") == "'-'('-'(1))");
  CHECK(canon("f(-)") == "'f'('-')");
  CHECK(canon("[-]") == "'.'('-','[]')");
  CHECK(canon("a = \\+") == "'='('a','\\+')");
  CHECK(canon("0'a") == "97");
  CHECK(canon("0x1F + 0b101 + 0o17") == "'+'('+'(31,5),15)");
  CHECK(canon(R"(0''' + 0'' + 0'\n + 0'é)") == "'+'('+'('+'(39,39),10),233)");
  CHECK_THROWS_AS(canon("0xFFFFFFFFFFFFFFFFF"), PrologError);
  CHECK_THROWS_AS(canon("a = b = c"), PrologError);
  CHECK_THROWS_AS(canon("f(a"), PrologError);
}

TEST_CASE("printer output") {
  CHECK(fmt("f(X, Y, X)") == "f(_G0,_G1,_G0)");
  CHECK(fmt("[1, 2, 3]") == "[1,2,3]");
  CHECK(fmt("[a | T]") == "[a|_G0]");
  CHECK(fmt("'hello world'") == "'hello world'");
  CHECK(fmt("[]") == "[]");
  CHECK(fmt("'[]'") == "[]");
  CHECK(fmt("{}") == "{}");
  CHECK(fmt("1 + 2 * 3") == "1+2*3");
  CHECK(fmt("(1 + 2) * 3") == "(1+2)*3");
  CHECK(fmt("1 - (2 - 3)") == "1-(2-3)");
  CHECK(fmt("- (1)") == "-(1)");
  CHECK(fmt("- (0.5 ** f)") == "- 0.5**f");
  CHECK(fmt("a :- b, c") == "a:-b,c");
  CHECK(fmt("f((a, b))") == "f((a,b))");
  CHECK(fmt("f((a :- b))") == "f((a:-b))");
  CHECK(fmt("2.0") == "2.0");
  CHECK(fmt("1.0e10") == "1.0e+10");
  CHECK(quote_atom_if_needed("abc") == "abc");
  CHECK(quote_atom_if_needed("Abc") == "'Abc'");
  CHECK(quote_atom_if_needed("a b") == "'a b'");
  CHECK(quote_atom_if_needed("+") == "+");
  CHECK(quote_atom_if_needed("[]") == "[]");
  CHECK(quote_atom_if_needed("") == "''");
}

TEST_CASE("syntax errors carry positions") {
  SourcePos p = error_pos("ok(1).\nbad(1 2).\n");
  CHECK(p.line == 2);
  CHECK(p.column == 7);
  p = error_pos("p :- q(.\n");
  CHECK(p.line == 1);
  CHECK(p.column == 8);
  p = error_pos("p(1)");
  CHECK(p.line == 1);
  p = error_pos("x('unterminated).");
  CHECK(p.line == 1);
  CHECK(p.column == 3);
}

TEST_CASE("programs: clauses, facts and directives") {
  SymbolTable syms;
  auto cs = parse_program("p(X) :- q(X), r.\nq(1).\n% comment\nr :- (a ; b).\n", syms);
  REQUIRE(cs.size() == 3);
  CHECK(cs[0].goals.size() == 2);
  CHECK(cs[0].n_vars == 1);
  CHECK(cs[1].body.is_atom(sym::true_));
  CHECK(cs[2].goals.size() == 1);
  try {
    parse_program(":- initialization(main).", syms);
    FAIL("directive accepted");
  } catch (const PrologError& e) {
    CHECK(e.kind() == ErrorKind::DirectiveUnsupported);
  }
  CHECK_THROWS_AS(parse_program("3 :- true.", syms), PrologError);
  CHECK_THROWS_AS(parse_program("p :- 3.", syms), PrologError);
}

TEST_CASE("round trip on generated terms") {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  SymbolTable syms;
  for (int i = 0; i < 2000; ++i) {
    TermTree t = plbtest::random_term(rng, syms, 1 + i % 6);
    check_round_trip(t, syms);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("2000 generated terms in " << secs << " s");
}

TEST_CASE("round trip on the fixture corpus") {
  for (const char* name : {"micro", "sat", "tube", "connect4"}) {
    SymbolTable syms;
    std::string text = read_file(std::string(PLB_FIXTURE_DIR) + "/" + name + ".pl");
    auto clauses = parse_program(text, syms);
    CHECK(clauses.size() > 5);
    // Re-read the whole program from its printed form.
    std::string printed;
    for (const auto& c : clauses) {
      Term head = c.head, body = c.body;
      if (body.is_atom(sym::true_)) {
        printed += format_term(c.arena, head, syms) + ".\n";
      } else {
        Term args[] = {head, body};
        TermArena arena = c.arena;
        Term rule = arena.make_compound(sym::neck, args);
        printed += format_term(arena, rule, syms) + ".\n";
      }
    }
    auto again = parse_program(printed, syms);
    REQUIRE(again.size() == clauses.size());
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      CHECK(variant_equal(clauses[i].arena, clauses[i].head, again[i].arena, again[i].head));
      CHECK(variant_equal(clauses[i].arena, clauses[i].body, again[i].arena, again[i].body));
    }
  }
}
