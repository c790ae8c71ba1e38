#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "plb/bench.hpp"
#include "plb/bridge.hpp"

using namespace plb;

namespace {

std::vector<HostValue> pull_all(SolutionCursor& c, const char* var) {
  std::vector<HostValue> out;
  while (auto s = c.next()) out.push_back((*s)[var]);
  return out;
}

BoundaryError boundary_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const BoundaryError& e) {
    return e;
  }
  FAIL("no boundary error");
  return BoundaryError(ErrorKind::Resource, "", "");
}

HostValue seq(std::initializer_list<HostValue> items) { return HostValue(Sequence(items)); }

}  // namespace

TEST_CASE("engine construction") {
  Engine e("f(a).");
  auto c = e.query("f(X)");
  CHECK(pull_all(c, "X") == std::vector<HostValue>{symbol("a")});

  auto err = boundary_error([] { Engine bad("f(a"); });
  CHECK(err.kind() == ErrorKind::Syntax);
  CHECK(err.pos().line == 1);
  CHECK(err.pos().column == 4);
  CHECK(err.goal().empty());

  auto redefine = boundary_error([] { Engine bad("atom(x)."); });
  CHECK(redefine.kind() == ErrorKind::Permission);
}

TEST_CASE("the tube fixture consults one clause per non-comment line") {
  Engine e{std::string(fixture("tube"))};
  std::istringstream in{std::string(fixture("tube"))};
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '%') ++lines;
  }
  CHECK(e.db().clause_count() == lines);
  CHECK(e.db().find(e.db().symbols().intern("route"), 3) != nullptr);
}

TEST_CASE("deep conversion into terms") {
  Engine e("");
  auto m = e.new_machine();
  Term l = e.to_term(*m, seq({1, 2}), ConversionPolicy::deep());
  CHECK(m->format(l) == "[1,2]");
  CHECK(m->format(e.to_term(*m, record("point", {1, 2}), ConversionPolicy::deep())) == "point(1,2)");
  CHECK(m->format(e.to_term(*m, record("z", {}), ConversionPolicy::deep())) == "z");
  CHECK(m->format(e.to_term(*m, seq({}), ConversionPolicy::deep())) == "[]");
  CHECK(m->format(e.to_term(*m, 2.5, ConversionPolicy::deep())) == "2.5");
  CHECK(m->format(e.to_term(*m, symbol("hello world"), ConversionPolicy::deep())) == "'hello world'");
}

TEST_CASE("no-conversion inputs become handles with identity semantics") {
  Engine e("");
  auto m = e.new_machine();
  HostValue v = seq({1, 2});
  Term h1 = e.to_term(*m, v, ConversionPolicy::nc());
  Term h2 = e.to_term(*m, seq({1, 2}), ConversionPolicy::nc());
  CHECK(h1.is_handle());
  CHECK(m->unify(h1, h1));
  CHECK_FALSE(m->unify(h1, h2));
  // scalars are still materialized
  CHECK(e.to_term(*m, 5, ConversionPolicy::nc()).is_int());
  CHECK(e.to_term(*m, symbol("a"), ConversionPolicy::nc()).is_atom());
  // a handle converts back to the original host value
  CHECK(e.from_term(*m, h1, ConversionPolicy::deep()) == v);
  CHECK(e.from_term(*m, h1, ConversionPolicy::nc()) == v);
}

TEST_CASE("round trip through terms in both policies") {
  Engine e("");
  auto m = e.new_machine();
  auto obj = std::make_shared<std::string>("native");
  std::vector<HostValue> values = {
      HostValue(7), HostValue(-1.25), symbol("x"), seq({1, seq({2, 3}), symbol("a")}),
      record("node", {seq({}), record("leaf", {1}), 3.5}), HostValue(OpaqueObject{obj}), seq({})};
  for (const auto& v : values) {
    for (auto pol : {ConversionPolicy::deep(), ConversionPolicy::nc()}) {
      Term t = e.to_term(*m, v, pol);
      HostValue back = e.from_term(*m, t, pol);
      if (back.is<OpaqueTerm>()) back = back.as<OpaqueTerm>().materialize();
      CHECK_MESSAGE(back == v, to_string(v));
    }
  }
}

TEST_CASE("deep answers must be ground") {
  Engine e("f(g(X)).");
  auto err = boundary_error([&] { e.query_once("f(Y)"); });
  CHECK(err.kind() == ErrorKind::Boundary);
  CHECK(err.goal() == "f(Y)");
  CHECK(std::string(err.what()).find("Y") != std::string::npos);
  // nc hands the same answer back as a reference
  auto s = e.query_once("f(Y)", {}, ConversionPolicy::nc());
  REQUIRE(s);
  const auto& ref = (*s)["Y"].as<OpaqueTerm>();
  CHECK(ref.functor() == "g");
  CHECK(ref.arity() == 1);
  CHECK(ref.arg(0).as<OpaqueTerm>().is_var());
  CHECK_THROWS_AS(ref.materialize(), PrologError);
}

TEST_CASE("queries are lazy and count one crossing per pull") {
  Engine e("f(a). f(b).\ncounter(N, X) :- c(1, N, X).\nc(I, N, I) :- I =< N.\nc(I, N, X) :- I < N, J is I + 1, c(J, N, X).");
  auto c = e.query("f(X)");
  CHECK(c.state() == SolutionCursor::State::Fresh);
  CHECK(e.crossings() == 0);
  CHECK(c.machine().step_count() == 0);
  auto first = c.next();
  REQUIRE(first);
  CHECK((*first)["X"] == symbol("a"));
  CHECK(c.state() == SolutionCursor::State::Yielded);
  CHECK(c.next());
  CHECK_FALSE(c.next());
  CHECK(c.state() == SolutionCursor::State::Done);
  CHECK(e.crossings() == 3);
  std::uint64_t steps = c.machine().step_count();
  CHECK_FALSE(c.next());
  CHECK(e.crossings() == 3);
  CHECK(c.machine().step_count() == steps);

  e.reset_crossings();
  auto k = e.query("counter(5, X)");
  CHECK(pull_all(k, "X") == std::vector<HostValue>{1, 2, 3, 4, 5});
  CHECK(e.crossings() == 6);

  auto none = e.query("fail");
  CHECK_FALSE(none.next());
  CHECK(none.state() == SolutionCursor::State::Done);
}

TEST_CASE("query_once") {
  Engine e{std::string(fixture("micro"))};
  auto s = e.query_once("X is 1 + 1");
  REQUIRE(s);
  CHECK((*s)["X"] == HostValue(2));
  CHECK_FALSE(e.query_once("fail"));
  auto r = e.query_once("l1a1r(1000, Acc)");
  REQUIRE(r);
  CHECK((*r)["Acc"] == HostValue(1000));
  CHECK_THROWS_AS((*r)["Nope"], std::out_of_range);
  CHECK(r->contains("Acc"));
}

TEST_CASE("inputs by name; outputs are the other named variables") {
  Engine e("add(X, Y, Z) :- Z is X + Y.");
  auto s = e.query_once("add(A, B, C), _Tmp = 1", {{"A", 2}, {"B", 3}});
  REQUIRE(s);
  CHECK(s->size() == 1);
  CHECK((*s)["C"] == HostValue(5));
  CHECK(e.query("add(A, B, C)", {{"B", 1}}).variables() == std::vector<std::string>{"A", "C"});

  auto unknown = boundary_error([&] { e.query("add(A, B, C)", {{"Q", 1}}); });
  CHECK(unknown.kind() == ErrorKind::Boundary);
  auto twice = boundary_error([&] { e.query("add(A, B, C)", {{"A", 1}, {"A", 2}}); });
  CHECK(twice.kind() == ErrorKind::Boundary);
  auto syntax = boundary_error([&] { e.query("add(A, "); });
  CHECK(syntax.kind() == ErrorKind::Syntax);
  CHECK(syntax.goal() == "add(A, ");
  auto missing = boundary_error([&] { e.query_once("nope(1)"); });
  CHECK(missing.kind() == ErrorKind::Existence);
  auto empty_ref = boundary_error([&] { e.query("X = Y", {{"X", OpaqueTerm{}}}); });
  CHECK(empty_ref.kind() == ErrorKind::Type);
}

TEST_CASE("term references pass back into later queries") {
  Engine e("mk(N, L) :- mk(N, [], L).\nmk(0, L, L) :- !.\nmk(N, A, L) :- M is N - 1, mk(M, [N|A], L).\n"
           "len([], 0).\nlen([_|T], N) :- len(T, M), N is M + 1.\nhd([H|_], H).");
  auto s = e.query_once("mk(100000, L)", {}, ConversionPolicy::nc());
  REQUIRE(s);
  HostValue ref = (*s)["L"];
  REQUIRE(ref.is<OpaqueTerm>());
  auto n = e.query_once("len(L, N)", {{"L", ref}});
  REQUIRE(n);
  CHECK((*n)["N"] == HostValue(100000));
  CHECK((*e.query_once("hd(L, H)", {{"L", ref}}))["H"] == HostValue(1));

  OpaqueTerm pre = e.make_term(seq({symbol("a"), symbol("b")}));
  auto n2 = e.query_once("len(L, N)", {{"L", pre}}, ConversionPolicy::nc());
  CHECK((*n2)["N"] == HostValue(2));
  CHECK(pre.materialize() == seq({symbol("a"), symbol("b")}));

  Engine other("p.");
  auto foreign = boundary_error([&] { other.query("X = Y", {{"X", pre}}); });
  CHECK(foreign.kind() == ErrorKind::Boundary);
}

TEST_CASE("references stay valid after the cursor moves on") {
  Engine e("p(g(a)). p(g(b)).");
  auto c = e.query("p(X)", {}, ConversionPolicy::nc());
  HostValue y1 = (*c.next())["X"];
  HostValue y2 = (*c.next())["X"];
  CHECK_FALSE(c.next());
  CHECK(y1.as<OpaqueTerm>().materialize() == record("g", {symbol("a")}));
  CHECK(y2.as<OpaqueTerm>().materialize() == record("g", {symbol("b")}));
  CHECK(y1.as<OpaqueTerm>().to_string() == "g(a)");
  CHECK(y1 == y1);
  CHECK_FALSE(y1 == y2);
}

TEST_CASE("deep and nc answer streams agree after materializing") {
  Engine e{std::string(fixture("sat"))};
  const char* goal = "model(8, [[1,2,3,4],[5,6,7,8],[-1,-5],[-2,-6],[-3,-7],[-4,-8]], M)";
  auto d = e.query(goal, {}, ConversionPolicy::deep());
  auto n = e.query(goal, {}, ConversionPolicy::nc());
  std::vector<HostValue> deep = pull_all(d, "M");
  std::vector<HostValue> nc;
  for (auto& v : pull_all(n, "M")) nc.push_back(v.as<OpaqueTerm>().materialize());
  CHECK(deep.size() == 50);
  CHECK(deep == nc);
}

TEST_CASE("interleaved cursors are independent") {
  Engine e("n(1). n(2). n(3).");
  auto a = e.query("n(X)");
  auto b = e.query("n(X)");
  std::vector<HostValue> sa, sb;
  for (;;) {
    auto x = a.next();
    auto y = b.next();
    if (x) sa.push_back((*x)["X"]);
    if (y) sb.push_back((*y)["X"]);
    if (!x && !y) break;
  }
  std::vector<HostValue> expect{1, 2, 3};
  CHECK(sa == expect);
  CHECK(sb == expect);
}

TEST_CASE("cursors run on separate threads") {
  Engine e{std::string(fixture("micro"))};
  std::vector<std::int64_t> sums(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      auto c = e.query("nd(" + std::to_string(100 * (t + 1)) + ", X)");
      while (auto s = c.next()) sums[t] += (*s)["X"].as<std::int64_t>();
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 0; t < 4; ++t) {
    std::int64_t k = 100 * (t + 1);
    CHECK(sums[t] == k * (k + 1) / 2);
  }
  CHECK(e.crossings() == 101 + 201 + 301 + 401);
}

TEST_CASE("handle slots are reclaimed and never reused while live") {
  Engine e("same(X, X).");
  auto obj = std::make_shared<int>(1);
  HostValue h{OpaqueObject{obj}};
  {
    auto keep = e.query("same(A, B)", {{"A", h}});
    CHECK(e.live_handles() == 1);
    for (int i = 0; i < 1'000'000; ++i) {
      auto c = e.query("same(A, A)", {{"A", HostValue(OpaqueObject{std::make_shared<int>(i)})}});
    }
    CHECK(e.live_handles() == 1);
    CHECK(e.handle_capacity() <= 2);
    // the slot held by the first query still resolves to its own value
    auto s = keep.next();
    REQUIRE(s);
    CHECK((*s)["B"] == h);
  }
  CHECK(e.live_handles() == 0);
}
