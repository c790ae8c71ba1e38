#include <doctest.h>

#include <thread>

#include "plb/terms.hpp"

using namespace plb;

TEST_CASE("reserved symbols are interned first") {
  SymbolTable s;
  CHECK(s.name(sym::nil) == "[]");
  CHECK(s.name(sym::dot) == ".");
  CHECK(s.name(sym::curly) == "{}");
  CHECK(s.name(sym::comma) == ",");
  CHECK(s.name(sym::true_) == "true");
  CHECK(s.name(sym::fail) == "fail");
  CHECK(s.name(sym::cut) == "!");
  CHECK(s.name(sym::semicolon) == ";");
  CHECK(s.name(sym::arrow) == "->");
  CHECK(s.name(sym::neck) == ":-");
  CHECK(s.name(sym::minus) == "-");
  CHECK(s.name(sym::bar) == "|");
  CHECK(s.intern("[]") == sym::nil);
}

TEST_CASE("interning is idempotent and names stay put") {
  SymbolTable s;
  SymbolId a = s.intern("alpha");
  const std::string& ref = s.name(a);
  for (int i = 0; i < 10'000; ++i) s.intern("x" + std::to_string(i));
  CHECK(s.intern("alpha") == a);
  CHECK(&s.name(a) == &ref);
  CHECK(ref == "alpha");
}

TEST_CASE("concurrent interning agrees on ids") {
  SymbolTable s;
  std::size_t before = s.size();
  std::vector<std::vector<SymbolId>> seen(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 2000; ++i) seen[t].push_back(s.intern("n" + std::to_string(i)));
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) CHECK(seen[t] == seen[0]);
  CHECK(s.size() == before + 2000);
}

TEST_CASE("term encoding") {
  CHECK(sizeof(Term) == 16);
  Term i = Term::integer(-42);
  CHECK(i.is_int());
  CHECK(i.int_value() == -42);
  CHECK(i.is_atomic());
  Term f = Term::floating(2.5);
  CHECK(f.is_float());
  CHECK(f.float_value() == 2.5);
  Term v = Term::var(7);
  CHECK(v.is_var());
  CHECK(v.var_index() == 7);
  CHECK_FALSE(v.is_atomic());
  Term h = Term::handle(3);
  CHECK(h.is_handle());
  CHECK(h.handle_slot() == 3);
  CHECK(Term::atom(sym::nil).is_atom(sym::nil));
  CHECK(Term::integer(INT64_MIN).int_value() == INT64_MIN);
}

TEST_CASE("arena compounds and lists") {
  SymbolTable s;
  TermArena a;
  Term args[] = {Term::integer(1), Term::atom(s.intern("x"))};
  Term c = a.make_compound(s.intern("f"), args);
  CHECK(c.is_functor(s.intern("f"), 2));
  CHECK(a.arg(c, 1).is_atom(s.intern("x")));
  Term items[] = {Term::integer(1), Term::integer(2), Term::integer(3)};
  Term l = a.make_list(items);
  CHECK(is_list(a, l));
  CHECK(list_length(a, l) == 3);
  Term partial = a.make_list(items, Term::var(0));
  CHECK_FALSE(is_list(a, partial));
  CHECK(is_list(a, Term::atom(sym::nil)));
  CHECK(list_length(a, Term::atom(sym::nil)) == 0);
}

TEST_CASE("binding, deref and the trail") {
  VarStore store;
  Trail trail;
  Term x = store.fresh_var();
  Term y = store.fresh_var();
  CHECK_FALSE(store.is_bound(x.var_index()));
  bind(store, trail, x.var_index(), y);
  TrailMark m = trail.mark();
  bind(store, trail, y.var_index(), Term::integer(5));
  CHECK(deref(store, x).int_value() == 5);
  trail.undo_to(store, m);
  CHECK(deref(store, x).is_var());
  CHECK(deref(store, x).var_index() == y.var_index());
  trail.undo_to(store, 0);
  CHECK(deref(store, x).var_index() == x.var_index());
  CHECK(trail.size() == 0);

  std::uint32_t first = store.fresh_block(3);
  CHECK(first == 2);
  CHECK(store.size() == 5);
  CHECK_FALSE(store.is_bound(4));
}

TEST_CASE("deref detects a binding cycle") {
  VarStore store;
  Term x = store.fresh_var();
  Term y = store.fresh_var();
  store.bind(x.var_index(), y);
  store.bind(y.var_index(), x);
  try {
    deref(store, x);
    FAIL("cycle not detected");
  } catch (const PrologError& e) {
    CHECK(e.kind() == ErrorKind::Cycle);
  }
}

TEST_CASE("variant equality") {
  SymbolTable s;
  SymbolId f = s.intern("f");
  TermTree a, b, c;
  Term aa[] = {Term::var(0), Term::var(1), Term::var(0)};
  a.root = a.arena.make_compound(f, aa);
  Term bb[] = {Term::var(5), Term::var(3), Term::var(5)};
  b.root = b.arena.make_compound(f, bb);
  Term cc[] = {Term::var(0), Term::var(0), Term::var(0)};
  c.root = c.arena.make_compound(f, cc);
  CHECK(variant_equal(a, b));
  CHECK_FALSE(variant_equal(a, c));
  CHECK_FALSE(variant_equal(a.arena, Term::integer(1), b.arena, Term::floating(1.0)));
}
