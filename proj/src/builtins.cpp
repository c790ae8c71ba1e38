#include "builtins.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace plb {

namespace {

[[noreturn]] void overflow() { throw PrologError(ErrorKind::Overflow, "integer overflow"); }

[[noreturn]] void zero_divisor() {
  throw PrologError(ErrorKind::Evaluation, "division by zero");
}

std::int64_t require_int(const Number& n, const char* op) {
  if (n.is_float) throw PrologError(ErrorKind::Type, std::string("integer expected in ") + op);
  return n.i;
}

Number add(Number a, Number b) {
  if (!a.is_float && !b.is_float) {
    std::int64_t r;
    if (__builtin_add_overflow(a.i, b.i, &r)) overflow();
    return Number::of(r);
  }
  return Number::of(a.as_double() + b.as_double());
}

Number sub(Number a, Number b) {
  if (!a.is_float && !b.is_float) {
    std::int64_t r;
    if (__builtin_sub_overflow(a.i, b.i, &r)) overflow();
    return Number::of(r);
  }
  return Number::of(a.as_double() - b.as_double());
}

Number mul(Number a, Number b) {
  if (!a.is_float && !b.is_float) {
    std::int64_t r;
    if (__builtin_mul_overflow(a.i, b.i, &r)) overflow();
    return Number::of(r);
  }
  return Number::of(a.as_double() * b.as_double());
}

Number int_div(Number a, Number b) {
  std::int64_t x = require_int(a, "//");
  std::int64_t y = require_int(b, "//");
  if (y == 0) zero_divisor();
  if (x == std::numeric_limits<std::int64_t>::min() && y == -1) overflow();
  return Number::of(x / y);  // C++ division truncates toward zero
}

Number modulo(Number a, Number b) {
  std::int64_t x = require_int(a, "mod");
  std::int64_t y = require_int(b, "mod");
  if (y == 0) zero_divisor();
  if (y == -1) return Number::of(std::int64_t{0});
  std::int64_t r = x % y;
  if (r != 0 && ((r < 0) != (y < 0))) r += y;  // sign follows the divisor
  return Number::of(r);
}

Number divide(Number a, Number b) {
  if (!a.is_float && !b.is_float) {
    if (b.i == 0) zero_divisor();
    if (a.i == std::numeric_limits<std::int64_t>::min() && b.i == -1) overflow();
    if (a.i % b.i == 0) return Number::of(a.i / b.i);
  }
  if (b.as_double() == 0.0) zero_divisor();
  return Number::of(a.as_double() / b.as_double());
}

Number negate(Number a) {
  if (a.is_float) return Number::of(-a.f);
  if (a.i == std::numeric_limits<std::int64_t>::min()) overflow();
  return Number::of(-a.i);
}

Number int_op(Number a, Number b, const char* op) {
  std::int64_t x = require_int(a, op);
  std::int64_t y = require_int(b, op);
  std::string_view o = op;
  if (o == "rem") {
    if (y == 0) zero_divisor();
    return Number::of(y == -1 ? std::int64_t{0} : x % y);
  }
  if (o == "div") {
    if (y == 0) zero_divisor();
    if (x == std::numeric_limits<std::int64_t>::min() && y == -1) overflow();
    std::int64_t q = x / y;
    if ((x % y != 0) && ((x < 0) != (y < 0))) --q;  // floor
    return Number::of(q);
  }
  if (o == "/\\") return Number::of(x & y);
  if (o == "\\/") return Number::of(x | y);
  if (o == "xor") return Number::of(x ^ y);
  if (y < 0 || y > 63) throw PrologError(ErrorKind::Evaluation, std::string("shift out of range in ") + op);
  if (o == ">>") return Number::of(x >> y);
  if (x != 0 && (y >= 63 || (x > 0 ? x > (INT64_MAX >> y) : x < (INT64_MIN >> y)))) overflow();
  return Number::of(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << y));
}

Number power(Number a, Number b, bool caret) {
  if (a.is_float || b.is_float) return Number::of(std::pow(a.as_double(), b.as_double()));
  if (b.i < 0) {
    if (a.i == 1) return Number::of(std::int64_t{1});
    if (a.i == -1) return Number::of(std::int64_t{b.i % 2 == 0 ? 1 : -1});
    if (caret) throw PrologError(ErrorKind::Type, "negative integer exponent in ^");
    return Number::of(std::pow(a.as_double(), b.as_double()));
  }
  std::int64_t r = 1, base = a.i, e = b.i;
  while (e > 0) {
    if (e & 1) {
      if (__builtin_mul_overflow(r, base, &r)) overflow();
    }
    e >>= 1;
    if (e > 0 && __builtin_mul_overflow(base, base, &base)) overflow();
  }
  return Number::of(r);
}

Number to_integer(double v, double (*round_fn)(double)) {
  double r = round_fn(v);
  if (!std::isfinite(r) || r < -9.223372036854775808e18 || r >= 9.223372036854775808e18) overflow();
  return Number::of(static_cast<std::int64_t>(r));
}

int compare(const Number& a, const Number& b) {
  if (!a.is_float && !b.is_float) return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
  double x = a.as_double(), y = b.as_double();
  return x < y ? -1 : (x > y ? 1 : 0);
}

}  // namespace

Number Machine::eval_arith(Term t) {
  t = deref(t);
  switch (t.tag()) {
    case Tag::Int: return Number::of(t.int_value());
    case Tag::Float: return Number::of(t.float_value());
    case Tag::Var:
      throw PrologError(ErrorKind::Instantiation, "unbound variable in arithmetic expression");
    case Tag::Atom:
    case Tag::Handle:
      throw PrologError(ErrorKind::Type, "not an arithmetic expression: " + format(t));
    case Tag::Compound: break;
  }
  const std::string& op = symbols().name(t.name());
  auto a = args(t);
  if (t.arity() == 1) {
    Number x = eval_arith(a[0]);
    if (op == "-") return negate(x);
    if (op == "+") return x;
    if (op == "abs") return x.is_float ? Number::of(std::fabs(x.f)) : (x.i < 0 ? negate(x) : x);
    if (op == "sign") {
      if (x.is_float) return Number::of(x.f > 0 ? 1.0 : (x.f < 0 ? -1.0 : 0.0));
      return Number::of(std::int64_t{x.i > 0 ? 1 : (x.i < 0 ? -1 : 0)});
    }
    if (op == "\\") return Number::of(~require_int(x, "\\"));
    if (op == "float") return Number::of(x.as_double());
    if (op == "integer") return x.is_float ? to_integer(x.f, std::round) : x;
    if (op == "truncate") return x.is_float ? to_integer(x.f, std::trunc) : x;
    if (op == "floor") return x.is_float ? to_integer(x.f, std::floor) : x;
    if (op == "ceiling") return x.is_float ? to_integer(x.f, std::ceil) : x;
    if (op == "sqrt") return Number::of(std::sqrt(x.as_double()));
  } else if (t.arity() == 2) {
    Term rhs = a[1];
    Number x = eval_arith(a[0]);
    Number y = eval_arith(rhs);
    if (op == "+") return add(x, y);
    if (op == "-") return sub(x, y);
    if (op == "*") return mul(x, y);
    if (op == "//") return int_div(x, y);
    if (op == "mod") return modulo(x, y);
    if (op == "/") return divide(x, y);
    if (op == "min") return compare(x, y) <= 0 ? x : y;
    if (op == "max") return compare(x, y) >= 0 ? x : y;
    if (op == "**") return power(x, y, false);
    if (op == "^") return power(x, y, true);
    for (const char* o : {"rem", "div", "/\\", "\\/", "xor", ">>", "<<"}) {
      if (op == o) return int_op(x, y, o);
    }
  }
  throw PrologError(ErrorKind::Type, "unknown arithmetic function " + op + "/" +
                                         std::to_string(t.arity()));
}

namespace detail {

namespace {

bool bi_unify(Machine& m, std::span<const Term> a) { return m.unify(a[0], a[1]); }

bool bi_not_unify(Machine& m, std::span<const Term> a) {
  TrailMark mark = m.trail().mark();
  bool ok = m.unify(a[0], a[1]);
  m.trail().undo_to(m.store(), mark);
  return !ok;
}

bool bi_identical(Machine& m, std::span<const Term> a) { return identical(m, a[0], a[1]); }
bool bi_not_identical(Machine& m, std::span<const Term> a) { return !identical(m, a[0], a[1]); }

bool bi_is(Machine& m, std::span<const Term> a) {
  Number n = m.eval_arith(a[1]);
  return m.unify(a[0], n.to_term());
}

template <typename Cmp>
bool arith_compare(Machine& m, std::span<const Term> a, Cmp cmp) {
  Number x = m.eval_arith(a[0]);
  Number y = m.eval_arith(a[1]);
  return cmp(compare(x, y));
}

bool bi_lt(Machine& m, std::span<const Term> a) { return arith_compare(m, a, [](int c) { return c < 0; }); }
bool bi_gt(Machine& m, std::span<const Term> a) { return arith_compare(m, a, [](int c) { return c > 0; }); }
bool bi_le(Machine& m, std::span<const Term> a) { return arith_compare(m, a, [](int c) { return c <= 0; }); }
bool bi_ge(Machine& m, std::span<const Term> a) { return arith_compare(m, a, [](int c) { return c >= 0; }); }
bool bi_eq(Machine& m, std::span<const Term> a) { return arith_compare(m, a, [](int c) { return c == 0; }); }
bool bi_ne(Machine& m, std::span<const Term> a) { return arith_compare(m, a, [](int c) { return c != 0; }); }

bool bi_var(Machine& m, std::span<const Term> a) { return m.deref(a[0]).is_var(); }
bool bi_nonvar(Machine& m, std::span<const Term> a) { return !m.deref(a[0]).is_var(); }
bool bi_atom(Machine& m, std::span<const Term> a) { return m.deref(a[0]).is_atom(); }
bool bi_integer(Machine& m, std::span<const Term> a) { return m.deref(a[0]).is_int(); }
bool bi_float(Machine& m, std::span<const Term> a) { return m.deref(a[0]).is_float(); }
bool bi_compound(Machine& m, std::span<const Term> a) { return m.deref(a[0]).is_compound(); }

bool bi_number(Machine& m, std::span<const Term> a) {
  Term t = m.deref(a[0]);
  return t.is_int() || t.is_float();
}

bool bi_atomic(Machine& m, std::span<const Term> a) {
  Term t = m.deref(a[0]);
  return t.is_atomic() && !t.is_handle();
}

bool bi_functor(Machine& m, std::span<const Term> a) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) {
    Term name = t.is_compound() ? Term::atom(t.name()) : t;
    std::int64_t arity = t.is_compound() ? t.arity() : 0;
    return m.unify(a[1], name) && m.unify(a[2], Term::integer(arity));
  }
  Term name = m.deref(a[1]);
  Term arity = m.deref(a[2]);
  if (name.is_var() || arity.is_var()) {
    throw PrologError(ErrorKind::Instantiation, "functor/3 needs a term or a name and arity");
  }
  if (!arity.is_int()) throw PrologError(ErrorKind::Type, "functor/3 arity must be an integer");
  std::int64_t n = arity.int_value();
  if (n < 0 || n > static_cast<std::int64_t>(kMaxArity)) throw PrologError(ErrorKind::Type, "functor/3 arity out of range");
  if (n == 0) return m.unify(t, name);
  if (!name.is_atom()) throw PrologError(ErrorKind::Type, "functor/3 name must be an atom");
  Term c = m.heap().alloc_compound(name.name(), static_cast<std::uint32_t>(n));
  for (std::int64_t i = 0; i < n; ++i) m.heap().set(c.args_offset() + i, m.store().fresh_var());
  return m.unify(t, c);
}

bool bi_arg(Machine& m, std::span<const Term> a) {
  Term n = m.deref(a[0]);
  Term t = m.deref(a[1]);
  if (n.is_var() || t.is_var()) throw PrologError(ErrorKind::Instantiation, "arg/3 needs N and a term");
  if (!n.is_int()) throw PrologError(ErrorKind::Type, "arg/3 index must be an integer");
  if (!t.is_compound()) throw PrologError(ErrorKind::Type, "arg/3 needs a compound term");
  std::int64_t i = n.int_value();
  if (i < 1 || i > static_cast<std::int64_t>(t.arity())) return false;
  return m.unify(a[2], m.args(t)[static_cast<std::size_t>(i - 1)]);
}

bool bi_univ(Machine& m, std::span<const Term> a) {
  Term t = m.deref(a[0]);
  if (!t.is_var()) {
    std::vector<Term> items;
    if (t.is_compound()) {
      items.push_back(Term::atom(t.name()));
      auto args = m.args(t);
      items.insert(items.end(), args.begin(), args.end());
    } else {
      items.push_back(t);
    }
    Term list = m.heap().make_list(items);
    return m.unify(a[1], list);
  }
  std::vector<Term> items;
  Term l = m.deref(a[1]);
  while (l.is_functor(sym::dot, 2)) {
    items.push_back(m.deref(m.args(l)[0]));
    l = m.deref(m.args(l)[1]);
  }
  if (l.is_var()) throw PrologError(ErrorKind::Instantiation, "=../2 needs a term or a proper list");
  if (!l.is_atom(sym::nil) || items.empty()) throw PrologError(ErrorKind::Type, "=../2 needs a non-empty list");
  if (items.size() == 1) return m.unify(t, items[0]);
  if (items[0].is_var()) throw PrologError(ErrorKind::Instantiation, "=../2 functor is unbound");
  if (!items[0].is_atom()) throw PrologError(ErrorKind::Type, "=../2 functor must be an atom");
  Term c = m.heap().make_compound(items[0].name(), std::span<const Term>(items).subspan(1));
  return m.unify(t, c);
}

// Standard order: Var < Number < Atom < Handle < Compound.
int order_class(Term t) {
  switch (t.tag()) {
    case Tag::Var: return 0;
    case Tag::Int:
    case Tag::Float: return 1;
    case Tag::Atom: return 2;
    case Tag::Handle: return 3;
    case Tag::Compound: return 4;
  }
  return 5;
}

int standard_compare(const Machine& m, Term a, Term b) {
  std::vector<std::pair<Term, Term>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    x = m.deref(x);
    y = m.deref(y);
    int cx = order_class(x), cy = order_class(y);
    if (cx != cy) return cx < cy ? -1 : 1;
    switch (x.tag()) {
      case Tag::Var:
        if (x.var_index() != y.var_index()) return x.var_index() < y.var_index() ? -1 : 1;
        continue;
      case Tag::Int:
      case Tag::Float: {
        int c = compare(x.is_float() ? Number::of(x.float_value()) : Number::of(x.int_value()),
                        y.is_float() ? Number::of(y.float_value()) : Number::of(y.int_value()));
        if (c != 0) return c;
        if (x.is_float() != y.is_float()) return x.is_float() ? -1 : 1;
        continue;
      }
      case Tag::Atom: {
        int c = m.symbols().name(x.name()).compare(m.symbols().name(y.name()));
        if (c != 0) return c < 0 ? -1 : 1;
        continue;
      }
      case Tag::Handle:
        if (x.handle_slot() != y.handle_slot()) return x.handle_slot() < y.handle_slot() ? -1 : 1;
        continue;
      case Tag::Compound: {
        if (x.arity() != y.arity()) return x.arity() < y.arity() ? -1 : 1;
        int c = m.symbols().name(x.name()).compare(m.symbols().name(y.name()));
        if (c != 0) return c < 0 ? -1 : 1;
        auto xa = m.args(x), ya = m.args(y);
        for (std::size_t i = xa.size(); i-- > 0;) stack.emplace_back(xa[i], ya[i]);
        continue;
      }
    }
  }
  return 0;
}

template <typename Cmp>
bool order_compare(Machine& m, std::span<const Term> a, Cmp cmp) {
  return cmp(standard_compare(m, a[0], a[1]));
}

bool bi_term_lt(Machine& m, std::span<const Term> a) { return order_compare(m, a, [](int c) { return c < 0; }); }
bool bi_term_gt(Machine& m, std::span<const Term> a) { return order_compare(m, a, [](int c) { return c > 0; }); }
bool bi_term_le(Machine& m, std::span<const Term> a) { return order_compare(m, a, [](int c) { return c <= 0; }); }
bool bi_term_ge(Machine& m, std::span<const Term> a) { return order_compare(m, a, [](int c) { return c >= 0; }); }

bool bi_compare(Machine& m, std::span<const Term> a) {
  int c = standard_compare(m, a[1], a[2]);
  return m.unify(a[0], Term::atom(m.symbols().intern(c < 0 ? "<" : (c > 0 ? ">" : "="))));
}

bool bi_write(Machine& m, std::span<const Term> a) {
  std::cout << m.format(a[0]);
  return true;
}

bool bi_nl(Machine&, std::span<const Term>) {
  std::cout << '\n';
  return true;
}

}  // namespace

void register_builtins(SymbolTable& symbols, std::unordered_map<std::uint64_t, Builtin>& table) {
  auto reg = [&](const char* name, std::uint32_t arity, Builtin fn) {
    table[(std::uint64_t{symbols.intern(name).id} << 32) | arity] = fn;
  };
  reg("=", 2, bi_unify);
  reg("\\=", 2, bi_not_unify);
  reg("==", 2, bi_identical);
  reg("\\==", 2, bi_not_identical);
  reg("is", 2, bi_is);
  reg("<", 2, bi_lt);
  reg(">", 2, bi_gt);
  reg("=<", 2, bi_le);
  reg(">=", 2, bi_ge);
  reg("=:=", 2, bi_eq);
  reg("=\\=", 2, bi_ne);
  reg("var", 1, bi_var);
  reg("nonvar", 1, bi_nonvar);
  reg("atom", 1, bi_atom);
  reg("integer", 1, bi_integer);
  reg("float", 1, bi_float);
  reg("number", 1, bi_number);
  reg("atomic", 1, bi_atomic);
  reg("compound", 1, bi_compound);
  reg("functor", 3, bi_functor);
  reg("arg", 3, bi_arg);
  reg("=..", 2, bi_univ);
  reg("@<", 2, bi_term_lt);
  reg("@>", 2, bi_term_gt);
  reg("@=<", 2, bi_term_le);
  reg("@>=", 2, bi_term_ge);
  reg("compare", 3, bi_compare);
  reg("write", 1, bi_write);
  reg("nl", 0, bi_nl);
}

bool is_control(SymbolId name, std::uint32_t arity, const SymbolTable& symbols) {
  if (arity == 0) return name == sym::true_ || name == sym::fail || name == sym::cut;
  if (arity == 2 && (name == sym::comma || name == sym::semicolon || name == sym::arrow)) {
    return true;
  }
  const std::string& text = symbols.name(name);
  return (arity == 1 && text == "\\+") || (arity >= 1 && arity <= 8 && text == "call");
}

}  // namespace detail

}  // namespace plb
