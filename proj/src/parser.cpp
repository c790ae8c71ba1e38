#include <charconv>
#include <cstdlib>

#include "plb/reader.hpp"

namespace plb {

const OperatorTable& OperatorTable::standard() {
  static const OperatorTable table = [] {
    OperatorTable t;
    t.add(":-", 1200, OpType::xfx);
    t.add(":-", 1200, OpType::fx);
    t.add("?-", 1200, OpType::fx);
    t.add(";", 1100, OpType::xfy);
    t.add("->", 1050, OpType::xfy);
    t.add(",", 1000, OpType::xfy);
    t.add("\\+", 900, OpType::fy);
    for (const char* op : {"=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "<", ">", "=<",
                           ">=", "=:=", "=\\="}) {
      t.add(op, 700, OpType::xfx);
    }
    for (const char* op : {"+", "-", "/\\", "\\/", "xor"}) t.add(op, 500, OpType::yfx);
    for (const char* op : {"*", "/", "//", "rem", "mod", "div", "<<", ">>"}) t.add(op, 400, OpType::yfx);
    t.add("**", 200, OpType::xfx);
    t.add("^", 200, OpType::xfy);
    for (const char* op : {"-", "+", "\\"}) t.add(op, 200, OpType::fy);
    return t;
  }();
  return table;
}

void OperatorTable::add(std::string name, int priority, OpType type) {
  auto& e = entries_[std::move(name)];
  OpDef def{priority, type};
  switch (type) {
    case OpType::fy:
    case OpType::fx: e.prefix = def; break;
    case OpType::xf:
    case OpType::yf: e.postfix = def; break;
    default: e.infix = def;
  }
}

std::optional<OpDef> OperatorTable::prefix(std::string_view name) const {
  auto it = entries_.find(std::string(name));
  return it == entries_.end() ? std::nullopt : it->second.prefix;
}

std::optional<OpDef> OperatorTable::infix(std::string_view name) const {
  auto it = entries_.find(std::string(name));
  return it == entries_.end() ? std::nullopt : it->second.infix;
}

std::optional<OpDef> OperatorTable::postfix(std::string_view name) const {
  auto it = entries_.find(std::string(name));
  return it == entries_.end() ? std::nullopt : it->second.postfix;
}

bool OperatorTable::is_op(std::string_view name) const {
  return entries_.find(std::string(name)) != entries_.end();
}

TermReader::TermReader(std::span<const Token> tokens, SourcePos eof, const OperatorTable& ops,
                       SymbolTable& symbols)
    : tokens_(tokens), eof_(eof), ops_(ops), symbols_(symbols) {}

const Token& TermReader::peek() const {
  static const Token kEof{};
  return pos_ < tokens_.size() ? tokens_[pos_] : kEof;
}

const Token& TermReader::next() {
  const Token& t = peek();
  if (pos_ >= tokens_.size()) fail("unexpected end of input");
  ++pos_;
  return t;
}

SourcePos TermReader::here() const { return pos_ < tokens_.size() ? tokens_[pos_].pos : eof_; }

void TermReader::fail(const std::string& msg) const { fail_at(msg, here()); }

void TermReader::fail_at(const std::string& msg, SourcePos pos) const {
  throw PrologError(ErrorKind::Syntax, msg, pos);
}

bool TermReader::peek_punct(std::string_view p) const {
  return pos_ < tokens_.size() && peek().kind == TokenKind::Punct && peek().text == p;
}

void TermReader::expect_punct(std::string_view p) {
  if (!peek_punct(p)) {
    if (pos_ >= tokens_.size()) fail("unexpected end of input, expected '" + std::string(p) + "'");
    fail("expected '" + std::string(p) + "' but found '" + peek().text + "'");
  }
  ++pos_;
}

void TermReader::begin_term() {
  arena_.clear();
  n_vars_ = 0;
  names_.clear();
}

Term TermReader::variable(const std::string& name) {
  if (name == "_") return Term::var(n_vars_++);
  for (const auto& [n, idx] : names_) {
    if (n == name) return Term::var(idx);
  }
  names_.emplace_back(name, n_vars_);
  return Term::var(n_vars_++);
}

Term TermReader::make_number(const Token& tok, bool negative) {
  if (tok.kind == TokenKind::Float) {
    double v = std::strtod(tok.text.c_str(), nullptr);
    return Term::floating(negative ? -v : v);
  }
  std::string text = negative ? "-" + tok.text : tok.text;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail_at("integer out of 64-bit range: " + text, tok.pos);
  }
  return Term::integer(v);
}

// Whether token i can begin a term (used to decide if a prefix operator
// has an operand or stands alone as an atom).
bool TermReader::starts_term(std::size_t i) const {
  if (i >= tokens_.size()) return false;
  const Token& t = tokens_[i];
  switch (t.kind) {
    case TokenKind::Variable:
    case TokenKind::Integer:
    case TokenKind::Float:
    case TokenKind::String:
      return true;
    case TokenKind::Punct:
      return t.text == "(" || t.text == "[" || t.text == "{";
    case TokenKind::Atom: {
      if (t.quoted) return true;
      bool fn = i + 1 < tokens_.size() && tokens_[i + 1].kind == TokenKind::Punct &&
                tokens_[i + 1].text == "(" && !tokens_[i + 1].layout_before;
      if (fn) return true;
      return !(ops_.infix(t.text) || ops_.postfix(t.text)) || ops_.prefix(t.text).has_value();
    }
    case TokenKind::End:
      return false;
  }
  return false;
}

std::vector<Term> TermReader::parse_arglist() {
  std::vector<Term> args;
  expect_punct("(");
  for (;;) {
    args.push_back(parse(999).term);
    if (peek_punct(",")) {
      ++pos_;
      continue;
    }
    expect_punct(")");
    return args;
  }
}

Term TermReader::parse_list() {
  // '[' already consumed, and the list is non-empty.
  std::vector<Term> items;
  Term tail = Term::atom(sym::nil);
  for (;;) {
    items.push_back(parse(999).term);
    if (peek_punct(",")) {
      ++pos_;
      continue;
    }
    if (peek_punct("|")) {
      ++pos_;
      tail = parse(999).term;
    }
    expect_punct("]");
    return arena_.make_list(items, tail);
  }
}

TermReader::Parsed TermReader::parse_name(const Token& tok, int max_priority) {
  SymbolId name = symbols_.intern(tok.text);

  // Functional notation: name immediately followed by '('.
  if (peek_punct("(") && !peek().layout_before) {
    auto args = parse_arglist();
    if (args.size() > kMaxArity) fail_at("arity too large", tok.pos);
    return {arena_.make_compound(name, args), 0};
  }

  // Negative numeric literal.
  if (!tok.quoted && tok.text == "-" && pos_ < tokens_.size() && !peek().layout_before &&
      (peek().kind == TokenKind::Integer || peek().kind == TokenKind::Float)) {
    const Token& num = next();
    return {make_number(num, true), 0};
  }

  if (!tok.quoted) {
    if (auto op = ops_.prefix(tok.text); op && starts_term(pos_)) {
      // An infix operator right after a prefix-op atom means the atom is an operand.
      const Token& nt = peek();
      bool infix_follows = nt.kind == TokenKind::Atom && !nt.quoted && ops_.infix(nt.text) &&
                           !ops_.prefix(nt.text) &&
                           !(pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == "(" &&
                             !tokens_[pos_ + 1].layout_before);
      if (!infix_follows) {
        int p = op->priority;
        if (p > max_priority) fail_at("operator priority clash for '" + tok.text + "'", tok.pos);
        int arg_max = op->type == OpType::fy ? p : p - 1;
        Parsed operand = parse(arg_max);
        Term args[1] = {operand.term};
        return {arena_.make_compound(name, args), p};
      }
    }
  }
  return {Term::atom(name), 0};
}

TermReader::Parsed TermReader::parse_primary(int max_priority) {
  if (pos_ >= tokens_.size()) fail("unexpected end of input");
  const Token& tok = next();
  switch (tok.kind) {
    case TokenKind::Integer:
    case TokenKind::Float:
      return {make_number(tok, false), 0};
    case TokenKind::Variable:
      return {variable(tok.text), 0};
    case TokenKind::String:
      return {Term::atom(symbols_.intern(tok.text)), 0};
    case TokenKind::Atom:
      return parse_name(tok, max_priority);
    case TokenKind::End:
      fail_at("unexpected end of clause", tok.pos);
    case TokenKind::Punct:
      break;
  }
  if (tok.text == "(") {
    Parsed inner = parse(1200);
    expect_punct(")");
    return {inner.term, 0};
  }
  if (tok.text == "[") {
    if (peek_punct("]")) {
      ++pos_;
      return {Term::atom(sym::nil), 0};
    }
    return {parse_list(), 0};
  }
  if (tok.text == "{") {
    if (peek_punct("}")) {
      ++pos_;
      return {Term::atom(sym::curly), 0};
    }
    Parsed inner = parse(1200);
    expect_punct("}");
    Term args[1] = {inner.term};
    return {arena_.make_compound(sym::curly, args), 0};
  }
  fail_at("unexpected '" + tok.text + "'", tok.pos);
}

TermReader::Parsed TermReader::parse(int max_priority) {
  Parsed left = parse_primary(max_priority);
  for (;;) {
    if (pos_ >= tokens_.size()) break;
    const Token& tok = peek();
    std::string_view name;
    if (tok.kind == TokenKind::Atom && !tok.quoted) {
      name = tok.text;
    } else if (tok.kind == TokenKind::Punct && tok.text == ",") {
      name = ",";
    } else {
      break;
    }
    if (auto op = ops_.infix(name)) {
      int p = op->priority;
      int left_max = op->type == OpType::yfx ? p : p - 1;
      int right_max = op->type == OpType::xfy ? p : p - 1;
      if (p <= max_priority && left.priority <= left_max) {
        ++pos_;
        Parsed right = parse(right_max);
        Term args[2] = {left.term, right.term};
        left = {arena_.make_compound(symbols_.intern(name), args), p};
        continue;
      }
    }
    if (auto op = ops_.postfix(name)) {
      int p = op->priority;
      int left_max = op->type == OpType::yf ? p : p - 1;
      if (p <= max_priority && left.priority <= left_max) {
        ++pos_;
        Term args[1] = {left.term};
        left = {arena_.make_compound(symbols_.intern(name), args), p};
        continue;
      }
    }
    break;
  }
  return left;
}

ParsedTerm TermReader::read_term(int max_priority) {
  begin_term();
  Parsed p = parse(max_priority);
  ParsedTerm out;
  out.tree.root = p.term;
  out.tree.n_vars = n_vars_;
  out.tree.arena = std::move(arena_);
  out.var_names = std::move(names_);
  arena_ = TermArena{};
  names_ = {};
  return out;
}

std::optional<ParsedTerm> TermReader::read_clause() {
  if (at_end()) return std::nullopt;
  ParsedTerm t = read_term(1200);
  if (pos_ >= tokens_.size()) fail("missing '.' at end of clause");
  if (peek().kind != TokenKind::End) fail("operator expected, found '" + peek().text + "'");
  ++pos_;
  return t;
}

ParsedTerm TermReader::read_goal() {
  ParsedTerm t = read_term(1200);
  if (pos_ < tokens_.size() && peek().kind == TokenKind::End) ++pos_;
  if (pos_ < tokens_.size()) fail("unexpected '" + peek().text + "' after term");
  return t;
}

ParsedTerm parse_term(std::string_view text, SymbolTable& symbols, const OperatorTable& ops) {
  SourcePos eof;
  auto tokens = tokenize(text, &eof);
  if (tokens.empty()) throw PrologError(ErrorKind::Syntax, "empty term", eof);
  TermReader reader(tokens, eof, ops, symbols);
  return reader.read_goal();
}

ParsedTerm parse_term(std::span<const Token> tokens, const OperatorTable& ops, int max_priority,
                      SymbolTable& symbols) {
  SourcePos eof = tokens.empty() ? SourcePos{1, 1, 0} : tokens.back().pos;
  TermReader reader(tokens, eof, ops, symbols);
  return reader.read_term(max_priority);
}

namespace {

void flatten_conjunction(const TermArena& arena, Term body, std::vector<Term>& out) {
  while (body.is_functor(sym::comma, 2)) {
    flatten_conjunction(arena, arena.arg(body, 0), out);
    body = arena.arg(body, 1);
  }
  if (!body.is_atom(sym::true_)) out.push_back(body);
}

void check_callable(const TermArena& arena, Term body) {
  std::vector<Term> pending{body};
  while (!pending.empty()) {
    Term g = pending.back();
    pending.pop_back();
    if (g.is_int() || g.is_float() || g.is_handle()) {
      throw PrologError(ErrorKind::Type, "clause body goal is not callable");
    }
    if (g.is_functor(sym::comma, 2) || g.is_functor(sym::semicolon, 2) || g.is_functor(sym::arrow, 2)) {
      pending.push_back(arena.arg(g, 0));
      pending.push_back(arena.arg(g, 1));
    }
  }
}

}  // namespace

Clause Clause::from_term(ParsedTerm parsed) {
  Clause c;
  c.n_vars = parsed.tree.n_vars;
  c.arena = std::move(parsed.tree.arena);
  Term root = parsed.tree.root;
  if (root.is_functor(sym::neck, 2)) {
    c.head = c.arena.arg(root, 0);
    c.body = c.arena.arg(root, 1);
  } else {
    c.head = root;
    c.body = Term::atom(sym::true_);
  }
  if (!(c.head.is_atom() || c.head.is_compound())) {
    throw PrologError(ErrorKind::Type, "clause head must be an atom or compound term");
  }
  check_callable(c.arena, c.body);
  flatten_conjunction(c.arena, c.body, c.goals);
  return c;
}

std::vector<Clause> parse_program(std::string_view src, SymbolTable& symbols) {
  SourcePos eof;
  auto tokens = tokenize(src, &eof);
  TermReader reader(tokens, eof, OperatorTable::standard(), symbols);
  std::vector<Clause> clauses;
  while (!reader.at_end()) {
    std::size_t index = clauses.size() + 1;
    std::optional<ParsedTerm> t;
    try {
      t = reader.read_clause();
    } catch (const PrologError& e) {
      throw PrologError(e.kind(), "clause " + std::to_string(index) + ": " + e.detail(), e.pos());
    }
    if (t->tree.root.is_functor(sym::neck, 1)) {
      throw PrologError(ErrorKind::DirectiveUnsupported,
                        "clause " + std::to_string(index) + ": directives are not supported");
    }
    clauses.push_back(Clause::from_term(std::move(*t)));
  }
  return clauses;
}

}  // namespace plb
