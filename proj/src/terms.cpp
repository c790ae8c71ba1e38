#include "plb/terms.hpp"

#include <bit>
#include <mutex>
#include <utility>

namespace plb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax_error";
    case ErrorKind::DirectiveUnsupported: return "directive_unsupported";
    case ErrorKind::Existence: return "existence_error";
    case ErrorKind::Instantiation: return "instantiation_error";
    case ErrorKind::Type: return "type_error";
    case ErrorKind::Evaluation: return "evaluation_error";
    case ErrorKind::Overflow: return "overflow_error";
    case ErrorKind::StepBudget: return "step_budget_exceeded";
    case ErrorKind::Cycle: return "cycle_error";
    case ErrorKind::Permission: return "permission_error";
    case ErrorKind::Resource: return "resource_error";
    case ErrorKind::Boundary: return "boundary_error";
  }
  return "unknown_error";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message, SourcePos pos) {
  std::string out(to_string(kind));
  if (pos.line != 0) {
    out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

PrologError::PrologError(ErrorKind kind, const std::string& message, SourcePos pos)
    : std::runtime_error(compose(kind, message, pos)), kind_(kind), pos_(pos), detail_(message) {}

SymbolTable::SymbolTable() {
  for (const char* n : {"[]", ".", "{}", ",", "true", "fail", "!", ";", "->", ":-", "-", "|"}) {
    intern(n);
  }
}

SymbolId SymbolTable::intern(std::string_view name) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = ids_.find(name); it != ids_.end()) return SymbolId{it->second};
  }
  std::unique_lock lock(mutex_);
  if (auto it = ids_.find(name); it != ids_.end()) return SymbolId{it->second};
  auto id = static_cast<std::uint32_t>(names_.size());
  const std::string& stored = names_.emplace_back(name);
  ids_.emplace(std::string_view(stored), id);
  return SymbolId{id};
}

const std::string& SymbolTable::name(SymbolId id) const {
  std::shared_lock lock(mutex_);
  return names_.at(id.id);
}

std::size_t SymbolTable::size() const {
  std::shared_lock lock(mutex_);
  return names_.size();
}

Term Term::floating(double v) {
  return Term(Tag::Float, 0, 0, std::bit_cast<std::uint64_t>(v));
}

double Term::float_value() const { return std::bit_cast<double>(u_); }

Term TermArena::make_compound(SymbolId f, std::span<const Term> args) {
  auto offset = cells_.size();
  cells_.insert(cells_.end(), args.begin(), args.end());
  return Term::compound(f, static_cast<std::uint32_t>(args.size()), offset);
}

Term TermArena::alloc_compound(SymbolId f, std::uint32_t arity) {
  auto offset = cells_.size();
  cells_.resize(offset + arity);
  return Term::compound(f, arity, offset);
}

Term TermArena::make_list(std::span<const Term> items, Term tail) {
  Term list = tail;
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    Term pair[2] = {*it, list};
    list = make_compound(sym::dot, pair);
  }
  return list;
}

Term VarStore::fresh_var() {
  if (cells_.size() >= capacity_) {
    throw PrologError(ErrorKind::Resource, "variable store capacity exhausted");
  }
  auto i = static_cast<std::uint32_t>(cells_.size());
  cells_.push_back(Term::var(i));
  return Term::var(i);
}

std::uint32_t VarStore::fresh_block(std::uint32_t n) {
  if (cells_.size() + n > capacity_) {
    throw PrologError(ErrorKind::Resource, "variable store capacity exhausted");
  }
  auto first = static_cast<std::uint32_t>(cells_.size());
  for (std::uint32_t i = 0; i < n; ++i) cells_.push_back(Term::var(first + i));
  return first;
}

Term deref(const VarStore& store, Term t) {
  std::size_t budget = store.size() + 1;
  while (t.is_var()) {
    Term next = store.cell(t.var_index());
    if (next == t) return t;
    if (budget-- == 0) throw PrologError(ErrorKind::Cycle, "cyclic variable binding");
    t = next;
  }
  return t;
}

void Trail::undo_to(VarStore& store, TrailMark m) {
  if (m > entries_.size()) {
    throw std::logic_error("Trail::undo_to: mark beyond trail length");
  }
  for (std::size_t i = entries_.size(); i > m; --i) {
    std::uint32_t cell = entries_[i - 1];
    // Cells above a truncated store top are already gone.
    if (cell < store.size()) store.reset(cell);
  }
  entries_.resize(m);
}

bool variant_equal(const TermArena& a_arena, Term a, const TermArena& b_arena, Term b) {
  std::unordered_map<std::uint32_t, std::uint32_t> a_to_b;
  std::unordered_map<std::uint32_t, std::uint32_t> b_to_a;
  std::vector<std::pair<Term, Term>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (x.tag() != y.tag()) return false;
    switch (x.tag()) {
      case Tag::Var: {
        auto [ia, fresh_a] = a_to_b.try_emplace(x.var_index(), y.var_index());
        auto [ib, fresh_b] = b_to_a.try_emplace(y.var_index(), x.var_index());
        if (ia->second != y.var_index() || ib->second != x.var_index()) return false;
        break;
      }
      case Tag::Compound: {
        if (x.name() != y.name() || x.arity() != y.arity()) return false;
        auto xs = a_arena.args(x);
        auto ys = b_arena.args(y);
        for (std::size_t i = xs.size(); i > 0; --i) stack.emplace_back(xs[i - 1], ys[i - 1]);
        break;
      }
      case Tag::Float:
        // Bitwise, so NaN payloads and -0.0 compare as written.
        if (!(x == y)) return false;
        break;
      default:
        if (!(x == y)) return false;
    }
  }
  return true;
}

bool is_list(const TermArena& arena, Term t) {
  while (t.is_functor(sym::dot, 2)) t = arena.arg(t, 1);
  return t.is_atom(sym::nil);
}

std::size_t list_length(const TermArena& arena, Term t) {
  std::size_t n = 0;
  while (t.is_functor(sym::dot, 2)) {
    ++n;
    t = arena.arg(t, 1);
  }
  return n;
}

}  // namespace plb
