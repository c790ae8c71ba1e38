#include "plb/engine.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "builtins.hpp"

namespace plb {

std::optional<IndexKey> index_key_of(Term t) {
  switch (t.tag()) {
    case Tag::Var: return std::nullopt;
    case Tag::Atom: return IndexKey{Tag::Atom, t.name().id, 0, 0};
    case Tag::Int: return IndexKey{Tag::Int, 0, 0, static_cast<std::uint64_t>(t.int_value())};
    case Tag::Float: return IndexKey{Tag::Float, 0, 0, std::bit_cast<std::uint64_t>(t.float_value())};
    case Tag::Compound: return IndexKey{Tag::Compound, t.name().id, t.arity(), 0};
    case Tag::Handle: return IndexKey{Tag::Handle, 0, 0, t.handle_slot()};
  }
  return std::nullopt;
}

std::size_t IndexKeyHash::operator()(const IndexKey& k) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(k.tag) * 0x9e3779b97f4a7c15ULL;
  h ^= (std::uint64_t{k.name} << 24 | k.arity) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= k.payload + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// Database

Database::Database(std::shared_ptr<SymbolTable> symbols) : symbols_(std::move(symbols)) {
  detail::register_builtins(*symbols_, builtins_);
}

void Database::consult(std::string_view source) {
  for (auto& clause : parse_program(source, *symbols_)) assertz(std::move(clause));
}

void Database::assertz(Clause clause) {
  SymbolId name = clause.head.name();
  std::uint32_t arity = clause.head.is_compound() ? clause.head.arity() : 0;
  if (is_builtin(name, arity)) {
    throw PrologError(ErrorKind::Permission, "cannot redefine builtin " + symbols_->name(name) +
                                                 "/" + std::to_string(arity));
  }
  auto [it, inserted] = preds_.try_emplace(pred_key(name, arity));
  Predicate& pred = it->second;
  if (inserted) {
    pred.name = name;
    pred.arity = arity;
  }
  auto pos = static_cast<std::uint32_t>(pred.clauses.size());
  std::optional<IndexKey> key;
  if (arity > 0) key = index_key_of(clause.arena.arg(clause.head, 0));
  pred.clauses.push_back(std::move(clause));
  pred.all.push_back(pos);
  if (arity == 0) return;
  if (!key) {
    pred.var_clauses.push_back(pos);
    for (auto& [k, bucket] : pred.buckets) bucket.push_back(pos);
    return;
  }
  auto [bit, fresh] = pred.buckets.try_emplace(*key);
  if (fresh) bit->second = pred.var_clauses;  // earlier variable-headed clauses precede
  bit->second.push_back(pos);
}

const Database::Predicate* Database::find(SymbolId name, std::uint32_t arity) const {
  auto it = preds_.find(pred_key(name, arity));
  return it == preds_.end() ? nullptr : &it->second;
}

std::span<const std::uint32_t> Database::candidates(const Predicate& pred,
                                                    const std::optional<IndexKey>& key) {
  if (pred.arity == 0 || !key) return pred.all;
  auto it = pred.buckets.find(*key);
  if (it == pred.buckets.end()) return pred.var_clauses;
  return it->second;
}

std::span<const std::uint32_t> Database::index_lookup(SymbolId name, std::uint32_t arity,
                                                      const std::optional<IndexKey>& key) const {
  const Predicate* pred = find(name, arity);
  if (pred == nullptr) {
    throw PrologError(ErrorKind::Existence,
                      "unknown predicate " + symbols_->name(name) + "/" + std::to_string(arity));
  }
  return candidates(*pred, key);
}

Builtin Database::builtin(SymbolId name, std::uint32_t arity) const {
  auto it = builtins_.find(pred_key(name, arity));
  return it == builtins_.end() ? nullptr : it->second;
}

bool Database::is_builtin(SymbolId name, std::uint32_t arity) const {
  return builtin(name, arity) != nullptr || detail::is_control(name, arity, *symbols_);
}

std::size_t Database::clause_count() const {
  std::size_t n = 0;
  for (const auto& [k, p] : preds_) n += p.clauses.size();
  return n;
}

// ---------------------------------------------------------------------------
// Machine

Machine::Machine(std::shared_ptr<const Database> db, EngineOptions options)
    : db_(std::move(db)), options_(options) {
  frames_.push_back(Frame{});  // index 0 is the empty goal list
}

Term Machine::relocate(Term t, std::uint64_t heap_base, std::uint32_t var_base) const {
  switch (t.tag()) {
    case Tag::Compound: return Term::compound(t.name(), t.arity(), t.args_offset() + heap_base);
    case Tag::Var: return Term::var(t.var_index() + var_base);
    default: return t;
  }
}

// Bulk copy: every cell of a detached arena is reachable, so the arena is
// appended wholesale with offsets and variable numbers shifted.
Term Machine::copy_in(const TermArena& src, Term root, std::uint32_t n_vars) {
  std::uint64_t heap_base = heap_.size();
  std::uint32_t var_base = n_vars > 0 ? store_.fresh_block(n_vars) : 0;
  auto& raw = heap_.raw();
  for (Term cell : src.cells()) raw.push_back(relocate(cell, heap_base, var_base));
  return relocate(root, heap_base, var_base);
}

LoadedQuery Machine::load(const ParsedTerm& parsed) {
  std::uint32_t var_base = static_cast<std::uint32_t>(store_.size());
  LoadedQuery q;
  q.goal = copy_in(parsed.tree.arena, parsed.tree.root, parsed.tree.n_vars);
  for (const auto& [name, idx] : parsed.var_names) q.vars.push_back({name, Term::var(var_base + idx)});
  return q;
}

Term Machine::import(const TermTree& tree) { return copy_in(tree.arena, tree.root, tree.n_vars); }

void Machine::start(Term goal) {
  cps_.clear();
  frames_.resize(1);
  goal_ = push_frame(goal, kNil, 0);
  base_ = tops();
  gc_next_ = 0;
  status_ = SolveStatus::Running;
}

std::uint32_t Machine::push_frame(Term goal, std::uint32_t next, std::uint32_t barrier,
                                  FrameKind kind) {
  frames_.push_back(Frame{goal, next, barrier, kind});
  return static_cast<std::uint32_t>(frames_.size() - 1);
}

void Machine::push_goal_cp(std::uint32_t alt, std::uint32_t cont) {
  ChoicePoint cp;
  cp.kind = ChoicePoint::Kind::Goal;
  cp.tops = tops();
  cp.cont = cont;
  cp.alt = alt;
  cps_.push_back(cp);
}

void Machine::restore(const Tops& t) {
  trail_.undo_to(store_, t.trail);
  store_.truncate(t.vars);
  heap_.truncate(t.heap);
  frames_.resize(t.frames);
}

void Machine::cut_to(std::uint32_t height) {
  if (cps_.size() > height) cps_.resize(height);
}

void Machine::count_step() {
  if (++steps_ > options_.step_budget) {
    throw PrologError(ErrorKind::StepBudget,
                      "step budget of " + std::to_string(options_.step_budget) + " exceeded");
  }
}

void Machine::finish_exhausted() {
  cps_.clear();
  restore(base_);
  frames_.resize(1);
  goal_ = kNil;
  status_ = SolveStatus::Exhausted;
}

SolveStatus Machine::solve_next() {
  if (status_ == SolveStatus::Exhausted) return status_;
  try {
    if (status_ == SolveStatus::Succeeded) {
      if (!backtrack()) {
        finish_exhausted();
        return status_;
      }
    }
    status_ = SolveStatus::Running;
    run();
  } catch (...) {
    finish_exhausted();
    throw;
  }
  if (status_ == SolveStatus::Exhausted) finish_exhausted();
  return status_;
}

void Machine::run() {
  if (gc_next_ == 0) gc_next_ = footprint() + options_.gc_min_cells;
  for (;;) {
    if (options_.gc && footprint() > gc_next_) {
      collect();
      gc_next_ = std::max(footprint() * 2, footprint() + options_.gc_min_cells);
    }
    if (goal_ == kNil) {
      status_ = SolveStatus::Succeeded;
      return;
    }
    Frame frame = frames_[goal_];
    goal_ = frame.next;
    if (!step(frame) && !backtrack()) {
      status_ = SolveStatus::Exhausted;
      return;
    }
  }
}

bool Machine::step(const Frame& frame) {
  if (frame.kind == FrameKind::CutTo) {
    cut_to(frame.cut_barrier);
    return true;
  }
  count_step();
  Term goal = deref(frame.goal);
  const std::uint32_t cont = goal_;
  const std::uint32_t barrier = frame.cut_barrier;

  if (goal.is_var()) throw PrologError(ErrorKind::Instantiation, "goal is an unbound variable");
  if (!goal.is_atom() && !goal.is_compound()) {
    throw PrologError(ErrorKind::Type, "goal is not callable: " + format(goal));
  }

  SymbolId name = goal.name();
  std::uint32_t arity = goal.is_compound() ? goal.arity() : 0;

  if (arity == 0) {
    if (name == sym::true_) return true;
    if (name == sym::fail) return false;
    if (name == sym::cut) {
      cut_to(barrier);
      return true;
    }
  } else if (arity == 2 && name == sym::comma) {
    auto a = args(goal);
    Term left = a[0], right = a[1];
    std::uint32_t rest = push_frame(right, cont, barrier);
    goal_ = push_frame(left, rest, barrier);
    return true;
  } else if (arity == 2 && name == sym::semicolon) {
    auto a = args(goal);
    Term left = a[0], right = a[1];
    Term lhs = deref(left);
    if (lhs.is_functor(sym::arrow, 2)) {
      // (Cond -> Then ; Else)
      Term cond = args(lhs)[0], then = args(lhs)[1];
      std::uint32_t else_frame = push_frame(right, cont, barrier);
      auto height = static_cast<std::uint32_t>(cps_.size());
      push_goal_cp(else_frame, cont);
      std::uint32_t then_frame = push_frame(then, cont, barrier);
      std::uint32_t commit = push_frame(Term{}, then_frame, height, FrameKind::CutTo);
      goal_ = push_frame(cond, commit, height + 1);
      return true;
    }
    std::uint32_t alt = push_frame(right, cont, barrier);
    push_goal_cp(alt, cont);
    goal_ = push_frame(left, cont, barrier);
    return true;
  } else if (arity == 2 && name == sym::arrow) {
    // (Cond -> Then) fails when Cond fails.
    auto a = args(goal);
    Term cond = a[0], then = a[1];
    auto height = static_cast<std::uint32_t>(cps_.size());
    std::uint32_t then_frame = push_frame(then, cont, barrier);
    std::uint32_t commit = push_frame(Term{}, then_frame, height, FrameKind::CutTo);
    goal_ = push_frame(cond, commit, height);
    return true;
  }

  const std::string& text = symbols().name(name);
  if (arity == 1 && text == "\\+") {
    Term inner = args(goal)[0];
    auto height = static_cast<std::uint32_t>(cps_.size());
    std::uint32_t else_frame = push_frame(Term::atom(sym::true_), cont, barrier);
    push_goal_cp(else_frame, cont);
    std::uint32_t fail_frame = push_frame(Term::atom(sym::fail), cont, barrier);
    std::uint32_t commit = push_frame(Term{}, fail_frame, height, FrameKind::CutTo);
    goal_ = push_frame(inner, commit, height + 1);
    return true;
  }
  if (arity >= 1 && text == "call") {
    auto a = args(goal);
    Term target = deref(a[0]);
    if (arity > 1) {
      if (target.is_var()) throw PrologError(ErrorKind::Instantiation, "call/N on unbound goal");
      std::vector<Term> all;
      if (target.is_compound()) {
        auto ta = args(target);
        all.assign(ta.begin(), ta.end());
      } else if (!target.is_atom()) {
        throw PrologError(ErrorKind::Type, "call/N on non-callable " + format(target));
      }
      all.insert(all.end(), a.begin() + 1, a.end());
      target = heap_.make_compound(target.name(), all);
    }
    // call/N is opaque to cut.
    goal_ = push_frame(target, cont, static_cast<std::uint32_t>(cps_.size()));
    return true;
  }

  if (Builtin fn = db_->builtin(name, arity)) {
    std::span<const Term> a;
    if (arity > 0) a = args(goal);
    // Builtins may grow the heap; copy arguments out first.
    Term buf[8];
    std::vector<Term> big;
    if (arity <= 8) {
      std::copy(a.begin(), a.end(), buf);
      a = std::span<const Term>(buf, arity);
    } else {
      big.assign(a.begin(), a.end());
      a = big;
    }
    return fn(*this, a);
  }
  return call_user(goal, cont);
}

bool Machine::call_user(Term goal, std::uint32_t cont) {
  SymbolId name = goal.name();
  std::uint32_t arity = goal.is_compound() ? goal.arity() : 0;
  const Database::Predicate* pred = db_->find(name, arity);
  if (pred == nullptr) {
    if (options_.unknown_fails) return false;
    throw PrologError(ErrorKind::Existence,
                      "unknown predicate " + symbols().name(name) + "/" + std::to_string(arity));
  }
  std::span<const std::uint32_t> cands;
  if (options_.indexing && arity > 0) {
    cands = Database::candidates(*pred, index_key_of(deref(args(goal)[0])));
  } else {
    cands = pred->all;
  }
  return try_clauses(goal, *pred, cands.data(), static_cast<std::uint32_t>(cands.size()), 0, cont,
                     static_cast<std::uint32_t>(cps_.size()), false);
}

bool Machine::try_clauses(Term goal, const Database::Predicate& pred, const std::uint32_t* cands,
                          std::uint32_t n_cands, std::uint32_t start, std::uint32_t cont,
                          std::uint32_t cut_parent, bool cp_exists) {
  const Tops snap = cp_exists ? cps_.back().tops : tops();
  for (std::uint32_t i = start; i < n_cands; ++i) {
    if (i > start) count_step();
    if (i + 1 < n_cands) {
      if (!cp_exists) {
        ChoicePoint cp;
        cp.kind = ChoicePoint::Kind::Clauses;
        cp.tops = snap;
        cp.cont = cont;
        cp.goal = goal;
        cp.pred = &pred;
        cp.cands = cands;
        cp.n_cands = n_cands;
        cp.cut_parent = cut_parent;
        cps_.push_back(cp);
        cp_exists = true;
      }
      cps_.back().next = i + 1;
    } else if (cp_exists) {
      cps_.pop_back();
      cp_exists = false;
    }

    const Clause& clause = pred.clauses[cands[i]];
    std::uint64_t heap_base = heap_.size();
    std::uint32_t var_base = static_cast<std::uint32_t>(store_.size());
    copy_in(clause.arena, Term{}, clause.n_vars);

    bool ok = true;
    if (pred.arity > 0) {
      Term head = relocate(clause.head, heap_base, var_base);
      auto goal_args = args(goal);
      for (std::uint32_t k = 0; k < pred.arity && ok; ++k) {
        ok = unify(goal_args[k], heap_.arg(head, k));
      }
    }
    if (ok) {
      std::uint32_t next = cont;
      for (auto it = clause.goals.rbegin(); it != clause.goals.rend(); ++it) {
        next = push_frame(relocate(*it, heap_base, var_base), next, cut_parent);
      }
      goal_ = next;
      return true;
    }
    restore(snap);
  }
  if (cp_exists) cps_.pop_back();
  return false;
}

bool Machine::backtrack() {
  while (!cps_.empty()) {
    ChoicePoint cp = cps_.back();
    restore(cp.tops);
    if (cp.kind == ChoicePoint::Kind::Goal) {
      cps_.pop_back();
      goal_ = cp.alt;
      return true;
    }
    count_step();
    if (try_clauses(cp.goal, *cp.pred, cp.cands, cp.n_cands, cp.next, cp.cont, cp.cut_parent,
                    true)) {
      return true;
    }
  }
  return false;
}

bool Machine::unify(Term a, Term b) {
  const TrailMark mark = trail_.mark();
  auto& stack = unify_stack_;
  stack.clear();
  stack.emplace_back(a, b);
  std::size_t budget = 4 * (heap_.size() + store_.size()) + 1024;
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    x = deref(x);
    y = deref(y);
    if (x == y) continue;
    if (budget-- == 0) {
      trail_.undo_to(store_, mark);
      throw PrologError(ErrorKind::Cycle, "unification budget exceeded on cyclic terms");
    }
    if (x.is_var()) {
      if (y.is_var() && y.var_index() > x.var_index()) {
        bind(store_, trail_, y.var_index(), x);  // younger points at older
      } else {
        bind(store_, trail_, x.var_index(), y);
      }
      continue;
    }
    if (y.is_var()) {
      bind(store_, trail_, y.var_index(), x);
      continue;
    }
    if (x.is_compound() && y.is_compound() && x.name() == y.name() && x.arity() == y.arity()) {
      auto xs = args(x);
      auto ys = args(y);
      for (std::size_t i = xs.size(); i > 0; --i) stack.emplace_back(xs[i - 1], ys[i - 1]);
      continue;
    }
    trail_.undo_to(store_, mark);
    return false;
  }
  return true;
}

TermTree Machine::detach(Term t) const {
  TermTree out;
  std::unordered_map<std::uint32_t, std::uint32_t> locals;
  std::size_t budget = 8 * (heap_.size() + store_.size()) + 4096;
  std::vector<std::pair<Term, std::uint64_t>> pending;

  auto translate = [&](Term src) -> Term {
    Term s = deref(src);
    if (s.is_var()) {
      auto [it, fresh] = locals.try_emplace(s.var_index(), out.n_vars);
      if (fresh) ++out.n_vars;
      return Term::var(it->second);
    }
    if (s.is_compound()) {
      if (budget < s.arity()) throw PrologError(ErrorKind::Cycle, "cannot copy a cyclic term");
      budget -= s.arity();
      Term dst = out.arena.alloc_compound(s.name(), s.arity());
      auto src_args = args(s);
      for (std::size_t i = src_args.size(); i > 0; --i) {
        pending.emplace_back(src_args[i - 1], dst.args_offset() + i - 1);
      }
      return dst;
    }
    return s;
  };

  out.root = translate(t);
  while (!pending.empty()) {
    auto [src, slot] = pending.back();
    pending.pop_back();
    Term v = translate(src);
    out.arena.set(slot, v);
  }
  return out;
}

Answer Machine::snapshot_answer(std::span<const QueryVar> vars) const {
  if (status_ != SolveStatus::Succeeded) {
    throw std::logic_error("snapshot_answer requires a succeeded machine");
  }
  Answer answer;
  answer.reserve(vars.size());
  for (const auto& v : vars) answer.emplace_back(v.name, detach(v.var));
  return answer;
}

std::string Machine::format(Term t) const {
  return format_term(heap_, t, symbols(), OperatorTable::standard(), &store_);
}

bool identical(const Machine& m, Term a, Term b) {
  std::vector<std::pair<Term, Term>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    x = m.deref(x);
    y = m.deref(y);
    if (x == y) continue;
    if (!(x.is_compound() && y.is_compound() && x.name() == y.name() && x.arity() == y.arity())) {
      return false;
    }
    auto xs = m.args(x);
    auto ys = m.args(y);
    for (std::size_t i = 0; i < xs.size(); ++i) stack.emplace_back(xs[i], ys[i]);
  }
  return true;
}

}  // namespace plb
