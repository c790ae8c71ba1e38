#include "plb/bridge.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace plb {

namespace detail {

// Host values referenced from engine terms by slot number.
class Registry : public std::enable_shared_from_this<Registry> {
 public:
  std::pair<std::uint32_t, std::shared_ptr<const void>> acquire(HostValue v) {
    std::uint32_t slot;
    {
      std::lock_guard lock(mutex_);
      if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
        values_[slot] = std::move(v);
      } else {
        slot = static_cast<std::uint32_t>(values_.size());
        values_.push_back(std::move(v));
      }
      ++live_;
    }
    return {slot, std::make_shared<Lease>(shared_from_this(), slot)};
  }

  HostValue get(std::uint32_t slot) const {
    std::lock_guard lock(mutex_);
    if (slot >= values_.size() || std::find(free_.begin(), free_.end(), slot) != free_.end()) {
      throw std::logic_error("dangling host handle slot " + std::to_string(slot));
    }
    return values_[slot];
  }

  std::size_t live() const {
    std::lock_guard lock(mutex_);
    return live_;
  }

  std::size_t capacity() const {
    std::lock_guard lock(mutex_);
    return values_.size();
  }

 private:
  struct Lease {
    Lease(std::shared_ptr<Registry> r, std::uint32_t s) : reg(std::move(r)), slot(s) {}
    ~Lease() { reg->release(slot); }
    std::shared_ptr<Registry> reg;
    std::uint32_t slot;
  };

  void release(std::uint32_t slot) {
    HostValue old;
    std::lock_guard lock(mutex_);
    old = std::move(values_[slot]);
    values_[slot] = HostValue();
    free_.push_back(slot);
    --live_;
  }

  mutable std::mutex mutex_;
  std::vector<HostValue> values_;
  std::vector<std::uint32_t> free_;
  std::size_t live_ = 0;
};

struct EngineCore {
  std::shared_ptr<const Database> db;
  ConversionPolicy policy;
  EngineOptions options;
  std::shared_ptr<Registry> registry = std::make_shared<Registry>();
  mutable std::atomic<std::uint64_t> crossings{0};
};

// A machine plus the references into it that must be detached before it
// moves on to the next answer.
struct Session {
  Session(std::shared_ptr<const Database> db, const EngineOptions& opts) : machine(std::move(db), opts) {}

  void detach_live();

  Machine machine;
  std::vector<std::weak_ptr<OpaqueTerm::Source>> live;
};

}  // namespace detail

struct OpaqueTerm::Source {
  std::shared_ptr<detail::EngineCore> core;
  std::shared_ptr<detail::Session> session;  // keeps the machine and its handle leases alive
  std::shared_ptr<const TermTree> tree;      // set once detached
  Term term;
};

void detail::Session::detach_live() {
  for (auto& w : live) {
    if (auto src = w.lock()) {
      auto tree = std::make_shared<TermTree>(machine.detach(src->term));
      src->term = tree->root;
      src->tree = std::move(tree);
    }
  }
  live.clear();
}

namespace {

using detail::EngineCore;
using detail::Session;

struct MachineView {
  const Machine& m;
  Term deref(Term t) const { return m.deref(t); }
  std::span<const Term> args(Term t) const { return m.args(t); }
  std::size_t budget() const { return 8 * (m.heap().size() + m.store().size()) + 4096; }
};

struct TreeView {
  const TermArena& arena;
  Term deref(Term t) const { return t; }
  std::span<const Term> args(Term t) const { return arena.args(t); }
  std::size_t budget() const { return 8 * arena.size() + 4096; }
};

template <typename View>
bool proper_list(const View& v, Term t) {
  t = v.deref(t);
  std::size_t budget = v.budget();
  while (t.is_functor(sym::dot, 2)) {
    if (budget-- == 0) throw PrologError(ErrorKind::Cycle, "cyclic list");
    t = v.deref(v.args(t)[1]);
  }
  return t.is_atom(sym::nil);
}

// Scalars convert the same way under both policies. `t` is dereferenced.
std::optional<HostValue> scalar(const EngineCore& core, Term t) {
  switch (t.tag()) {
    case Tag::Int: return HostValue(t.int_value());
    case Tag::Float: return HostValue(t.float_value());
    case Tag::Atom:
      if (t.is_atom(sym::nil)) return HostValue(Sequence{});
      return symbol(core.db->symbols().name(t.name()));
    case Tag::Handle: return core.registry->get(t.handle_slot());
    case Tag::Var:
    case Tag::Compound: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<HostValue>& kids(HostValue& v) {
  return v.is<Sequence>() ? v.as<Sequence>() : v.as<Record>().fields;
}

template <typename View>
HostValue deep_from(const EngineCore& core, const View& view, Term root) {
  struct Frame {
    Term cur;
    std::size_t next;
    bool list;
    HostValue value;
  };
  std::vector<Frame> stack;
  std::size_t budget = view.budget();
  const SymbolTable& symbols = core.db->symbols();

  // Returns the value for atomic terms; pushes a frame for composites.
  auto visit = [&](Term t) -> std::optional<HostValue> {
    t = view.deref(t);
    if (t.is_var()) throw PrologError(ErrorKind::Boundary, "answer is not ground");
    if (auto s = scalar(core, t)) return s;
    if (budget < t.arity()) throw PrologError(ErrorKind::Cycle, "cannot convert a cyclic term");
    budget -= t.arity();
    if (t.is_functor(sym::dot, 2) && proper_list(view, t)) {
      stack.push_back({t, 0, true, HostValue(Sequence{})});
    } else {
      Record r{symbols.name(t.name()), {}};
      r.fields.reserve(t.arity());
      stack.push_back({t, 0, false, HostValue(std::move(r))});
    }
    return std::nullopt;
  };

  if (auto v = visit(root)) return std::move(*v);
  for (;;) {
    Frame& f = stack.back();
    std::optional<Term> child;
    if (f.list) {
      if (f.cur.is_functor(sym::dot, 2)) {
        auto a = view.args(f.cur);
        child = a[0];
        f.cur = view.deref(a[1]);
      }
    } else if (f.next < f.cur.arity()) {
      child = view.args(f.cur)[f.next++];
    }
    if (!child) {
      HostValue done = std::move(f.value);
      stack.pop_back();
      if (stack.empty()) return done;
      kids(stack.back().value).push_back(std::move(done));
      continue;
    }
    if (auto v = visit(*child)) kids(f.value).push_back(std::move(*v));
  }
}

std::shared_ptr<OpaqueTerm::Source> live_ref(const std::shared_ptr<EngineCore>& core,
                                             const std::shared_ptr<Session>& session, Term t) {
  auto src = std::make_shared<OpaqueTerm::Source>(OpaqueTerm::Source{core, session, nullptr, t});
  session->live.push_back(src);
  return src;
}

// No-conversion rules for an answer binding or an argument of a reference.
HostValue nc_from(const std::shared_ptr<EngineCore>& core, const std::shared_ptr<Session>& session,
                  const std::shared_ptr<const TermTree>& tree, Term t) {
  t = tree ? t : session->machine.deref(t);
  if (auto s = scalar(*core, t)) return std::move(*s);
  if (tree) {
    return OpaqueTerm(std::make_shared<OpaqueTerm::Source>(OpaqueTerm::Source{core, session, tree, t}));
  }
  return OpaqueTerm(live_ref(core, session, t));
}

template <typename F>
decltype(auto) with_view(const OpaqueTerm::Source& s, F&& f) {
  if (s.tree) return f(TreeView{s.tree->arena});
  return f(MachineView{s.session->machine});
}

const OpaqueTerm::Source& checked(const std::shared_ptr<OpaqueTerm::Source>& s) {
  if (!s) throw std::logic_error("empty term reference");
  return *s;
}

}  // namespace

// ---------------------------------------------------------------------------
// OpaqueTerm

bool OpaqueTerm::is_var() const {
  const auto& s = checked(src_);
  return with_view(s, [&](auto v) { return v.deref(s.term).is_var(); });
}

bool OpaqueTerm::is_compound() const {
  const auto& s = checked(src_);
  return with_view(s, [&](auto v) { return v.deref(s.term).is_compound(); });
}

std::string OpaqueTerm::functor() const {
  const auto& s = checked(src_);
  Term t = with_view(s, [&](auto v) { return v.deref(s.term); });
  if (t.is_compound() || t.is_atom()) return s.core->db->symbols().name(t.name());
  return to_string();
}

std::size_t OpaqueTerm::arity() const {
  const auto& s = checked(src_);
  return with_view(s, [&](auto v) { return std::size_t{v.deref(s.term).arity()}; });
}

HostValue OpaqueTerm::arg(std::size_t i) const {
  const auto& s = checked(src_);
  Term child = with_view(s, [&](auto v) {
    Term t = v.deref(s.term);
    if (!t.is_compound() || i >= t.arity()) throw std::out_of_range("argument index out of range");
    return v.args(t)[i];
  });
  return nc_from(s.core, s.session, s.tree, child);
}

HostValue OpaqueTerm::materialize() const {
  const auto& s = checked(src_);
  return with_view(s, [&](auto v) { return deep_from(*s.core, v, s.term); });
}

std::string OpaqueTerm::to_string() const {
  const auto& s = checked(src_);
  if (s.tree) return format_term(s.tree->arena, s.term, s.core->db->symbols());
  return s.session->machine.format(s.term);
}

// ---------------------------------------------------------------------------

BoundaryError::BoundaryError(ErrorKind kind, std::string goal, const std::string& message,
                             SourcePos pos)
    : PrologError(kind, message, pos), goal_(std::move(goal)) {}

const HostValue& Solution::operator[](std::string_view name) const {
  for (const auto& [n, v] : bindings) {
    if (n == name) return v;
  }
  throw std::out_of_range("no binding named " + std::string(name));
}

bool Solution::contains(std::string_view name) const {
  return std::any_of(bindings.begin(), bindings.end(), [&](const auto& b) { return b.first == name; });
}

// ---------------------------------------------------------------------------
// SolutionCursor

SolutionCursor::SolutionCursor(std::shared_ptr<detail::EngineCore> core,
                               std::shared_ptr<detail::Session> session,
                               std::vector<QueryVar> outputs, ConversionPolicy policy,
                               std::string goal)
    : core_(std::move(core)),
      session_(std::move(session)),
      outputs_(std::move(outputs)),
      policy_(policy),
      goal_(std::move(goal)) {}

SolutionCursor::SolutionCursor(SolutionCursor&&) noexcept = default;
SolutionCursor& SolutionCursor::operator=(SolutionCursor&&) noexcept = default;
SolutionCursor::~SolutionCursor() = default;

std::vector<std::string> SolutionCursor::variables() const {
  std::vector<std::string> names;
  for (const auto& v : outputs_) names.push_back(v.name);
  return names;
}

const Machine& SolutionCursor::machine() const { return session_->machine; }

std::optional<Solution> SolutionCursor::next() {
  if (state_ == State::Done) return std::nullopt;
  core_->crossings.fetch_add(1, std::memory_order_relaxed);
  session_->detach_live();

  Machine& m = session_->machine;
  SolveStatus st;
  try {
    st = m.solve_next();
  } catch (const PrologError& e) {
    state_ = State::Done;
    throw BoundaryError(e.kind(), goal_, e.detail(), e.pos());
  }
  if (st != SolveStatus::Succeeded) {
    state_ = State::Done;
    return std::nullopt;
  }
  state_ = State::Yielded;

  Solution out;
  out.bindings.reserve(outputs_.size());
  try {
    for (const auto& v : outputs_) {
      if (policy_.mode == ConversionMode::Deep) {
        out.bindings.emplace_back(v.name, deep_from(*core_, MachineView{m}, v.var));
      } else {
        out.bindings.emplace_back(v.name, nc_from(core_, session_, nullptr, v.var));
      }
    }
  } catch (const PrologError& e) {
    throw BoundaryError(e.kind(), goal_, e.detail() + " (variable " + outputs_[out.size()].name + ")");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

std::shared_ptr<Database> consult_or_throw(std::string_view program) {
  auto db = std::make_shared<Database>();
  try {
    db->consult(program);
  } catch (const PrologError& e) {
    throw BoundaryError(e.kind(), "", e.detail(), e.pos());
  }
  return db;
}

}  // namespace

Engine::Engine(std::string_view program, ConversionPolicy policy, EngineOptions options)
    : Engine(consult_or_throw(program), policy, options) {}

Engine::Engine(std::shared_ptr<const Database> db, ConversionPolicy policy, EngineOptions options)
    : core_(std::make_shared<detail::EngineCore>()) {
  core_->db = std::move(db);
  core_->policy = policy;
  core_->options = options;
}

SolutionCursor Engine::query(std::string_view goal, const Bindings& inputs,
                             std::optional<ConversionPolicy> policy) const {
  ConversionPolicy pol = policy.value_or(core_->policy);
  std::string goal_text(goal);
  auto session = std::make_shared<Session>(core_->db, core_->options);
  Machine& m = session->machine;

  LoadedQuery q;
  try {
    q = m.load(parse_term(goal, core_->db->symbols()));
  } catch (const PrologError& e) {
    throw BoundaryError(e.kind(), goal_text, e.detail(), e.pos());
  }

  std::vector<bool> is_input(q.vars.size(), false);
  for (const auto& [name, value] : inputs) {
    auto it = std::find_if(q.vars.begin(), q.vars.end(), [&](const QueryVar& v) { return v.name == name; });
    if (it == q.vars.end()) {
      throw BoundaryError(ErrorKind::Boundary, goal_text, "goal has no variable named " + name);
    }
    auto idx = static_cast<std::size_t>(it - q.vars.begin());
    if (is_input[idx]) {
      throw BoundaryError(ErrorKind::Boundary, goal_text, "variable " + name + " bound twice");
    }
    is_input[idx] = true;
    try {
      m.unify(it->var, to_term(m, value, pol));
    } catch (const PrologError& e) {
      throw BoundaryError(e.kind(), goal_text, e.detail());
    }
  }

  std::vector<QueryVar> outputs;
  for (std::size_t i = 0; i < q.vars.size(); ++i) {
    if (!is_input[i] && !q.vars[i].name.starts_with('_')) outputs.push_back(q.vars[i]);
  }
  m.start(q.goal);
  return SolutionCursor(core_, std::move(session), std::move(outputs), pol, std::move(goal_text));
}

std::optional<Solution> Engine::query_once(std::string_view goal, const Bindings& inputs,
                                           std::optional<ConversionPolicy> policy) const {
  return query(goal, inputs, policy).next();
}

Term Engine::to_term(Machine& m, const HostValue& root, ConversionPolicy policy) const {
  bool deep = policy.mode == ConversionMode::Deep;
  SymbolTable& symbols = core_->db->symbols();
  std::vector<std::pair<const HostValue*, std::uint64_t>> pending;

  auto handle = [&](const HostValue& v) {
    auto [slot, lease] = core_->registry->acquire(v);
    m.retain(std::move(lease));
    return Term::handle(slot);
  };

  // Builds the outer layer of `v`; nested values are queued with the heap
  // cell they belong in.
  auto shallow = [&](const HostValue& v) -> Term {
    return std::visit(
        [&](const auto& x) -> Term {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            return Term::integer(x);
          } else if constexpr (std::is_same_v<T, double>) {
            return Term::floating(x);
          } else if constexpr (std::is_same_v<T, Symbol>) {
            return Term::atom(symbols.intern(x.name));
          } else if constexpr (std::is_same_v<T, OpaqueObject>) {
            return handle(v);
          } else if constexpr (std::is_same_v<T, OpaqueTerm>) {
            if (!x.valid()) throw PrologError(ErrorKind::Type, "empty term reference");
            const auto& s = *x.source();
            if (&s.core->db->symbols() != &symbols) {
              throw PrologError(ErrorKind::Boundary, "term reference belongs to another engine");
            }
            if (s.tree) {
              if (s.session && &s.session->machine != &m) m.retain(s.session);
              return m.import(*s.tree);
            }
            if (&s.session->machine == &m) return s.term;
            m.retain(s.session);
            return m.import(s.session->machine.detach(s.term));
          } else if constexpr (std::is_same_v<T, Sequence>) {
            if (x.empty()) return Term::atom(sym::nil);
            if (!deep) return handle(v);
            Term first, prev;
            for (std::size_t i = 0; i < x.size(); ++i) {
              Term cell = m.heap().alloc_compound(sym::dot, 2);
              if (i == 0) {
                first = cell;
              } else {
                m.heap().set(prev.args_offset() + 1, cell);
              }
              pending.emplace_back(&x[i], cell.args_offset());
              prev = cell;
            }
            m.heap().set(prev.args_offset() + 1, Term::atom(sym::nil));
            return first;
          } else {
            static_assert(std::is_same_v<T, Record>);
            if (!deep) return handle(v);
            SymbolId name = symbols.intern(x.name);
            if (x.fields.empty()) return Term::atom(name);
            if (x.fields.size() > kMaxArity) throw PrologError(ErrorKind::Boundary, "record too wide");
            Term c = m.heap().alloc_compound(name, static_cast<std::uint32_t>(x.fields.size()));
            for (std::size_t i = 0; i < x.fields.size(); ++i) {
              pending.emplace_back(&x.fields[i], c.args_offset() + i);
            }
            return c;
          }
        },
        v.storage());
  };

  Term result = shallow(root);
  while (!pending.empty()) {
    auto [v, cell] = pending.back();
    pending.pop_back();
    Term t = shallow(*v);
    m.heap().set(cell, t);
  }
  return result;
}

HostValue Engine::from_term(const Machine& m, Term t, ConversionPolicy policy) const {
  if (policy.mode == ConversionMode::Deep) return deep_from(*core_, MachineView{m}, t);
  t = m.deref(t);
  if (auto s = scalar(*core_, t)) return std::move(*s);
  auto tree = std::make_shared<TermTree>(m.detach(t));
  Term root = tree->root;
  return OpaqueTerm(std::make_shared<OpaqueTerm::Source>(
      OpaqueTerm::Source{core_, nullptr, std::move(tree), root}));
}

OpaqueTerm Engine::make_term(const HostValue& v) const {
  auto scratch = std::make_shared<Session>(core_->db, core_->options);
  Term t = to_term(scratch->machine, v, ConversionPolicy::deep());
  auto tree = std::make_shared<TermTree>(scratch->machine.detach(t));
  Term root = tree->root;
  // The scratch machine holds any handle leases the term refers to.
  return OpaqueTerm(std::make_shared<OpaqueTerm::Source>(
      OpaqueTerm::Source{core_, std::move(scratch), std::move(tree), root}));
}

std::unique_ptr<Machine> Engine::new_machine() const {
  return std::make_unique<Machine>(core_->db, core_->options);
}

std::uint64_t Engine::crossings() const { return core_->crossings.load(std::memory_order_relaxed); }
void Engine::reset_crossings() const { core_->crossings.store(0, std::memory_order_relaxed); }
std::size_t Engine::live_handles() const { return core_->registry->live(); }
std::size_t Engine::handle_capacity() const { return core_->registry->capacity(); }
ConversionPolicy Engine::default_policy() const { return core_->policy; }
const Database& Engine::db() const { return *core_->db; }
std::shared_ptr<const Database> Engine::db_ptr() const { return core_->db; }
const EngineOptions& Engine::options() const { return core_->options; }

}  // namespace plb
