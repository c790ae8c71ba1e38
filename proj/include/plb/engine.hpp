#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "plb/reader.hpp"
#include "plb/terms.hpp"

namespace plb {

struct EngineOptions {
  bool indexing = true;         // first-argument indexing
  bool unknown_fails = false;   // unknown predicates fail instead of raising
  std::uint64_t step_budget = 1'000'000'000;
  bool gc = true;                        // reclaim heap, variables and frames between steps
  std::size_t gc_min_cells = 1u << 20;   // smallest footprint that triggers a collection
};

/// First-argument principal functor, used as the clause index key.
struct IndexKey {
  Tag tag = Tag::Atom;
  std::uint32_t name = 0;
  std::uint32_t arity = 0;
  std::uint64_t payload = 0;

  friend bool operator==(const IndexKey&, const IndexKey&) = default;
};

/// nullopt for unbound variables (they match every clause).
std::optional<IndexKey> index_key_of(Term dereferenced);

struct IndexKeyHash {
  std::size_t operator()(const IndexKey& k) const noexcept;
};

class Machine;
using Builtin = bool (*)(Machine&, std::span<const Term> args);

class Database {
 public:
  struct Predicate {
    SymbolId name;
    std::uint32_t arity = 0;
    std::vector<Clause> clauses;
    std::vector<std::uint32_t> all;          // 0..n-1
    std::vector<std::uint32_t> var_clauses;  // clauses whose first argument is a variable
    std::unordered_map<IndexKey, std::vector<std::uint32_t>, IndexKeyHash> buckets;
  };

  explicit Database(std::shared_ptr<SymbolTable> symbols = std::make_shared<SymbolTable>());

  /// Parses and asserts every clause of a program, in source order.
  void consult(std::string_view source);
  void assertz(Clause clause);

  const Predicate* find(SymbolId name, std::uint32_t arity) const;

  /// Candidate clause positions, in assert order, whose first argument can
  /// match `key` (nullopt = unbound key). Throws Existence for unknown
  /// predicates.
  std::span<const std::uint32_t> index_lookup(SymbolId name, std::uint32_t arity,
                                              const std::optional<IndexKey>& key) const;
  static std::span<const std::uint32_t> candidates(const Predicate& pred,
                                                   const std::optional<IndexKey>& key);

  Builtin builtin(SymbolId name, std::uint32_t arity) const;
  bool is_builtin(SymbolId name, std::uint32_t arity) const;

  SymbolTable& symbols() const { return *symbols_; }
  std::shared_ptr<SymbolTable> symbols_ptr() const { return symbols_; }
  std::size_t clause_count() const;
  std::size_t predicate_count() const { return preds_.size(); }

 private:
  static std::uint64_t pred_key(SymbolId name, std::uint32_t arity) {
    return (std::uint64_t{name.id} << 32) | arity;
  }

  std::shared_ptr<SymbolTable> symbols_;
  std::unordered_map<std::uint64_t, Predicate> preds_;
  std::unordered_map<std::uint64_t, Builtin> builtins_;
};

enum class SolveStatus { Running, Succeeded, Exhausted };

/// Result of arithmetic evaluation.
struct Number {
  bool is_float = false;
  std::int64_t i = 0;
  double f = 0.0;

  static Number of(std::int64_t v) { return {false, v, 0.0}; }
  static Number of(double v) { return {true, 0, v}; }
  double as_double() const { return is_float ? f : static_cast<double>(i); }
  Term to_term() const { return is_float ? Term::floating(f) : Term::integer(i); }
};

struct QueryVar {
  std::string name;
  Term var;
};

struct LoadedQuery {
  Term goal;
  std::vector<QueryVar> vars;
};

/// Detached answer bindings in query-variable order.
using Answer = std::vector<std::pair<std::string, TermTree>>;

/// One resolution machine: binding store, trail, goal list and choice
/// points over a shared read-only database.
class Machine {
 public:
  explicit Machine(std::shared_ptr<const Database> db, EngineOptions options = {});
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  /// Copies a parsed goal into the heap with fresh variables.
  LoadedQuery load(const ParsedTerm& parsed);
  /// Copies a detached term into the heap; its variables become fresh cells.
  Term import(const TermTree& tree);
  /// Resets goal state and sets `goal` as the query. Bindings already made
  /// (e.g. host inputs) become part of the query's initial state.
  void start(Term goal);

  /// Runs until the next solution or exhaustion. Re-entry after a solution
  /// backtracks into the most recent choice point.
  SolveStatus solve_next();
  SolveStatus status() const { return status_; }

  bool unify(Term a, Term b);
  Number eval_arith(Term t);

  /// Fully dereferenced detached copies of the named bindings.
  Answer snapshot_answer(std::span<const QueryVar> vars) const;
  TermTree detach(Term t) const;

  Term deref(Term t) const { return plb::deref(store_, t); }
  std::span<const Term> args(Term compound) const { return heap_.args(compound); }

  VarStore& store() { return store_; }
  const VarStore& store() const { return store_; }
  TermArena& heap() { return heap_; }
  const TermArena& heap() const { return heap_; }
  Trail& trail() { return trail_; }
  const Trail& trail() const { return trail_; }
  const Database& db() const { return *db_; }
  SymbolTable& symbols() const { return db_->symbols(); }
  const EngineOptions& options() const { return options_; }

  std::uint64_t step_count() const { return steps_; }
  /// Garbage collections run so far, and the current heap + variable + frame count.
  std::uint64_t gc_runs() const { return gc_runs_; }
  std::size_t cells_in_use() const { return footprint(); }
  std::size_t choicepoint_count() const { return cps_.size(); }
  TrailMark query_trail_mark() const { return base_.trail; }
  std::size_t query_store_top() const { return base_.vars; }

  /// Keeps an object alive for the machine's lifetime (bridge handle leases).
  void retain(std::shared_ptr<const void> lease) { leases_.push_back(std::move(lease)); }

  std::string format(Term t) const;

 private:
  static constexpr std::uint32_t kNil = 0;

  enum class FrameKind : std::uint8_t { Call, CutTo };

  struct Frame {
    Term goal;
    std::uint32_t next = kNil;
    std::uint32_t cut_barrier = 0;
    FrameKind kind = FrameKind::Call;
  };

  struct Tops {
    TrailMark trail = 0;
    std::size_t vars = 0;
    std::size_t heap = 0;
    std::size_t frames = 0;
  };

  struct ChoicePoint {
    enum class Kind : std::uint8_t { Clauses, Goal };
    Kind kind = Kind::Goal;
    Tops tops;
    std::uint32_t cont = kNil;  // goal list to resume with
    // Clauses
    Term goal;
    const Database::Predicate* pred = nullptr;
    const std::uint32_t* cands = nullptr;
    std::uint32_t n_cands = 0;
    std::uint32_t next = 0;
    std::uint32_t cut_parent = 0;
    // Goal alternative (disjunction / else branch)
    std::uint32_t alt = kNil;
  };

  Tops tops() const { return {trail_.mark(), store_.size(), heap_.size(), frames_.size()}; }
  void restore(const Tops& t);
  void run();
  bool step(const Frame& frame);
  bool call_user(Term goal, std::uint32_t cont);
  bool try_clauses(Term goal, const Database::Predicate& pred, const std::uint32_t* cands,
                   std::uint32_t n_cands, std::uint32_t start, std::uint32_t cont,
                   std::uint32_t cut_parent, bool cp_exists);
  bool backtrack();
  void cut_to(std::uint32_t height);
  std::uint32_t push_frame(Term goal, std::uint32_t next, std::uint32_t barrier,
                           FrameKind kind = FrameKind::Call);
  void push_goal_cp(std::uint32_t alt, std::uint32_t cont);
  Term relocate(Term t, std::uint64_t heap_base, std::uint32_t var_base) const;
  Term copy_in(const TermArena& src, Term root, std::uint32_t n_vars);
  void count_step();
  void finish_exhausted();
  std::size_t footprint() const { return heap_.size() + store_.size() + frames_.size(); }
  void collect();

  std::shared_ptr<const Database> db_;
  EngineOptions options_;
  VarStore store_;
  TermArena heap_;
  Trail trail_;
  std::vector<Frame> frames_;
  std::vector<ChoicePoint> cps_;
  std::uint32_t goal_ = kNil;
  Tops base_;
  SolveStatus status_ = SolveStatus::Exhausted;
  std::uint64_t steps_ = 0;
  std::uint64_t gc_runs_ = 0;
  std::size_t gc_next_ = 0;
  std::vector<std::shared_ptr<const void>> leases_;
  std::vector<std::pair<Term, Term>> unify_stack_;
};

/// Structural identity (==/2) under the machine's bindings.
bool identical(const Machine& m, Term a, Term b);

}  // namespace plb
