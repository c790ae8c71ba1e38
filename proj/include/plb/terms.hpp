#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plb/error.hpp"

namespace plb {

struct SymbolId {
  std::uint32_t id = 0;
  friend constexpr auto operator<=>(SymbolId, SymbolId) = default;
};

/// Names interned at table construction, in this order, so builtin
/// dispatch can compare ids without a lookup.
namespace sym {
inline constexpr SymbolId nil{0};      // []
inline constexpr SymbolId dot{1};      // .
inline constexpr SymbolId curly{2};    // {}
inline constexpr SymbolId comma{3};    // ,
inline constexpr SymbolId true_{4};
inline constexpr SymbolId fail{5};
inline constexpr SymbolId cut{6};      // !
inline constexpr SymbolId semicolon{7};
inline constexpr SymbolId arrow{8};    // ->
inline constexpr SymbolId neck{9};     // :-
inline constexpr SymbolId minus{10};
inline constexpr SymbolId bar{11};     // |
}  // namespace sym

/// Thread-safe intern table. Names live in a deque so references returned by
/// name() stay valid while other threads intern.
class SymbolTable {
 public:
  SymbolTable();
  SymbolTable(const SymbolTable&) = delete;
  SymbolTable& operator=(const SymbolTable&) = delete;

  SymbolId intern(std::string_view name);
  const std::string& name(SymbolId id) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, std::uint32_t> ids_;
};

enum class Tag : std::uint8_t { Atom, Int, Float, Var, Compound, Handle };

/// A 16-byte tagged word. Compound arguments live contiguously in a
/// TermArena at args_offset(); which arena is implied by context (machine
/// heap, clause store or a detached TermTree).
class Term {
 public:
  constexpr Term() : head_(static_cast<std::uint32_t>(Tag::Atom)), sym_(0), u_(0) {}

  static constexpr Term atom(SymbolId s) { return Term(Tag::Atom, 0, s.id, 0); }
  static constexpr Term integer(std::int64_t v) { return Term(Tag::Int, 0, 0, static_cast<std::uint64_t>(v)); }
  static Term floating(double v);
  static constexpr Term var(std::uint32_t cell) { return Term(Tag::Var, 0, 0, cell); }
  static constexpr Term compound(SymbolId f, std::uint32_t arity, std::uint64_t offset) {
    return Term(Tag::Compound, arity, f.id, offset);
  }
  static constexpr Term handle(std::uint32_t slot) { return Term(Tag::Handle, 0, 0, slot); }

  constexpr Tag tag() const { return static_cast<Tag>(head_ & 0xffu); }
  constexpr bool is_atom() const { return tag() == Tag::Atom; }
  constexpr bool is_int() const { return tag() == Tag::Int; }
  constexpr bool is_float() const { return tag() == Tag::Float; }
  constexpr bool is_var() const { return tag() == Tag::Var; }
  constexpr bool is_compound() const { return tag() == Tag::Compound; }
  constexpr bool is_handle() const { return tag() == Tag::Handle; }
  constexpr bool is_atomic() const { return !is_var() && !is_compound(); }

  constexpr SymbolId name() const { return SymbolId{sym_}; }  // atom name or functor
  constexpr std::uint32_t arity() const { return head_ >> 8; }
  constexpr std::int64_t int_value() const { return static_cast<std::int64_t>(u_); }
  double float_value() const;
  constexpr std::uint32_t var_index() const { return static_cast<std::uint32_t>(u_); }
  constexpr std::uint64_t args_offset() const { return u_; }
  constexpr std::uint32_t handle_slot() const { return static_cast<std::uint32_t>(u_); }

  constexpr bool is_atom(SymbolId s) const { return is_atom() && sym_ == s.id; }
  constexpr bool is_functor(SymbolId f, std::uint32_t n) const {
    return is_compound() && sym_ == f.id && arity() == n;
  }

  /// Word identity: same tag and payload. For compounds this is pointer
  /// identity, not structural equality.
  friend constexpr bool operator==(const Term& a, const Term& b) {
    return a.head_ == b.head_ && a.sym_ == b.sym_ && a.u_ == b.u_;
  }

 private:
  constexpr Term(Tag t, std::uint32_t arity, std::uint32_t s, std::uint64_t u)
      : head_(static_cast<std::uint32_t>(t) | (arity << 8)), sym_(s), u_(u) {}

  std::uint32_t head_;  // tag in low byte, arity above
  std::uint32_t sym_;
  std::uint64_t u_;
};

static_assert(sizeof(Term) == 16);

inline constexpr std::uint32_t kMaxArity = (1u << 24) - 1;

class TermArena {
 public:
  std::span<const Term> args(Term t) const {
    return {cells_.data() + t.args_offset(), t.arity()};
  }
  Term arg(Term t, std::size_t i) const { return cells_[t.args_offset() + i]; }

  Term make_compound(SymbolId f, std::span<const Term> args);
  /// Reserves `arity` argument slots; fill them with set() before use.
  Term alloc_compound(SymbolId f, std::uint32_t arity);
  void set(std::uint64_t index, Term t) { cells_[index] = t; }

  Term make_list(std::span<const Term> items, Term tail = Term::atom(sym::nil));

  std::size_t size() const { return cells_.size(); }
  void truncate(std::size_t n) { cells_.resize(n); }
  void reserve(std::size_t n) { cells_.reserve(n); }
  void clear() { cells_.clear(); }
  std::span<const Term> cells() const { return cells_; }
  std::vector<Term>& raw() { return cells_; }

 private:
  std::vector<Term> cells_;
};

/// Cells are either unbound (a Var pointing at itself) or bound to a term.
class VarStore {
 public:
  static constexpr std::size_t kDefaultCapacity = std::size_t{1} << 31;

  explicit VarStore(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {}

  Term fresh_var();
  /// Appends n unbound cells and returns the index of the first.
  std::uint32_t fresh_block(std::uint32_t n);

  bool is_bound(std::uint32_t cell) const {
    const Term& c = cells_[cell];
    return !(c.is_var() && c.var_index() == cell);
  }
  Term cell(std::uint32_t i) const { return cells_[i]; }
  void bind(std::uint32_t cell, Term value) { cells_[cell] = value; }
  void reset(std::uint32_t cell) { cells_[cell] = Term::var(cell); }

  std::size_t size() const { return cells_.size(); }
  void truncate(std::size_t n) { cells_.resize(n); }
  std::vector<Term>& raw() { return cells_; }

 private:
  std::vector<Term> cells_;
  std::size_t capacity_;
};

/// Follows binding chains to an unbound variable or a non-variable term.
/// Throws ErrorKind::Cycle after store.size() + 1 hops.
Term deref(const VarStore& store, Term t);

using TrailMark = std::size_t;

class Trail {
 public:
  void record(std::uint32_t cell) { entries_.push_back(cell); }
  TrailMark mark() const { return entries_.size(); }
  std::size_t size() const { return entries_.size(); }
  std::span<const std::uint32_t> entries() const { return entries_; }

  /// Unbinds every cell trailed after `m` and truncates to `m`.
  void undo_to(VarStore& store, TrailMark m);
  std::vector<std::uint32_t>& raw() { return entries_; }

 private:
  std::vector<std::uint32_t> entries_;
};

/// Binds and trails in one step.
inline void bind(VarStore& store, Trail& trail, std::uint32_t cell, Term value) {
  store.bind(cell, value);
  trail.record(cell);
}

/// A self-contained term: its own arena, with variables numbered 0..n_vars-1
/// locally. Used for parsed clauses, queries and detached answers.
struct TermTree {
  TermArena arena;
  Term root;
  std::uint32_t n_vars = 0;
};

/// Structural identity up to consistent variable renaming.
bool variant_equal(const TermArena& a_arena, Term a, const TermArena& b_arena, Term b);
inline bool variant_equal(const TermTree& a, const TermTree& b) {
  return variant_equal(a.arena, a.root, b.arena, b.root);
}

/// Proper-list test over a detached arena (no variable store).
bool is_list(const TermArena& arena, Term t);
std::size_t list_length(const TermArena& arena, Term t);

}  // namespace plb
