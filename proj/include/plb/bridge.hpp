#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plb/engine.hpp"
#include "plb/host_value.hpp"

namespace plb {

enum class ConversionMode { Deep, NoConversion };

struct ConversionPolicy {
  ConversionMode mode = ConversionMode::Deep;

  static ConversionPolicy deep() { return {ConversionMode::Deep}; }
  static ConversionPolicy nc() { return {ConversionMode::NoConversion}; }
  friend bool operator==(ConversionPolicy, ConversionPolicy) = default;
};

/// Engine failure as seen from the host: kind, the goal that raised it and
/// (for parse errors) the position within that goal or program.
class BoundaryError : public PrologError {
 public:
  BoundaryError(ErrorKind kind, std::string goal, const std::string& message, SourcePos pos = {});

  const std::string& goal() const noexcept { return goal_; }

 private:
  std::string goal_;
};

/// Input bindings for a query, by variable name.
using Bindings = std::vector<std::pair<std::string, HostValue>>;

/// One answer: output variables in order of first appearance in the goal.
struct Solution {
  std::vector<std::pair<std::string, HostValue>> bindings;

  /// Throws std::out_of_range for unknown names.
  const HostValue& operator[](std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t size() const { return bindings.size(); }
};

namespace detail {
struct EngineCore;
struct Session;
}  // namespace detail

/// Lazy, single-threaded enumerator of a query's answers. Every pull that
/// reaches the engine counts as one boundary crossing.
class SolutionCursor {
 public:
  enum class State { Fresh, Yielded, Done };

  SolutionCursor(SolutionCursor&&) noexcept;
  SolutionCursor& operator=(SolutionCursor&&) noexcept;
  ~SolutionCursor();

  /// nullopt once exhausted. Pulls after that are free and change nothing.
  std::optional<Solution> next();
  State state() const { return state_; }
  ConversionPolicy policy() const { return policy_; }
  const std::string& goal_text() const { return goal_; }
  /// Output variable names, in answer order.
  std::vector<std::string> variables() const;
  /// The underlying machine (instrumentation only).
  const Machine& machine() const;

 private:
  friend class Engine;
  SolutionCursor(std::shared_ptr<detail::EngineCore> core, std::shared_ptr<detail::Session> session,
                 std::vector<QueryVar> outputs, ConversionPolicy policy, std::string goal);

  std::shared_ptr<detail::EngineCore> core_;
  std::shared_ptr<detail::Session> session_;
  std::vector<QueryVar> outputs_;
  ConversionPolicy policy_;
  std::string goal_;
  State state_ = State::Fresh;
};

/// Engine facade: a consulted database, the host handle registry and the
/// crossing counter. Copies share the same engine.
class Engine {
 public:
  explicit Engine(std::string_view program, ConversionPolicy policy = {},
                  EngineOptions options = {});
  explicit Engine(std::shared_ptr<const Database> db, ConversionPolicy policy = {},
                  EngineOptions options = {});

  /// Parses and loads the goal; no resolution happens until the first pull.
  SolutionCursor query(std::string_view goal, const Bindings& inputs = {},
                       std::optional<ConversionPolicy> policy = std::nullopt) const;
  /// One crossing: first answer or nullopt.
  std::optional<Solution> query_once(std::string_view goal, const Bindings& inputs = {},
                                     std::optional<ConversionPolicy> policy = std::nullopt) const;

  /// Builds the term for a host value in `m`'s heap.
  Term to_term(Machine& m, const HostValue& v, ConversionPolicy policy) const;
  /// Converts a term of `m`. In no-conversion mode composites come back as
  /// detached references.
  HostValue from_term(const Machine& m, Term t, ConversionPolicy policy) const;
  /// Deep-converts a host value once into an engine-side term reference that
  /// later queries can take as input without per-call conversion.
  OpaqueTerm make_term(const HostValue& v) const;

  std::unique_ptr<Machine> new_machine() const;

  std::uint64_t crossings() const;
  void reset_crossings() const;
  /// Registry slots currently held by live terms.
  std::size_t live_handles() const;
  /// Registry slots ever allocated (live + reusable).
  std::size_t handle_capacity() const;

  ConversionPolicy default_policy() const;
  const Database& db() const;
  std::shared_ptr<const Database> db_ptr() const;
  const EngineOptions& options() const;

 private:
  std::shared_ptr<detail::EngineCore> core_;
};

}  // namespace plb
