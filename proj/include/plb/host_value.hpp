#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace plb {

class HostValue;

/// Host-side symbol (converts to/from an atom).
struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Named record with positional fields (converts to/from a compound term).
struct Record {
  std::string name;
  std::vector<HostValue> fields;
};

/// A host object the engine never looks inside.
struct OpaqueObject {
  std::shared_ptr<const void> ptr;
  friend bool operator==(const OpaqueObject& a, const OpaqueObject& b) { return a.ptr == b.ptr; }
};

/// Reference to an engine-side term, handed out in no-conversion mode.
/// Keeps whatever it points into alive; navigation never copies the term.
class OpaqueTerm {
 public:
  struct Source;  // defined by the bridge

  OpaqueTerm() = default;
  explicit OpaqueTerm(std::shared_ptr<Source> source) : src_(std::move(source)) {}

  bool valid() const { return src_ != nullptr; }
  const std::shared_ptr<Source>& source() const { return src_; }

  bool is_var() const;
  bool is_compound() const;
  /// Functor name (or the atom name for atomic terms).
  std::string functor() const;
  std::size_t arity() const;
  /// Argument i (0-based) under no-conversion rules: scalars are
  /// materialized, composites and variables come back as references.
  HostValue arg(std::size_t i) const;
  /// Full structural conversion; throws if the term is not ground.
  HostValue materialize() const;
  std::string to_string() const;

  /// Identity, not structure.
  friend bool operator==(const OpaqueTerm& a, const OpaqueTerm& b) { return a.src_ == b.src_; }

 private:
  std::shared_ptr<Source> src_;
};

using Sequence = std::vector<HostValue>;

/// The value shapes that may cross the host/engine boundary.
class HostValue {
 public:
  using Storage =
      std::variant<std::int64_t, double, Symbol, Sequence, OpaqueObject, Record, OpaqueTerm>;

  HostValue() : v_(std::int64_t{0}) {}
  HostValue(std::int64_t i) : v_(i) {}
  HostValue(int i) : v_(std::int64_t{i}) {}
  HostValue(double d) : v_(d) {}
  HostValue(Symbol s) : v_(std::move(s)) {}
  HostValue(Sequence s) : v_(std::move(s)) {}
  HostValue(OpaqueObject o) : v_(std::move(o)) {}
  HostValue(Record r) : v_(std::move(r)) {}
  HostValue(OpaqueTerm t) : v_(std::move(t)) {}

  HostValue(const HostValue& other);  // iterative, like the destructor
  HostValue(HostValue&&) noexcept = default;
  HostValue& operator=(const HostValue& other);
  HostValue& operator=(HostValue&&) noexcept = default;
  ~HostValue();  // iterative: values may nest very deeply

  template <typename T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <typename T>
  const T& as() const { return std::get<T>(v_); }
  template <typename T>
  T& as() { return std::get<T>(v_); }

  const Storage& storage() const { return v_; }
  Storage& storage() { return v_; }

  friend bool operator==(const HostValue& a, const HostValue& b);

 private:
  Storage v_;
};

inline HostValue symbol(std::string name) { return HostValue(Symbol{std::move(name)}); }
HostValue record(std::string name, std::vector<HostValue> fields);

/// Record nesting depth along the last field.
std::size_t record_spine_depth(const HostValue& v);

/// Debug rendering, Prolog-like (records as f(..), sequences as [..]).
std::string to_string(const HostValue& v);

}  // namespace plb
