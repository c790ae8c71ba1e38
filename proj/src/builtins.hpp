#pragma once

#include <cstdint>
#include <unordered_map>

#include "plb/engine.hpp"

namespace plb::detail {

/// Registers every builtin predicate under (name << 32 | arity).
void register_builtins(SymbolTable& symbols, std::unordered_map<std::uint64_t, Builtin>& table);

/// Control constructs handled directly by the solver loop. They cannot be
/// redefined either.
bool is_control(SymbolId name, std::uint32_t arity, const SymbolTable& symbols);

}  // namespace plb::detail
