#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "plb/terms.hpp"

namespace plb {

enum class TokenKind { Atom, Variable, Integer, Float, Punct, String, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // verbatim, except quoted atoms and strings are unescaped
  SourcePos pos;
  bool layout_before = false;  // whitespace or comment precedes the token
  bool quoted = false;
};

/// Tokenizes the whole source. `eof` (optional) receives the position just
/// past the last character, for "unexpected end of input" diagnostics.
std::vector<Token> tokenize(std::string_view src, SourcePos* eof = nullptr);

enum class OpType { xfx, xfy, yfx, fy, fx, xf, yf };

struct OpDef {
  int priority = 0;
  OpType type = OpType::xfx;
};

class OperatorTable {
 public:
  /// The fixed table used by the reader and printer.
  static const OperatorTable& standard();

  void add(std::string name, int priority, OpType type);

  std::optional<OpDef> prefix(std::string_view name) const;
  std::optional<OpDef> infix(std::string_view name) const;
  std::optional<OpDef> postfix(std::string_view name) const;
  bool is_op(std::string_view name) const;

 private:
  struct Entry {
    std::optional<OpDef> prefix, infix, postfix;
  };
  std::unordered_map<std::string, Entry> entries_;
};

/// A term read from text. Variables are numbered locally in order of first
/// appearance; `_` always gets a fresh number.
struct ParsedTerm {
  TermTree tree;
  std::vector<std::pair<std::string, std::uint32_t>> var_names;  // named vars only
};

/// Reads terms one clause at a time from a token sequence.
class TermReader {
 public:
  TermReader(std::span<const Token> tokens, SourcePos eof, const OperatorTable& ops,
             SymbolTable& symbols);

  bool at_end() const { return pos_ >= tokens_.size(); }

  /// Parses one term with the given maximum priority. Does not consume the
  /// clause terminator.
  ParsedTerm read_term(int max_priority);

  /// Parses a term followed by an End token. nullopt when tokens are exhausted.
  std::optional<ParsedTerm> read_clause();

  /// Parses a term at priority 1200, accepting an optional trailing End.
  ParsedTerm read_goal();

 private:
  struct Parsed {
    Term term;
    int priority;
  };

  Parsed parse(int max_priority);
  Parsed parse_primary(int max_priority);
  Parsed parse_name(const Token& tok, int max_priority);
  std::vector<Term> parse_arglist();
  Term parse_list();
  Term make_number(const Token& tok, bool negative);
  Term variable(const std::string& name);
  bool starts_term(std::size_t i) const;

  const Token& peek() const;
  const Token& next();
  bool peek_punct(std::string_view p) const;
  void expect_punct(std::string_view p);
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const std::string& msg, SourcePos pos) const;
  SourcePos here() const;
  void begin_term();

  std::span<const Token> tokens_;
  SourcePos eof_;
  const OperatorTable& ops_;
  SymbolTable& symbols_;
  std::size_t pos_ = 0;

  TermArena arena_;
  std::uint32_t n_vars_ = 0;
  std::vector<std::pair<std::string, std::uint32_t>> names_;
};

/// Parses a single term (e.g. a goal), with an optional trailing '.'.
ParsedTerm parse_term(std::string_view text, SymbolTable& symbols,
                      const OperatorTable& ops = OperatorTable::standard());

/// Parses the first term of a token sequence at the given maximum priority.
ParsedTerm parse_term(std::span<const Token> tokens, const OperatorTable& ops, int max_priority,
                      SymbolTable& symbols);

/// One program clause. The clause owns its arena; variables are clause-local
/// indices in [0, n_vars).
struct Clause {
  TermArena arena;
  Term head;
  Term body;  // `true` for facts
  std::uint32_t n_vars = 0;
  std::vector<Term> goals;  // body flattened over top-level ','/2

  static Clause from_term(ParsedTerm parsed);
};

/// Parses `H :- B.` and `H.` clauses. Directives (`:- G.`) are rejected.
std::vector<Clause> parse_program(std::string_view src, SymbolTable& symbols);

/// Canonical text for a term. With a store, variables are dereferenced first;
/// unbound variables print as _G<cell>.
std::string format_term(const TermArena& arena, Term t, const SymbolTable& symbols,
                        const OperatorTable& ops = OperatorTable::standard(),
                        const VarStore* store = nullptr);

inline std::string format_term(const TermTree& tree, const SymbolTable& symbols) {
  return format_term(tree.arena, tree.root, symbols);
}

/// Atom text as it must be written to read back as the same atom.
std::string quote_atom_if_needed(std::string_view name);

}  // namespace plb
