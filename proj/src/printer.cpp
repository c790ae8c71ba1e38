#include <cctype>
#include <charconv>
#include <cmath>

#include "plb/reader.hpp"

namespace plb {

namespace {

bool is_symbol_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
    case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&':
    case '$':
      return true;
    default:
      return false;
  }
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool needs_quotes(std::string_view name) {
  if (name.empty()) return true;
  if (name == "!" || name == ";" || name == "[]" || name == "{}") return false;
  if (std::islower(static_cast<unsigned char>(name[0]))) {
    for (char c : name) {
      if (!is_word_char(c)) return true;
    }
    return false;
  }
  for (char c : name) {
    if (!is_symbol_char(c)) return true;
  }
  // "." alone is the clause terminator, "/*" opens a comment.
  return name == "." || name.starts_with("/*");
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  auto e = s.find_first_of("eE");
  std::string mantissa = s.substr(0, e);
  if (mantissa.find('.') == std::string::npos) mantissa += ".0";
  if (e == std::string::npos) return mantissa;
  return mantissa + "e" + s.substr(e + 1);
}

class Printer {
 public:
  Printer(const TermArena& arena, const SymbolTable& symbols, const OperatorTable& ops,
          const VarStore* store)
      : arena_(arena), symbols_(symbols), ops_(ops), store_(store) {}

  std::string print(Term t, int max_priority) {
    std::string out;
    emit(out, t, max_priority, false);
    return out;
  }

 private:
  Term resolve(Term t) const { return store_ != nullptr ? deref(*store_, t) : t; }

  // Appends `piece`, inserting a space where gluing would change tokenization.
  static void append(std::string& out, const std::string& piece) {
    if (!out.empty() && !piece.empty()) {
      char a = out.back();
      char b = piece.front();
      if ((is_symbol_char(a) && is_symbol_char(b)) || (is_word_char(a) && is_word_char(b))) {
        out += ' ';
      }
    }
    out += piece;
  }

  void emit(std::string& out, Term t, int max_priority, bool operand) {
    t = resolve(t);
    switch (t.tag()) {
      case Tag::Var:
        append(out, "_G" + std::to_string(t.var_index()));
        return;
      case Tag::Int:
        append(out, std::to_string(t.int_value()));
        return;
      case Tag::Float:
        append(out, format_float(t.float_value()));
        return;
      case Tag::Handle:
        append(out, "'$handle'(" + std::to_string(t.handle_slot()) + ")");
        return;
      case Tag::Atom: {
        const std::string& name = symbols_.name(t.name());
        std::string text = quote_atom_if_needed(name);
        if (operand && ops_.is_op(name)) text = "(" + text + ")";
        append(out, text);
        return;
      }
      case Tag::Compound:
        emit_compound(out, t, max_priority);
        return;
    }
  }

  void emit_compound(std::string& out, Term t, int max_priority) {
    const std::string& name = symbols_.name(t.name());
    auto args = arena_.args(t);

    if (t.is_functor(sym::dot, 2)) {
      emit_list(out, t);
      return;
    }
    if (t.is_functor(sym::curly, 1)) {
      append(out, "{");
      std::string inner;
      emit(inner, args[0], 1200, false);
      out += inner;
      out += "}";
      return;
    }
    if (args.size() == 2) {
      if (auto op = ops_.infix(name)) {
        int p = op->priority;
        int left_max = op->type == OpType::yfx ? p : p - 1;
        int right_max = op->type == OpType::xfy ? p : p - 1;
        std::string body;
        emit(body, args[0], left_max, true);
        if (name == ",") {
          body += ",";
        } else if (is_word_char(name.front())) {
          body += " " + name + " ";
        } else {
          append(body, name);
        }
        std::string right;
        emit(right, args[1], right_max, true);
        append(body, right);
        wrap(out, body, p > max_priority);
        return;
      }
    }
    if (args.size() == 1) {
      if (auto op = ops_.prefix(name)) {
        Term arg = resolve(args[0]);
        // "-(1)" must not read back as the integer -1.
        bool numeric = arg.is_int() || arg.is_float();
        if (!(numeric && name == "-")) {
          int p = op->priority;
          int arg_max = op->type == OpType::fy ? p : p - 1;
          std::string body = quote_atom_if_needed(name);
          std::string operand;
          emit(operand, arg, arg_max, true);
          // "op(" would read as functional notation.
          // "- 0.5**f" must not read back as (-0.5)**f.
          bool digit = std::isdigit(static_cast<unsigned char>(operand.front())) != 0;
          if (operand.front() == '(' || (is_word_char(body.back()) && is_word_char(operand.front())) ||
              (digit && (name == "-" || name == "+"))) {
            body += " ";
          }
          append(body, operand);
          wrap(out, body, p > max_priority);
          return;
        }
      }
      if (auto op = ops_.postfix(name)) {
        int p = op->priority;
        int arg_max = op->type == OpType::yf ? p : p - 1;
        std::string body;
        emit(body, args[0], arg_max, true);
        append(body, quote_atom_if_needed(name));
        wrap(out, body, p > max_priority);
        return;
      }
    }

    std::string text = name == "[]" || name == "{}" ? "'" + name + "'" : quote_atom_if_needed(name);
    text += "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i > 0) text += ",";
      std::string a;
      emit(a, args[i], 999, false);
      text += a;
    }
    text += ")";
    append(out, text);
  }

  void emit_list(std::string& out, Term t) {
    std::string text = "[";
    bool first = true;
    for (;;) {
      if (!first) text += ",";
      first = false;
      std::string item;
      emit(item, arena_.arg(t, 0), 999, false);
      text += item;
      Term tail = resolve(arena_.arg(t, 1));
      if (tail.is_functor(sym::dot, 2)) {
        t = tail;
        continue;
      }
      if (!tail.is_atom(sym::nil)) {
        text += "|";
        std::string rest;
        emit(rest, tail, 999, false);
        text += rest;
      }
      break;
    }
    text += "]";
    append(out, text);
  }

  static void wrap(std::string& out, const std::string& body, bool parens) {
    if (parens) {
      append(out, "(" + body + ")");
    } else {
      append(out, body);
    }
  }

  const TermArena& arena_;
  const SymbolTable& symbols_;
  const OperatorTable& ops_;
  const VarStore* store_;
};

}  // namespace

std::string quote_atom_if_needed(std::string_view name) {
  if (!needs_quotes(name)) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default: out += c;
    }
  }
  out += "'";
  return out;
}

std::string format_term(const TermArena& arena, Term t, const SymbolTable& symbols,
                        const OperatorTable& ops, const VarStore* store) {
  return Printer(arena, symbols, ops, store).print(t, 1200);
}

}  // namespace plb
