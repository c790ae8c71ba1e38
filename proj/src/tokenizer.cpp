#include <charconv>
#include <cstdint>
#include <cctype>
#include <string>

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

bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool layout = skip_layout();
      if (i_ >= src_.size()) break;
      Token tok = lex_one();
      tok.layout_before = layout;
      out.push_back(std::move(tok));
    }
    return out;
  }

  SourcePos pos() const { return {line_, col_, static_cast<std::uint32_t>(i_)}; }

 private:
  char at(std::size_t k) const { return k < src_.size() ? src_[k] : '\0'; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  [[noreturn]] void fail(const std::string& msg, SourcePos p) const {
    throw PrologError(ErrorKind::Syntax, msg, p);
  }

  bool skip_layout() {
    bool any = false;
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (c == '/' && at(i_ + 1) == '*') {
        SourcePos start = pos();
        advance();
        advance();
        while (!(at(i_) == '*' && at(i_ + 1) == '/')) {
          if (i_ >= src_.size()) fail("unterminated block comment", start);
          advance();
        }
        advance();
        advance();
      } else {
        break;
      }
      any = true;
    }
    return any;
  }

  // A '.' ends a clause when followed by layout, '%' or end of input.
  bool at_end_dot() const {
    if (at(i_) != '.') return false;
    char n = at(i_ + 1);
    return n == '\0' || n == '%' || std::isspace(static_cast<unsigned char>(n));
  }

  Token lex_one() {
    Token tok;
    tok.pos = pos();
    std::size_t start = i_;
    char c = src_[i_];

    if (at_end_dot()) {
      advance();
      tok.kind = TokenKind::End;
      tok.text = ".";
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(tok);
    if (std::islower(static_cast<unsigned char>(c))) {
      while (i_ < src_.size() && is_alnum(src_[i_])) advance();
      tok.kind = TokenKind::Atom;
      tok.text = std::string(src_.substr(start, i_ - start));
      return tok;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < src_.size() && is_alnum(src_[i_])) advance();
      tok.kind = TokenKind::Variable;
      tok.text = std::string(src_.substr(start, i_ - start));
      return tok;
    }
    if (c == '\'') {
      tok.kind = TokenKind::Atom;
      tok.quoted = true;
      tok.text = lex_quoted('\'', tok.pos);
      return tok;
    }
    if (c == '"') {
      tok.kind = TokenKind::String;
      tok.quoted = true;
      tok.text = lex_quoted('"', tok.pos);
      return tok;
    }
    if (c == '!' || c == ';') {
      advance();
      tok.kind = TokenKind::Atom;
      tok.text = std::string(1, c);
      return tok;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
        c == '|') {
      advance();
      tok.kind = TokenKind::Punct;
      tok.text = std::string(1, c);
      return tok;
    }
    if (is_symbol_char(c)) {
      while (i_ < src_.size() && is_symbol_char(src_[i_])) advance();
      tok.kind = TokenKind::Atom;
      tok.text = std::string(src_.substr(start, i_ - start));
      return tok;
    }
    fail(std::string("unexpected character '") + c + "'", tok.pos);
  }

  Token lex_number(Token& tok) {
    std::size_t start = i_;
    if (at(i_) == '0' && at(i_ + 1) == '\'') return lex_char_code(tok);
    if (at(i_) == '0' && (at(i_ + 1) == 'x' || at(i_ + 1) == 'o' || at(i_ + 1) == 'b')) {
      int base = at(i_ + 1) == 'x' ? 16 : (at(i_ + 1) == 'o' ? 8 : 2);
      std::size_t k = i_ + 2;
      while (k < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[k]))) ++k;
      std::uint64_t v = 0;
      const char* first = src_.data() + i_ + 2;
      auto [end, ec] = std::from_chars(first, src_.data() + k, v, base);
      if (end != first) {
        if (ec == std::errc::result_out_of_range || end != src_.data() + k ||
            v > static_cast<std::uint64_t>(INT64_MAX)) {
          fail("invalid or out of range integer literal", tok.pos);
        }
        while (i_ < k) advance();
        tok.kind = TokenKind::Integer;
        tok.text = std::to_string(v);
        return tok;
      }
    }
    while (std::isdigit(static_cast<unsigned char>(at(i_)))) advance();
    tok.kind = TokenKind::Integer;
    if (at(i_) == '.' && std::isdigit(static_cast<unsigned char>(at(i_ + 1)))) {
      tok.kind = TokenKind::Float;
      advance();
      while (std::isdigit(static_cast<unsigned char>(at(i_)))) advance();
      if (at(i_) == 'e' || at(i_) == 'E') {
        std::size_t k = i_ + 1;
        if (at(k) == '+' || at(k) == '-') ++k;
        if (std::isdigit(static_cast<unsigned char>(at(k)))) {
          while (i_ < k) advance();
          while (std::isdigit(static_cast<unsigned char>(at(i_)))) advance();
        }
      }
    }
    tok.text = std::string(src_.substr(start, i_ - start));
    return tok;
  }

  // 0'c is the code of one character; a quote is written 0''' or 0''.
  Token lex_char_code(Token& tok) {
    advance();
    advance();
    if (i_ >= src_.size()) fail("unterminated character code", tok.pos);
    std::uint32_t code = 0;
    unsigned char c = static_cast<unsigned char>(src_[i_]);
    if (c == '\\') {
      switch (at(i_ + 1)) {
        case 'n': code = '\n'; break;
        case 't': code = '\t'; break;
        case 's': code = ' '; break;
        case '\\': code = '\\'; break;
        case '\'': code = '\''; break;
        default: fail("unsupported escape in character code", tok.pos);
      }
      advance();
      advance();
    } else if (c == '\'') {
      advance();
      if (at(i_) == '\'') advance();
      code = '\'';
    } else {
      int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : 4;
      code = len == 1 ? c : c & (0xff >> (len + 1));
      advance();
      for (int k = 1; k < len; ++k) {
        code = (code << 6) | (static_cast<unsigned char>(at(i_)) & 0x3f);
        advance();
      }
    }
    tok.kind = TokenKind::Integer;
    tok.text = std::to_string(code);
    return tok;
  }

  std::string lex_quoted(char q, SourcePos start) {

    std::string text;
    advance();  // opening quote
    for (;;) {
      if (i_ >= src_.size()) fail("unterminated quoted text", start);
      char c = src_[i_];
      if (c == q) {
        if (at(i_ + 1) == q) {
          text += q;
          advance();
          advance();
          continue;
        }
        advance();
        return text;
      }
      if (c == '\\') {
        char e = at(i_ + 1);
        switch (e) {
          case 'n': text += '\n'; break;
          case 't': text += '\t'; break;
          case 'r': text += '\r'; break;
          case '0': text += '\0'; break;
          case '\\': text += '\\'; break;
          case '\'': text += '\''; break;
          case '"': text += '"'; break;
          case '`': text += '`'; break;
          case '\n': break;  // line continuation
          case '\0': fail("unterminated quoted text", start);
          default: fail(std::string("unknown escape \\") + e, pos());
        }
        advance();
        advance();
        continue;
      }
      text += c;
      advance();
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src, SourcePos* eof) {
  Lexer lexer(src);
  auto tokens = lexer.run();
  if (eof != nullptr) *eof = lexer.pos();
  return tokens;
}

}  // namespace plb
