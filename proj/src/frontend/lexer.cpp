#include "lexer.hpp"

#include <array>
#include <cctype>

#include "vulpath/error.hpp"

namespace vulpath::frontend::detail {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

constexpr std::array<std::string_view, 22> kPuncts = {
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=",  "&&",  "||",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;
  bool at_line_start = true;

  auto column = [&](std::size_t pos) { return static_cast<int>(pos - line_start) + 1; };
  auto newline = [&](std::size_t pos) {
    ++line;
    line_start = pos + 1;
    at_line_start = true;
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      newline(i);
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#' && at_line_start) {
      // Preprocessor directive, honoring backslash continuations.
      while (i < src.size() && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
          newline(i + 1);
          i += 2;
          continue;
        }
        ++i;
      }
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int l = line, col = column(i);
      i += 2;
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') newline(i);
        ++i;
      }
      if (i + 1 >= src.size()) throw SyntaxError(l, col, "unterminated comment");
      i += 2;
      continue;
    }

    at_line_start = false;
    Token t;
    t.line = line;
    t.column = column(i);
    t.begin = i;
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) ++i;
      t.kind = TokKind::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && (ident_char(src[i]) || src[i] == '.')) ++i;
      t.kind = TokKind::Number;
    } else if (c == '"' || c == '\'') {
      char q = c;
      ++i;
      while (i < src.size() && src[i] != q) {
        if (src[i] == '\\') ++i;
        if (i < src.size() && src[i] == '\n') throw SyntaxError(t.line, t.column, "unterminated literal");
        ++i;
      }
      if (i >= src.size()) throw SyntaxError(t.line, t.column, "unterminated literal");
      ++i;
      t.kind = q == '"' ? TokKind::String : TokKind::Char;
    } else {
      t.kind = TokKind::Punct;
      std::size_t len = 1;
      for (auto p : kPuncts) {
        if (src.substr(i, p.size()) == p) {
          len = p.size();
          break;
        }
      }
      if (len == 1 && std::string_view("{}()[];,=<>+-*/%&|^!~?:.").find(c) == std::string_view::npos) {
        throw SyntaxError(t.line, t.column, std::string("unexpected character '") + c + "'");
      }
      i += len;
    }
    t.end = i;
    t.text = std::string(src.substr(t.begin, t.end - t.begin));
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = TokKind::End;
  end.line = line;
  end.column = column(i);
  end.begin = end.end = src.size();
  out.push_back(end);
  return out;
}

}  // namespace vulpath::frontend::detail
