#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vulpath::frontend::detail {

enum class TokKind { Ident, Number, String, Char, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int line = 1;
  int column = 1;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
};

/// Splits C source into tokens. Comments and preprocessor lines are dropped.
std::vector<Token> lex(std::string_view source);

}  // namespace vulpath::frontend::detail
