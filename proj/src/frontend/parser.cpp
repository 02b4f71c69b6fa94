#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>

#include "lexer.hpp"
#include "vulpath/error.hpp"
#include "vulpath/frontend/ast.hpp"

namespace vulpath::frontend {

namespace {

constexpr std::array<std::string_view, 18> kKindNames = {
    "Function", "ParamList",      "Param",        "Block",    "Decl",       "Assign",
    "If",       "Else",           "Call",         "ArgList",  "ArraySubscript", "PointerDeref",
    "BinaryOp", "UnaryOp",        "Identifier",   "Literal",  "Return",     "Condition"};

}  // namespace

std::string_view to_string(NodeKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<NodeKind>(i);
  }
  return std::nullopt;
}

namespace {

using detail::Token;
using detail::TokKind;

const std::set<std::string, std::less<>> kTypeWords = {
    "void",     "char",      "short",    "int",      "long",      "float",    "double",
    "signed",   "unsigned",  "const",    "volatile", "static",    "extern",   "register",
    "struct",   "union",     "enum",     "auto",     "_Bool",     "bool",     "size_t",
    "wchar_t",  "ssize_t",   "ptrdiff_t", "FILE",    "intptr_t",  "uintptr_t", "off_t"};

const std::set<std::string, std::less<>> kStatementWords = {
    "if",   "else",   "while", "for",     "do",      "return", "break", "continue",
    "goto", "switch", "case",  "default", "sizeof",  "typedef", "asm"};

constexpr std::array<std::string_view, 11> kAssignOps = {"=",  "+=", "-=",  "*=",  "/=", "%=",
                                                         "&=", "|=", "^=", "<<=", ">>="};

int binary_precedence(std::string_view op) {
  static const std::unordered_map<std::string_view, int> table = {
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6},
      {"<", 7},  {">", 7},  {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},
      {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10}};
  auto it = table.find(op);
  return it == table.end() ? -1 : it->second;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(detail::lex(src)) {}

  Ast parse() {
    int fn = parse_function_definition();
    if (peek().kind != TokKind::End) fail(peek(), "trailing content after function definition");
    return finish(fn);
  }

 private:
  struct Proto {
    AstNode node;
    std::size_t begin = 0;
  };

  // ---- token helpers ----------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is(std::string_view text, std::size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == TokKind::Punct || t.kind == TokKind::Ident) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  const Token& expect(std::string_view text) {
    if (!is(text)) fail(peek(), "expected '" + std::string(text) + "'");
    return next();
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::string found = t.kind == TokKind::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.line, t.column, msg + ", found " + found);
  }
  std::size_t prev_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].end; }

  bool is_type_word(const Token& t) const {
    if (t.kind != TokKind::Ident) return false;
    if (kTypeWords.count(t.text) || typedefs_.count(t.text)) return true;
    return t.text.size() > 2 && t.text.ends_with("_t");
  }
  bool is_plain_ident(const Token& t) const {
    return t.kind == TokKind::Ident && !kStatementWords.count(t.text) && !kTypeWords.count(t.text);
  }

  // ---- node construction --------------------------------------------------

  int make(NodeKind kind, std::size_t begin_tok, std::vector<int> children = {}) {
    const Token& first = toks_[begin_tok];
    Proto p;
    p.node.kind = kind;
    p.node.line = first.line;
    p.begin = first.begin;
    std::size_t end = std::max(prev_end(), first.begin);
    p.node.code = std::string(src_.substr(first.begin, end - first.begin));
    p.node.children = std::move(children);
    protos_.push_back(std::move(p));
    return static_cast<int>(protos_.size() - 1);
  }
  AstNode& node(int id) { return protos_[static_cast<std::size_t>(id)].node; }

  // ---- declarations -------------------------------------------------------

  bool looks_like_decl() const {
    const Token& t0 = peek();
    if (t0.kind != TokKind::Ident || kStatementWords.count(t0.text)) return false;
    if (is_type_word(t0)) return true;
    const Token& t1 = peek(1);
    if (t1.kind == TokKind::Ident && !kStatementWords.count(t1.text)) return true;
    // `T * name = ...;` with an unknown typedef T.
    std::size_t k = 1;
    if (!is("*", k)) return false;
    while (is("*", k)) ++k;
    if (peek(k).kind != TokKind::Ident) return false;
    ++k;
    return is("=", k) || is(";", k) || is("[", k) || is(",", k);
  }

  // Consumes type specifiers; returns false when none were present.
  bool parse_specifiers() {
    bool any = false;
    while (true) {
      const Token& t = peek();
      if (t.kind != TokKind::Ident) break;
      if (t.text == "struct" || t.text == "union" || t.text == "enum") {
        next();
        if (peek().kind == TokKind::Ident) typedefs_.insert(next().text);
        if (is("{")) throw UnsupportedConstruct("inline struct definition", t.line);
        any = true;
        continue;
      }
      if (is_type_word(t)) {
        next();
        any = true;
        continue;
      }
      if (!any && is_plain_ident(t)) {
        typedefs_.insert(t.text);
        next();
        any = true;
        continue;
      }
      break;
    }
    return any;
  }

  int parse_decl_statement() {
    std::size_t begin = pos_;
    if (is("typedef")) throw UnsupportedConstruct("typedef", peek().line);
    parse_specifiers();
    std::vector<int> kids;
    do {
      int stars = 0;
      while (is("*") || is("const")) {
        if (is("*")) ++stars;
        next();
      }
      if (is("(")) throw UnsupportedConstruct("function pointer", peek().line);
      const Token& name_tok = peek();
      if (!is_plain_ident(name_tok)) fail(name_tok, "expected declarator name");
      std::size_t name_pos = pos_;
      next();
      kids.push_back(make(NodeKind::Identifier, name_pos));
      node(kids.back()).declarator = true;
      bool array = false;
      while (accept("[")) {
        array = true;
        if (!is("]")) kids.push_back(parse_assignment());
        expect("]");
      }
      if (stars > 0 || array) pointer_like_.insert(name_tok.text);
      if (accept("=")) kids.push_back(is("{") ? parse_initializer_list() : parse_assignment());
    } while (accept(","));
    int id = make(NodeKind::Decl, begin, std::move(kids));
    expect(";");
    node(id).is_statement = true;
    return id;
  }

  int parse_initializer_list() {
    std::size_t begin = pos_;
    expect("{");
    std::vector<int> kids;
    while (!is("}")) {
      kids.push_back(is("{") ? parse_initializer_list() : parse_assignment());
      if (!accept(",")) break;
    }
    expect("}");
    return make(NodeKind::Literal, begin, std::move(kids));
  }

  // ---- expressions --------------------------------------------------------

  int parse_expression() {
    std::size_t begin = pos_;
    int lhs = parse_assignment();
    while (is(",")) {
      next();
      int rhs = parse_assignment();
      lhs = make(NodeKind::BinaryOp, begin, {lhs, rhs});
    }
    return lhs;
  }

  int parse_assignment() {
    std::size_t begin = pos_;
    int lhs = parse_conditional();
    const Token& t = peek();
    if (t.kind == TokKind::Punct &&
        std::find(kAssignOps.begin(), kAssignOps.end(), t.text) != kAssignOps.end()) {
      next();
      int rhs = parse_assignment();
      return make(NodeKind::Assign, begin, {lhs, rhs});
    }
    return lhs;
  }

  int parse_conditional() {
    std::size_t begin = pos_;
    int cond = parse_binary(1);
    if (!accept("?")) return cond;
    int a = parse_expression();
    expect(":");
    int b = parse_conditional();
    return make(NodeKind::BinaryOp, begin, {cond, a, b});
  }

  int parse_binary(int min_prec) {
    std::size_t begin = pos_;
    int lhs = parse_unary();
    while (true) {
      const Token& t = peek();
      int prec = t.kind == TokKind::Punct ? binary_precedence(t.text) : -1;
      if (prec < min_prec) break;
      next();
      int rhs = parse_binary(prec + 1);
      lhs = make(NodeKind::BinaryOp, begin, {lhs, rhs});
    }
    return lhs;
  }

  bool looks_like_cast() const {
    if (!is("(")) return false;
    const Token& t = peek(1);
    if (t.kind != TokKind::Ident) return false;
    std::size_t k = 1;
    if (is_type_word(t) || typedefs_.count(t.text)) {
      while (peek(k).kind == TokKind::Ident && !kStatementWords.count(peek(k).text)) ++k;
    } else if (is_plain_ident(t) && is("*", 2)) {
      k = 2;
    } else {
      return false;
    }
    while (is("*", k) || is("const", k)) ++k;
    return is(")", k);
  }

  void skip_type_name() {
    while (peek().kind == TokKind::Ident && !kStatementWords.count(peek().text)) next();
    while (is("*") || is("const")) next();
  }

  int parse_unary() {
    std::size_t begin = pos_;
    const Token& t = peek();
    if (t.kind == TokKind::Punct) {
      if (t.text == "++" || t.text == "--" || t.text == "&" || t.text == "-" || t.text == "+" ||
          t.text == "!" || t.text == "~") {
        next();
        int operand = parse_unary();
        return make(NodeKind::UnaryOp, begin, {operand});
      }
      if (t.text == "*") {
        next();
        int operand = parse_unary();
        return make(NodeKind::PointerDeref, begin, {operand});
      }
      if (looks_like_cast()) {
        next();
        skip_type_name();
        expect(")");
        int operand = parse_unary();
        return make(NodeKind::UnaryOp, begin, {operand});
      }
    }
    if (t.kind == TokKind::Ident && t.text == "sizeof") {
      next();
      if (is("(") && (is_type_word(peek(1)) || looks_like_cast())) {
        next();
        skip_type_name();
        expect(")");
        return make(NodeKind::UnaryOp, begin);
      }
      int operand = parse_unary();
      return make(NodeKind::UnaryOp, begin, {operand});
    }
    return parse_postfix();
  }

  int parse_postfix() {
    std::size_t begin = pos_;
    int e = parse_primary();
    while (true) {
      if (is("(")) {
        std::size_t args_begin = pos_;
        next();
        std::vector<int> args;
        if (!is(")")) {
          do {
            args.push_back(parse_assignment());
          } while (accept(","));
        }
        expect(")");
        int arglist = make(NodeKind::ArgList, args_begin, std::move(args));
        e = make(NodeKind::Call, begin, {e, arglist});
      } else if (is("[")) {
        next();
        int idx = parse_expression();
        expect("]");
        e = make(NodeKind::ArraySubscript, begin, {e, idx});
      } else if (is(".") || is("->")) {
        bool arrow = is("->");
        next();
        if (peek().kind != TokKind::Ident) fail(peek(), "expected member name");
        next();
        e = make(arrow ? NodeKind::PointerDeref : NodeKind::UnaryOp, begin, {e});
      } else if (is("++") || is("--")) {
        next();
        e = make(NodeKind::UnaryOp, begin, {e});
      } else {
        return e;
      }
    }
  }

  int parse_primary() {
    std::size_t begin = pos_;
    const Token& t = peek();
    switch (t.kind) {
      case TokKind::Ident:
        if (kStatementWords.count(t.text) || kTypeWords.count(t.text)) fail(t, "expected expression");
        next();
        return make(NodeKind::Identifier, begin);
      case TokKind::Number:
      case TokKind::Char:
        next();
        return make(NodeKind::Literal, begin);
      case TokKind::String:
        while (peek().kind == TokKind::String) next();
        return make(NodeKind::Literal, begin);
      case TokKind::Punct:
        if (t.text == "(") {
          next();
          int e = parse_expression();
          expect(")");
          return e;
        }
        break;
      case TokKind::End:
        break;
    }
    fail(t, "expected expression");
  }

  // ---- statements ---------------------------------------------------------

  int make_expression_statement(int e) {
    AstNode& n = node(e);
    if (n.kind == NodeKind::UnaryOp && (n.code.starts_with("++") || n.code.starts_with("--") ||
                                        n.code.ends_with("++") || n.code.ends_with("--"))) {
      n.kind = NodeKind::Assign;
    }
    n.is_statement = true;
    return e;
  }

  // Block body: `{ ... }` or a single statement wrapped in a synthetic Block.
  int parse_body() {
    if (is("{")) return parse_block();
    std::size_t begin = pos_;
    std::vector<int> kids;
    std::vector<std::pair<int, bool>> jumps;
    parse_block_item(kids, jumps);
    int id = make(NodeKind::Block, begin, std::move(kids));
    node(id).jumps = std::move(jumps);
    node(id).code.clear();
    return id;
  }

  int parse_block() {
    std::size_t begin = pos_;
    expect("{");
    std::vector<int> kids;
    std::vector<std::pair<int, bool>> jumps;
    while (!is("}")) {
      if (peek().kind == TokKind::End) fail(peek(), "expected '}'");
      parse_block_item(kids, jumps);
    }
    expect("}");
    int id = make(NodeKind::Block, begin, std::move(kids));
    node(id).jumps = std::move(jumps);
    node(id).code.clear();
    return id;
  }

  void parse_block_item(std::vector<int>& kids, std::vector<std::pair<int, bool>>& jumps) {
    if (is("break") || is("continue")) {
      const Token& t = next();
      if (loop_depth_ == 0) throw SyntaxError(t.line, t.column, "'" + t.text + "' outside loop");
      expect(";");
      jumps.emplace_back(static_cast<int>(kids.size()), t.text == "break");
      return;
    }
    int s = parse_statement();
    if (s >= 0) kids.push_back(s);
  }

  int make_condition(std::size_t keyword_tok, std::optional<int> expr) {
    std::vector<int> kids;
    if (expr) kids.push_back(*expr);
    int c = make(NodeKind::Condition, pos_, std::move(kids));
    AstNode& n = node(c);
    n.line = toks_[keyword_tok].line;
    n.code = expr ? node(*expr).code : std::string();
    n.is_statement = true;
    return c;
  }

  int parse_statement() {
    const Token& t = peek();
    std::size_t begin = pos_;
    if (t.kind == TokKind::Punct) {
      if (t.text == ";") {
        next();
        return -1;
      }
      if (t.text == "{") return parse_block();
    }
    if (t.kind == TokKind::Ident) {
      if (t.text == "goto") throw UnsupportedConstruct("goto", t.line);
      if (t.text == "switch" || t.text == "case" || t.text == "default")
        throw UnsupportedConstruct("switch", t.line);
      if (t.text == "asm") throw UnsupportedConstruct("asm", t.line);
      if (is_plain_ident(t) && is(":", 1)) throw UnsupportedConstruct("label", t.line);
      if (t.text == "if") return parse_if();
      if (t.text == "while") return parse_while();
      if (t.text == "do") return parse_do();
      if (t.text == "for") return parse_for();
      if (t.text == "return") {
        next();
        std::vector<int> kids;
        if (!is(";")) kids.push_back(parse_expression());
        int r = make(NodeKind::Return, begin, std::move(kids));
        expect(";");
        node(r).is_statement = true;
        return r;
      }
      if (t.text == "else") fail(t, "'else' without 'if'");
      if (looks_like_decl()) return parse_decl_statement();
    }
    int e = parse_expression();
    expect(";");
    return make_expression_statement(e);
  }

  int parse_if() {
    std::size_t begin = pos_;
    std::size_t kw = pos_;
    next();
    expect("(");
    int expr = parse_expression();
    expect(")");
    int cond = make_condition(kw, expr);
    int then_body = parse_body();
    std::vector<int> kids = {cond, then_body};
    if (is("else")) {
      std::size_t else_begin = pos_;
      next();
      int else_body = parse_body();
      int e = make(NodeKind::Else, else_begin, {else_body});
      node(e).code = "else";
      kids.push_back(e);
    }
    int id = make(NodeKind::If, begin, std::move(kids));
    node(id).code = "if (" + node(cond).code + ")";
    return id;
  }

  int parse_while() {
    std::size_t begin = pos_;
    std::size_t kw = pos_;
    next();
    expect("(");
    int expr = parse_expression();
    expect(")");
    int cond = make_condition(kw, expr);
    ++loop_depth_;
    int body = parse_body();
    --loop_depth_;
    int id = make(NodeKind::If, begin, {cond, body});
    node(id).loop = LoopKind::While;
    node(id).code = "while (" + node(cond).code + ")";
    return id;
  }

  int parse_do() {
    std::size_t begin = pos_;
    next();
    ++loop_depth_;
    int body = parse_body();
    --loop_depth_;
    std::size_t kw = pos_;
    expect("while");
    expect("(");
    int expr = parse_expression();
    expect(")");
    int cond = make_condition(kw, expr);
    int id = make(NodeKind::If, begin, {cond, body});
    expect(";");
    node(id).loop = LoopKind::DoWhile;
    node(id).code = "do while (" + node(cond).code + ")";
    return id;
  }

  // for(init; cond; step) body  ==>  Block{ init; If[loop]{Condition, body, step} }
  int parse_for() {
    std::size_t begin = pos_;
    std::size_t kw = pos_;
    next();
    expect("(");
    std::vector<int> outer;
    if (looks_like_decl()) {
      outer.push_back(parse_decl_statement());
    } else {
      if (!is(";")) outer.push_back(make_expression_statement(parse_expression()));
      expect(";");
    }
    std::optional<int> cond_expr;
    if (!is(";")) cond_expr = parse_expression();
    expect(";");
    int cond = make_condition(kw, cond_expr);
    std::optional<int> step;
    if (!is(")")) step = make_expression_statement(parse_expression());
    expect(")");
    ++loop_depth_;
    int body = parse_body();
    --loop_depth_;
    std::vector<int> loop_kids = {cond, body};
    if (step) loop_kids.push_back(*step);
    int loop = make(NodeKind::If, begin, std::move(loop_kids));
    node(loop).loop = LoopKind::While;
    node(loop).loop_step = step ? 2 : -1;
    node(loop).code = "for (" + node(cond).code + ")";
    outer.push_back(loop);
    int id = make(NodeKind::Block, begin, std::move(outer));
    node(id).code.clear();
    return id;
  }

  // ---- function -----------------------------------------------------------

  int parse_param() {
    std::size_t begin = pos_;
    if (is("...")) throw UnsupportedConstruct("variadic parameters", peek().line);
    parse_specifiers();
    int stars = 0;
    while (is("*") || is("const")) {
      if (is("*")) ++stars;
      next();
    }
    if (is("(")) throw UnsupportedConstruct("function pointer", peek().line);
    std::vector<int> kids;
    if (is_plain_ident(peek())) {
      std::string name = peek().text;
      std::size_t name_pos = pos_;
      next();
      kids.push_back(make(NodeKind::Identifier, name_pos));
      node(kids.back()).declarator = true;
      bool array = false;
      while (accept("[")) {
        array = true;
        while (!is("]") && peek().kind != TokKind::End) next();
        expect("]");
      }
      if (stars > 0 || array) pointer_like_.insert(name);
    }
    return make(NodeKind::Param, begin, std::move(kids));
  }

  int parse_function_definition() {
    std::size_t begin = pos_;
    while (is("static") || is("inline") || is("extern")) next();
    if (!parse_specifiers()) fail(peek(), "expected function return type");
    while (is("*") || is("const")) next();
    const Token& name = peek();
    if (!is_plain_ident(name)) fail(name, "expected function name");
    std::string fn_name = name.text;
    next();
    std::size_t params_begin = pos_;
    expect("(");
    std::vector<int> params;
    if (is("void") && is(")", 1)) {
      next();
    } else if (!is(")")) {
      do {
        params.push_back(parse_param());
      } while (accept(","));
    }
    expect(")");
    std::size_t signature_end = prev_end();
    int param_list = make(NodeKind::ParamList, params_begin, std::move(params));
    if (!is("{")) fail(peek(), "expected function body");
    int body = parse_block();
    int fn = make(NodeKind::Function, begin, {param_list, body});
    node(fn).code = std::string(src_.substr(toks_[begin].begin, signature_end - toks_[begin].begin));
    function_name_ = fn_name;
    first_line_ = toks_[begin].line;
    last_line_ = toks_[pos_ - 1].line;
    return fn;
  }

  // Renumbers nodes into preorder starting at the root.
  Ast finish(int root) {
    Ast ast;
    ast.function_name = function_name_;
    ast.first_line = first_line_;
    ast.last_line = last_line_;
    std::vector<int> order;
    std::vector<int> new_id(protos_.size(), -1);
    std::vector<int> stack = {root};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      new_id[static_cast<std::size_t>(id)] = static_cast<int>(order.size());
      order.push_back(id);
      const auto& kids = protos_[static_cast<std::size_t>(id)].node.children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    ast.nodes.reserve(order.size());
    for (int old : order) {
      AstNode n = std::move(protos_[static_cast<std::size_t>(old)].node);
      n.id = new_id[static_cast<std::size_t>(old)];
      for (int& c : n.children) c = new_id[static_cast<std::size_t>(c)];
      ast.nodes.push_back(std::move(n));
    }
    ast.pointer_like.assign(pointer_like_.begin(), pointer_like_.end());
    return ast;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Proto> protos_;
  std::set<std::string, std::less<>> typedefs_;
  std::set<std::string> pointer_like_;
  int loop_depth_ = 0;
  std::string function_name_;
  int first_line_ = 0;
  int last_line_ = 0;
};

}  // namespace

Ast parse_function(std::string_view source) { return Parser(source).parse(); }

}  // namespace vulpath::frontend
