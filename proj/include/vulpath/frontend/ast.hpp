#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vulpath::frontend {

enum class NodeKind : std::uint8_t {
  Function,
  ParamList,
  Param,
  Block,
  Decl,
  Assign,
  If,
  Else,
  Call,
  ArgList,
  ArraySubscript,
  PointerDeref,
  BinaryOp,
  UnaryOp,
  Identifier,
  Literal,
  Return,
  Condition,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

/// Loop shape of an `If` node produced by lowering `while`/`for`/`do`.
enum class LoopKind : std::uint8_t { None, While, DoWhile };

struct AstNode {
  int id = 0;
  NodeKind kind = NodeKind::Function;
  std::string code;
  int line = 0;
  std::vector<int> children;
  bool is_statement = false;
  // Identifier that names the variable introduced by a Decl.
  bool declarator = false;

  // Structural detail the CFG builder needs; not part of the CPG.
  LoopKind loop = LoopKind::None;
  // Lowered `for`: index into `children` of the step statement, or -1.
  int loop_step = -1;
  // Jump statements (break/continue) are not nodes; they are recorded on the
  // enclosing Block as markers after the child at this position.
  std::vector<std::pair<int, bool>> jumps;  // (child position, is_break)
};

/// Flat arena of one parsed function. Node ids equal their index; the root
/// (`Function`) is node 0 and ids follow preorder.
struct Ast {
  std::string function_name;
  std::vector<AstNode> nodes;
  int first_line = 0;
  int last_line = 0;

  const AstNode& root() const { return nodes.front(); }
  const AstNode& at(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return nodes.size(); }

  /// Names declared with pointer or array type (parameters and locals).
  std::vector<std::string> pointer_like;
};

/// Parses exactly one C function definition in the supported subset.
/// Preprocessor lines are skipped. Throws SyntaxError or UnsupportedConstruct.
Ast parse_function(std::string_view source);

}  // namespace vulpath::frontend
