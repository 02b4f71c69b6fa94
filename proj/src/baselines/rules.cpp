#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "vulpath/baselines/rules.hpp"

namespace vulpath::baselines {

using frontend::CodePropertyGraph;
using frontend::EdgeKind;
using frontend::NodeKind;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

int precedence(const std::string& op) {
  static const std::map<std::string, int> table{
      {",", 1},  {"?", 2},  {"||", 3}, {"&&", 4}, {"|", 5},  {"^", 6},  {"&", 7},  {"==", 8}, {"!=", 8},
      {"<", 9},  {">", 9},  {"<=", 9}, {">=", 9}, {"<<", 10}, {">>", 10}, {"+", 11}, {"-", 11}, {"*", 12},
      {"/", 12}, {"%", 12}};
  auto it = table.find(op);
  return it == table.end() ? 0 : it->second;
}

std::map<int, int> ast_parents(const CodePropertyGraph& cpg) {
  std::map<int, int> parent;
  for (const auto& e : cpg.edges)
    if (e.kind == EdgeKind::AST) parent[e.dst] = e.src;
  return parent;
}

std::map<int, std::vector<int>> ast_children(const CodePropertyGraph& cpg) {
  std::map<int, std::vector<int>> kids;
  for (const auto& e : cpg.edges)
    if (e.kind == EdgeKind::AST) kids[e.src].push_back(e.dst);
  return kids;
}

// True when `node` sits in a call's argument list or an array index before
// reaching its statement.
bool feeds_size_or_index(const CodePropertyGraph& cpg, int node, const std::map<int, int>& parent,
                         const std::map<int, std::vector<int>>& kids) {
  int child = node;
  for (auto it = parent.find(node); it != parent.end(); it = parent.find(child)) {
    const int p = it->second;
    const auto& pn = cpg.node(p);
    if (pn.kind == NodeKind::ArgList) return true;
    if (pn.kind == NodeKind::ArraySubscript) {
      const auto& ch = kids.at(p);
      if (child == *std::max_element(ch.begin(), ch.end())) return true;
    }
    if (pn.is_statement) return false;
    child = p;
  }
  return false;
}

}  // namespace

std::string_view to_string(SinkRule rule) {
  switch (rule) {
    case SinkRule::ApiCall: return "ApiCall";
    case SinkRule::ArrayUsage: return "ArrayUsage";
    case SinkRule::PointerUsage: return "PointerUsage";
    case SinkRule::Arithmetic: return "Arithmetic";
  }
  return "?";
}

std::string callee_name(std::string_view code) {
  std::size_t i = 0;
  while (i < code.size() && std::isspace(static_cast<unsigned char>(code[i]))) ++i;
  const std::size_t start = i;
  while (i < code.size() && word_char(code[i])) ++i;
  if (i == start || std::isdigit(static_cast<unsigned char>(code[start]))) return {};
  std::size_t j = i;
  while (j < code.size() && std::isspace(static_cast<unsigned char>(code[j]))) ++j;
  if (j >= code.size() || code[j] != '(') return {};
  return std::string(code.substr(start, i - start));
}

std::string binary_operator(std::string_view code) {
  static const char* const kOps[] = {"<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "->", "++", "--",
                                     "+",  "-",  "*",  "/",  "%",  "<",  ">",  "&",  "|",  "^",  "?",
                                     ",",  "=",  "!",  "~",  ".",  ":"};
  int depth = 0;
  bool operand_before = false;
  std::string best;
  int best_prec = 1 << 20;
  for (std::size_t i = 0; i < code.size();) {
    const char c = code[i];
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < code.size() && code[j] != c) j += code[j] == '\\' ? 2 : 1;
      i = j + 1;
      operand_before = true;
      continue;
    }
    if (c == '(' || c == '[') {
      ++depth;
      ++i;
      operand_before = false;
      continue;
    }
    if (c == ')' || c == ']') {
      --depth;
      ++i;
      operand_before = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (word_char(c)) {
      while (i < code.size() && word_char(code[i])) ++i;
      operand_before = true;
      continue;
    }
    std::string op;
    for (const char* candidate : kOps) {
      const std::string_view cv(candidate);
      if (code.substr(i, cv.size()) == cv) {
        op = candidate;
        break;
      }
    }
    if (op.empty()) op = std::string(1, c);
    i += op.size();
    if (op == "++" || op == "--" || op == "->" || op == ".") {
      operand_before = true;
      continue;
    }
    const int prec = precedence(op);
    if (depth == 0 && operand_before && prec > 0 && prec <= best_prec) {
      best = op;
      best_prec = prec;
    }
    operand_before = false;
  }
  return best;
}

std::vector<SinkRuleHit> rule_based_sinks(const CodePropertyGraph& cpg, const RuleConfig& config) {
  std::set<std::string> apis;
  for (const auto& a : config.sensitive_apis) apis.insert(lower(a));
  const auto parent = ast_parents(cpg);
  const auto kids = ast_children(cpg);
  std::vector<SinkRuleHit> hits;
  for (const auto& n : cpg.nodes) {
    switch (n.kind) {
      case NodeKind::Call:
        if (apis.count(lower(callee_name(n.code)))) hits.push_back({n.id, n.line, SinkRule::ApiCall});
        break;
      case NodeKind::ArraySubscript:
        hits.push_back({n.id, n.line, SinkRule::ArrayUsage});
        break;
      case NodeKind::PointerDeref:
        hits.push_back({n.id, n.line, SinkRule::PointerUsage});
        break;
      case NodeKind::BinaryOp: {
        static const std::set<std::string> arithmetic{"+", "-", "*", "/", "%", "<<", ">>"};
        if (arithmetic.count(binary_operator(n.code)) && feeds_size_or_index(cpg, n.id, parent, kids))
          hits.push_back({n.id, n.line, SinkRule::Arithmetic});
        break;
      }
      default:
        break;
    }
  }
  return hits;
}

int enclosing_statement(const CodePropertyGraph& cpg, int node) {
  const auto parent = ast_parents(cpg);
  for (int v = node;;) {
    if (cpg.node(v).is_statement) return v;
    auto it = parent.find(v);
    if (it == parent.end()) return -1;
    v = it->second;
  }
}

std::vector<int> rule_sink_statements(const CodePropertyGraph& cpg, const std::vector<SinkRuleHit>& hits) {
  std::set<int> out;
  for (const auto& h : hits) {
    const int s = enclosing_statement(cpg, h.node);
    if (s >= 0) out.insert(s);
  }
  return {out.begin(), out.end()};
}

}  // namespace vulpath::baselines
