#include "vulpath/frontend/cpg_json.hpp"

#include <set>

#include "vulpath/error.hpp"

namespace vulpath::frontend {

using nlohmann::json;

json cpg_to_json(const CodePropertyGraph& g) {
  json nodes = json::array();
  for (const CpgNode& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", std::string(to_string(n.kind))},
                     {"code", n.code},
                     {"line", n.line},
                     {"is_statement", n.is_statement}});
  }
  json edges = json::array();
  for (const CpgEdge& e : g.edges) {
    json je = {{"src", e.src}, {"dst", e.dst}, {"kind", std::string(to_string(e.kind))}};
    if (e.kind == EdgeKind::DDG) je["var"] = e.var;
    edges.push_back(std::move(je));
  }
  return {{"function", g.function_name},
          {"entry", g.entry},
          {"exit", g.exit},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

namespace {

const json& member(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required member");
  return *it;
}

int int_member(const json& obj, const std::string& path, const char* key) {
  const json& v = member(obj, path, key);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key, "expected integer");
  return v.get<int>();
}

std::string string_member(const json& obj, const std::string& path, const char* key) {
  const json& v = member(obj, path, key);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected string");
  return v.get<std::string>();
}

}  // namespace

CodePropertyGraph cpg_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "expected object");
  CodePropertyGraph g;
  g.function_name = string_member(doc, "$", "function");
  g.entry = int_member(doc, "$", "entry");
  g.exit = int_member(doc, "$", "exit");
  const json& nodes = member(doc, "$", "nodes");
  if (!nodes.is_array()) throw SchemaError("$.nodes", "expected array");
  const json& edges = member(doc, "$", "edges");
  if (!edges.is_array()) throw SchemaError("$.edges", "expected array");

  std::set<int> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string path = "$.nodes[" + std::to_string(i) + "]";
    const json& jn = nodes[i];
    if (!jn.is_object()) throw SchemaError(path, "expected object");
    CpgNode n;
    n.id = int_member(jn, path, "id");
    auto kind = node_kind_from_string(string_member(jn, path, "kind"));
    if (!kind) throw SchemaError(path + ".kind", "unknown node kind");
    n.kind = *kind;
    n.code = string_member(jn, path, "code");
    n.line = int_member(jn, path, "line");
    const json& st = member(jn, path, "is_statement");
    if (!st.is_boolean()) throw SchemaError(path + ".is_statement", "expected boolean");
    n.is_statement = st.get<bool>();
    if (!ids.insert(n.id).second) throw SchemaError(path + ".id", "duplicate node id");
    g.nodes.push_back(std::move(n));
  }
  if (!ids.count(g.entry)) throw SchemaError("$.entry", "not a node id");
  if (!ids.count(g.exit)) throw SchemaError("$.exit", "not a node id");

  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string path = "$.edges[" + std::to_string(i) + "]";
    const json& je = edges[i];
    if (!je.is_object()) throw SchemaError(path, "expected object");
    CpgEdge e;
    e.src = int_member(je, path, "src");
    e.dst = int_member(je, path, "dst");
    if (!ids.count(e.src)) throw SchemaError(path + ".src", "not a node id");
    if (!ids.count(e.dst)) throw SchemaError(path + ".dst", "not a node id");
    auto kind = edge_kind_from_string(string_member(je, path, "kind"));
    if (!kind) throw SchemaError(path + ".kind", "unknown edge kind");
    e.kind = *kind;
    if (e.kind == EdgeKind::DDG) {
      e.var = string_member(je, path, "var");
      if (e.var.empty()) throw SchemaError(path + ".var", "DDG edge needs a variable");
    } else if (je.contains("var")) {
      throw SchemaError(path + ".var", "only DDG edges carry a variable");
    }
    g.edges.push_back(std::move(e));
  }
  g.finalize();
  return g;
}

}  // namespace vulpath::frontend
