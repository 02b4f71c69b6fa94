#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::baselines {

enum class SinkRule : std::uint8_t { ApiCall, ArrayUsage, PointerUsage, Arithmetic };
std::string_view to_string(SinkRule rule);

struct SinkRuleHit {
  int node = 0;
  int line = 0;
  SinkRule rule = SinkRule::ApiCall;

  friend bool operator==(const SinkRuleHit&, const SinkRuleHit&) = default;
};

struct RuleConfig {
  std::vector<std::string> sensitive_apis{"memcpy", "memmove", "strcpy", "strcat", "sprintf", "alloca"};
};

/// Callee name of a call expression's code, or empty.
std::string callee_name(std::string_view call_code);
/// Top-level operator of a binary expression's code, e.g. "*" for
/// `(a+b)*c`; empty when none is found.
std::string binary_operator(std::string_view code);

/// Syntactic sink candidates in node-id order. API names match
/// case-insensitively. Arithmetic fires on +,-,*,/,%,<<,>> operations inside
/// a call argument or an array index.
std::vector<SinkRuleHit> rule_based_sinks(const frontend::CodePropertyGraph& cpg, const RuleConfig& config = {});

/// Nearest statement at or above `node` in the AST, or -1.
int enclosing_statement(const frontend::CodePropertyGraph& cpg, int node);

/// Distinct enclosing statements of the hits, ascending.
std::vector<int> rule_sink_statements(const frontend::CodePropertyGraph& cpg, const std::vector<SinkRuleHit>& hits);

}  // namespace vulpath::baselines
