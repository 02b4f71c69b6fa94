#include <algorithm>
#include <random>

#include "vulpath/features/embedding.hpp"

namespace vulpath::features {

std::vector<Walk> generate_walks(const frontend::CodePropertyGraph& cpg, int walks_per_node, int walk_len,
                                 std::uint64_t seed) {
  const std::size_t n = cpg.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : cpg.edges) {
    if (e.src == e.dst) continue;
    const std::size_t a = cpg.index_of(e.src), b = cpg.index_of(e.dst);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  std::vector<std::vector<std::string>> tokens(n);
  for (std::size_t i = 0; i < n; ++i) tokens[i] = tokenize_node(cpg.nodes[i]);

  std::vector<Walk> walks;
  walks.reserve(n * static_cast<std::size_t>(std::max(walks_per_node, 0)));
  for (std::size_t start = 0; start < n; ++start) {
    for (int w = 0; w < walks_per_node; ++w) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(w)};
      std::mt19937_64 rng(seq);
      Walk walk;
      std::size_t cur = start;
      for (int step = 0; step < walk_len; ++step) {
        walk.insert(walk.end(), tokens[cur].begin(), tokens[cur].end());
        if (!adj[cur].empty())
          cur = adj[cur][std::uniform_int_distribution<std::size_t>(0, adj[cur].size() - 1)(rng)];
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

}  // namespace vulpath::features
