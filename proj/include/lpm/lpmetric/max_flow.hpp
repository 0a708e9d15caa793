#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace lpm {

/// Dinic max-flow over real capacities. Residuals at or below `zero_tol` are
/// treated as saturated.
template <typename Cap = double>
class FlowGraph {
 public:
  struct Edge {
    int to;
    Cap cap;
  };

  explicit FlowGraph(int n, Cap zero_tol = Cap(1e-15)) : graph_(n), level_(n), next_(n), zero_tol_(zero_tol) {}

  int add_edge(int from, int to, Cap cap) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, cap});
    graph_[from].push_back(id);
    edges_.push_back({from, Cap(0)});
    graph_[to].push_back(id + 1);
    return id;
  }

  Cap max_flow(int source, int sink) {
    Cap total = 0;
    while (bfs(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const Cap pushed = dfs(source, sink, std::numeric_limits<Cap>::infinity());
        if (!(pushed > zero_tol_)) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from `source` in the residual graph (the source side of a min cut).
  [[nodiscard]] std::vector<bool> source_side(int source) const {
    std::vector<bool> seen(graph_.size(), false);
    std::queue<int> q;
    q.push(source);
    seen[source] = true;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int id : graph_[v]) {
        const Edge& e = edges_[id];
        if (e.cap > zero_tol_ && !seen[e.to]) {
          seen[e.to] = true;
          q.push(e.to);
        }
      }
    }
    return seen;
  }

 private:
  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    q.push(source);
    level_[source] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int id : graph_[v]) {
        const Edge& e = edges_[id];
        if (e.cap > zero_tol_ && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  Cap dfs(int v, int sink, Cap limit) {
    if (v == sink) return limit;
    for (int& i = next_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
      const int id = graph_[v][i];
      Edge& e = edges_[id];
      if (e.cap > zero_tol_ && level_[e.to] == level_[v] + 1) {
        const Cap pushed = dfs(e.to, sink, std::min(limit, e.cap));
        if (pushed > zero_tol_) {
          e.cap -= pushed;
          edges_[id ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> graph_;
  std::vector<int> level_;
  std::vector<int> next_;
  Cap zero_tol_;
};

}  // namespace lpm
