#pragma once

// Successive shortest paths with Bellman-Ford, enough for graphs with a few
// dozen nodes. Negative arc costs are fine as long as the initial graph has
// no negative cycle.

#include <cstdint>
#include <limits>
#include <vector>

namespace recount::detail {

class MinCostFlow {
 public:
  explicit MinCostFlow(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t capacity,
                      std::int64_t cost) {
    adjacency_[from].push_back(arcs_.size());
    arcs_.push_back({to, capacity, cost});
    adjacency_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0, -cost});
    return arcs_.size() - 2;
  }

  struct Result {
    std::int64_t flow = 0;
    std::int64_t cost = 0;
  };

  // Pushes up to `limit` units from source to sink at minimum cost.
  Result solve(std::size_t source, std::size_t sink, std::int64_t limit) {
    constexpr auto kInf = std::numeric_limits<std::int64_t>::max();
    Result result;
    const std::size_t n = adjacency_.size();
    while (result.flow < limit) {
      std::vector<std::int64_t> dist(n, kInf);
      std::vector<std::size_t> via(n, arcs_.size());
      dist[source] = 0;
      for (std::size_t round = 0; round + 1 < n; ++round) {
        bool changed = false;
        for (std::size_t u = 0; u < n; ++u) {
          if (dist[u] == kInf) continue;
          for (std::size_t id : adjacency_[u]) {
            const Arc& a = arcs_[id];
            if (a.capacity > 0 && dist[u] + a.cost < dist[a.to]) {
              dist[a.to] = dist[u] + a.cost;
              via[a.to] = id;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (dist[sink] == kInf) break;
      std::int64_t push = limit - result.flow;
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        push = std::min(push, arcs_[via[v]].capacity);
      }
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].capacity -= push;
        arcs_[via[v] ^ 1].capacity += push;
      }
      result.flow += push;
      result.cost += push * dist[sink];
    }
    return result;
  }

  // Flow currently on a forward arc returned by add_arc.
  std::int64_t flow(std::size_t arc) const { return arcs_[arc ^ 1].capacity; }

 private:
  struct Arc {
    std::size_t to;
    std::int64_t capacity;
    std::int64_t cost;
  };

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Arc> arcs_;
};

}  // namespace recount::detail
