#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "washscan/config.hpp"
#include "washscan/decimal.hpp"
#include "washscan/graph_builder.hpp"
#include "washscan/types.hpp"

namespace washscan {

enum class CycleClass { SelfLoop, TwoTx, ThreeTx, MoreThanThree };

inline const char* to_string(CycleClass c) {
  switch (c) {
    case CycleClass::SelfLoop: return "self_loop";
    case CycleClass::TwoTx: return "two_tx";
    case CycleClass::ThreeTx: return "three_tx";
    case CycleClass::MoreThanThree: return "more_than_three";
  }
  return "?";
}

struct CycleFinding {
  NftId nft;
  std::vector<Edge> edges;             // walk order, strictly increasing ts
  std::vector<std::string> addresses;  // from of each edge; pairwise distinct
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  std::size_t sale_count = 0;
  Decimal usd_volume;  // sum of Sale edge weights

  std::size_t length() const { return edges.size(); }
};

inline CycleClass classify_cycle(const CycleFinding& f) {
  switch (f.length()) {
    case 1: return CycleClass::SelfLoop;
    case 2: return CycleClass::TwoTx;
    case 3: return CycleClass::ThreeTx;
    default: return CycleClass::MoreThanThree;
  }
}

struct CycleSearchStats {
  // closing-edge searches where the length bound cut off an otherwise
  // admissible continuation; nonzero means longer cycles may exist
  std::size_t truncated_searches = 0;
};

namespace cycle_detail {

struct Candidate {
  std::vector<std::size_t> path;  // edge indices, walk order, closing edge excluded
  bool valid = false;
};

// Candidate order within one closing edge and one start-ts group:
// fewer edges first, then lexicographically smaller tx sequence.
inline bool candidate_better(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                             const std::vector<Edge>& edges) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string& ta = edges[a[i]].tx_id;
    const std::string& tb = edges[b[i]].tx_id;
    if (ta != tb) return ta < tb;
  }
  return false;
}

struct Searcher {
  const std::vector<Edge>& edges;
  const std::vector<std::string>& nodes;  // sorted
  std::size_t max_path_len;               // cycle length bound minus the closing edge
  std::vector<std::vector<std::size_t>> out;  // node id -> edge indices, ascending
  std::vector<char> alive;
  std::vector<char> on_path;  // node id -> visited flag during one search
  bool truncated = false;

  Searcher(const NftGraph& g, std::size_t max_cycle_len)
      : edges(g.edges), nodes(g.nodes), max_path_len(max_cycle_len - 1) {
    out.resize(nodes.size());
    alive.assign(edges.size(), 1);
    on_path.assign(nodes.size(), 0);
    for (std::size_t i = 0; i < edges.size(); ++i) out[node_id(edges[i].from)].push_back(i);
  }

  std::size_t node_id(const std::string& a) const {
    return static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), a) - nodes.begin());
  }

  // All walk constraints for extending a partial path with edge j, except
  // the endpoint rule, which the caller handles.
  bool admissible(std::size_t j, std::int64_t after_ts, std::int64_t before_ts) const {
    return alive[j] && edges[j].timestamp > after_ts && edges[j].timestamp < before_ts;
  }

  void dfs(std::size_t u, std::int64_t last_ts, const Edge& closing, std::size_t target,
           std::size_t sales_on_path, std::vector<std::size_t>& path, Candidate& best) {
    for (std::size_t j : out[u]) {
      if (!admissible(j, last_ts, closing.timestamp)) continue;
      const Edge& g = edges[j];
      const std::size_t v = node_id(g.to);
      const std::size_t sales = sales_on_path + (g.kind == EventKind::Sale ? 1 : 0);
      if (path.size() + 1 > max_path_len) {
        // even a terminal hop would exceed the cycle length bound
        truncated = true;
        continue;
      }
      if (v == target) {
        if (sales + (closing.kind == EventKind::Sale ? 1 : 0) == 0) continue;
        path.push_back(j);
        if (!best.valid || candidate_better(path, best.path, edges)) {
          best.path = path;
          best.valid = true;
        }
        path.pop_back();
        continue;
      }
      if (on_path[v]) continue;
      path.push_back(j);
      on_path[v] = 1;
      dfs(v, g.timestamp, closing, target, sales, path, best);
      on_path[v] = 0;
      path.pop_back();
    }
  }

  // Best cycle closing at edge ci under the extraction discipline: latest
  // start timestamp wins, then fewest edges, then smallest tx sequence.
  Candidate close(std::size_t ci) {
    Candidate best;
    const Edge& e = edges[ci];
    const std::size_t src = node_id(e.to);
    const std::size_t target = node_id(e.from);

    // starts: alive out-edges of e.to strictly before e; indices ascend by
    // (ts, tx) so the eligible range is a prefix
    const auto& adj = out[src];
    auto end = std::lower_bound(adj.begin(), adj.end(), e.timestamp,
                                [&](std::size_t j, std::int64_t ts) { return edges[j].timestamp < ts; });
    std::vector<std::size_t> starts;
    for (auto it = adj.begin(); it != end; ++it) {
      if (alive[*it] && edges[*it].to != e.to) starts.push_back(*it);
    }
    if (starts.empty()) return best;

    // group by start timestamp, latest group first; the first group that
    // completes any cycle decides
    std::stable_sort(starts.begin(), starts.end(), [&](std::size_t a, std::size_t b) {
      return edges[a].timestamp > edges[b].timestamp;
    });
    std::vector<std::size_t> path;
    for (std::size_t gi = 0; gi < starts.size();) {
      const std::int64_t group_ts = edges[starts[gi]].timestamp;
      for (; gi < starts.size() && edges[starts[gi]].timestamp == group_ts; ++gi) {
        const std::size_t f1 = starts[gi];
        if (max_path_len == 0) {
          truncated = true;
          continue;
        }
        const Edge& first = edges[f1];
        const std::size_t sales = first.kind == EventKind::Sale ? 1 : 0;
        if (node_id(first.to) == target) {
          if (sales + (e.kind == EventKind::Sale ? 1 : 0) > 0) {
            path.assign(1, f1);
            if (!best.valid || candidate_better(path, best.path, edges)) {
              best.path = path;
              best.valid = true;
            }
          }
          continue;
        }
        path.clear();
        path.push_back(f1);
        on_path[src] = 1;
        on_path[node_id(first.to)] = 1;
        dfs(node_id(first.to), first.timestamp, e, target, sales, path, best);
        on_path[node_id(first.to)] = 0;
        on_path[src] = 0;
      }
      if (best.valid) break;
    }
    return best;
  }
};

inline CycleFinding make_finding(const NftGraph& g, const std::vector<std::size_t>& path,
                                 std::size_t closing) {
  CycleFinding f;
  f.nft = g.nft;
  f.edges.reserve(path.size() + 1);
  for (std::size_t j : path) f.edges.push_back(g.edges[j]);
  f.edges.push_back(g.edges[closing]);
  f.start_ts = f.edges.front().timestamp;
  f.end_ts = f.edges.back().timestamp;
  for (const auto& e : f.edges) {
    f.addresses.push_back(e.from);
    if (e.kind == EventKind::Sale) {
      ++f.sale_count;
      f.usd_volume = f.usd_volume + e.usd_weight;
    }
  }
  return f;
}

}  // namespace cycle_detail

/// Edge-disjoint temporal cycle extraction. Edges are scanned in
/// (timestamp, tx_id) order as candidate closing edges; when one closes a
/// cycle, the best cycle there is emitted and its edges leave the graph,
/// so overlapping activity splits into sub-cycles distinct by time instead
/// of one tangled walk. Removal never makes an earlier edge closable, so a
/// single forward scan is complete.
inline std::vector<CycleFinding> find_cycles(const NftGraph& g, const DetectorConfig& cfg,
                                             CycleSearchStats* stats = nullptr) {
  std::vector<CycleFinding> findings;
  if (g.edges.empty()) return findings;
  cycle_detail::Searcher s(g, static_cast<std::size_t>(cfg.max_cycle_len));

  for (std::size_t ci = 0; ci < g.edges.size(); ++ci) {
    if (!s.alive[ci]) continue;
    const Edge& e = g.edges[ci];
    if (e.from == e.to) {
      // self-loop; inside any longer walk it would repeat an address
      if (e.kind == EventKind::Sale) {
        findings.push_back(cycle_detail::make_finding(g, {}, ci));
        s.alive[ci] = 0;
      }
      continue;
    }
    s.truncated = false;
    auto best = s.close(ci);
    if (stats && s.truncated) ++stats->truncated_searches;
    if (!best.valid) continue;
    findings.push_back(cycle_detail::make_finding(g, best.path, ci));
    for (std::size_t j : best.path) s.alive[j] = 0;
    s.alive[ci] = 0;
  }
  return findings;
}

}  // namespace washscan
