#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "washscan/decimal.hpp"
#include "washscan/types.hpp"

namespace washscan {

struct Edge {
  std::string tx_id;
  std::string from;
  std::string to;
  std::int64_t timestamp = 0;
  EventKind kind = EventKind::Sale;
  Decimal usd_weight;  // 0 for transfers
};

inline bool edge_order_less(const Edge& a, const Edge& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.tx_id < b.tx_id;
}

struct NftGraph {
  NftId nft;
  std::vector<std::string> nodes;  // sorted, unique
  std::vector<Edge> edges;         // sorted by (timestamp, tx_id)
};

struct GraphSet {
  std::vector<NftGraph> graphs;  // sorted by nft
  std::uint64_t dataset_digest = 0;

  const NftGraph* find(const NftId& nft) const {
    auto it = std::lower_bound(graphs.begin(), graphs.end(), nft,
                               [](const NftGraph& g, const NftId& id) { return g.nft < id; });
    if (it == graphs.end() || !(it->nft == nft)) return nullptr;
    return &*it;
  }
};

inline std::uint64_t fnv1a_init() { return 14695981039346656037ull; }

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Order-insensitive digest of the event set: per-event FNV folded in with
/// xor, so two runs over the same rows agree regardless of arrival order.
inline std::uint64_t dataset_digest(const std::vector<TradeEvent>& events) {
  std::uint64_t acc = 0;
  for (const auto& ev : events) {
    std::uint64_t h = fnv1a_init();
    h = fnv1a(h, ev.nft.contract);
    h = fnv1a(h, "|");
    h = fnv1a(h, ev.nft.token);
    h = fnv1a(h, "|");
    h = fnv1a(h, to_string(ev.kind));
    h = fnv1a(h, "|");
    h = fnv1a(h, ev.tx_id);
    h = fnv1a(h, "|");
    h = fnv1a(h, std::to_string(ev.timestamp));
    h = fnv1a(h, "|");
    h = fnv1a(h, ev.from);
    h = fnv1a(h, "|");
    h = fnv1a(h, ev.to);
    h = fnv1a(h, "|");
    h = fnv1a(h, ev.usd_price ? ev.usd_price->to_string() : std::string{});
    acc ^= h;
  }
  return acc;
}

/// Group-by NftId over cleaned, enriched events. Every event lands in
/// exactly one graph; per-graph edges end up temporally sorted and the
/// node set is exactly the addresses on that graph's edges.
inline GraphSet build_graphs(const std::vector<TradeEvent>& events) {
  GraphSet set;
  set.dataset_digest = dataset_digest(events);

  std::unordered_map<NftId, std::size_t, NftIdHash> index;
  index.reserve(events.size());
  for (const auto& ev : events) {
    auto [it, inserted] = index.try_emplace(ev.nft, set.graphs.size());
    if (inserted) {
      set.graphs.emplace_back();
      set.graphs.back().nft = ev.nft;
    }
    NftGraph& g = set.graphs[it->second];
    g.edges.push_back({ev.tx_id, ev.from, ev.to, ev.timestamp, ev.kind,
                       ev.usd_price.value_or(Decimal{})});
  }
  for (auto& g : set.graphs) {
    std::sort(g.edges.begin(), g.edges.end(), edge_order_less);
    g.nodes.reserve(g.edges.size() * 2);
    for (const auto& e : g.edges) {
      g.nodes.push_back(e.from);
      g.nodes.push_back(e.to);
    }
    std::sort(g.nodes.begin(), g.nodes.end());
    g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
  }
  std::sort(set.graphs.begin(), set.graphs.end(),
            [](const NftGraph& a, const NftGraph& b) { return a.nft < b.nft; });
  return set;
}

/// Debug dump, one block per graph.
inline void dump_graphs(const GraphSet& set, std::ostream& out) {
  for (const auto& g : set.graphs) {
    out << "graph " << g.nft.str() << " nodes=" << g.nodes.size()
        << " edges=" << g.edges.size() << '\n';
    for (const auto& e : g.edges) {
      out << "  " << e.timestamp << ' ' << to_string(e.kind) << ' ' << e.from << "->" << e.to
          << " $" << e.usd_weight.to_string() << " tx=" << e.tx_id << '\n';
    }
  }
}

}  // namespace washscan
