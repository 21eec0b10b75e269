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

struct SequenceFinding {
  NftId nft;
  std::vector<Edge> edges;             // Sale edges, simple path, strictly increasing ts
  std::vector<std::string> addresses;  // from of first edge, then to of each edge
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  Decimal initial_usd;
  Decimal max_deviation_fraction;  // worst |p_i - p_0| / p_0 along the path
  Decimal usd_volume;

  std::size_t length() const { return edges.size(); }
};

namespace seq_detail {

struct Walker {
  const NftGraph& g;
  const DetectorConfig& cfg;
  std::vector<SequenceFinding>& out;
  std::vector<std::vector<std::size_t>> sale_out;  // node id -> sale edge indices, ascending
  std::vector<std::int64_t> transfer_ts;           // sorted
  std::vector<char> on_path;
  std::vector<std::size_t> path;
  Decimal p0;

  Walker(const NftGraph& graph, const DetectorConfig& config, std::vector<SequenceFinding>& sink)
      : g(graph), cfg(config), out(sink) {
    sale_out.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      if (g.edges[i].kind == EventKind::Sale) {
        sale_out[node_id(g.edges[i].from)].push_back(i);
      } else {
        transfer_ts.push_back(g.edges[i].timestamp);
      }
    }
    std::sort(transfer_ts.begin(), transfer_ts.end());
    on_path.assign(g.nodes.size(), 0);
  }

  std::size_t node_id(const std::string& a) const {
    return static_cast<std::size_t>(
        std::lower_bound(g.nodes.begin(), g.nodes.end(), a) - g.nodes.begin());
  }

  bool transfer_between(std::int64_t lo, std::int64_t hi) const {
    // any transfer strictly inside (lo, hi)
    auto it = std::upper_bound(transfer_ts.begin(), transfer_ts.end(), lo);
    return it != transfer_ts.end() && *it < hi;
  }

  bool within_deviation(const Decimal& price) const {
    // |price - p0| <= max_price_deviation * p0, exact at the boundary
    return compare_abs_products(price - p0, Decimal::from_int(1), cfg.max_price_deviation, p0) <= 0;
  }

  // A one-edge extension of the current path keeps it qualifying iff all
  // of these hold; the same predicate drives both recursion and the
  // maximality decision.
  bool extends(std::size_t j, const Edge& last, std::int64_t root_ts) const {
    const Edge& e = g.edges[j];
    return e.timestamp > last.timestamp && e.timestamp - root_ts < cfg.velocity_window_seconds &&
           !on_path[node_id(e.to)] && within_deviation(e.usd_weight) &&
           !transfer_between(last.timestamp, e.timestamp);
  }

  void emit() {
    SequenceFinding f;
    f.nft = g.nft;
    f.edges.reserve(path.size());
    Decimal maxdiff;
    for (std::size_t j : path) {
      const Edge& e = g.edges[j];
      f.edges.push_back(e);
      f.usd_volume = f.usd_volume + e.usd_weight;
      Decimal diff = (e.usd_weight - p0).abs();
      if (maxdiff < diff) maxdiff = diff;
    }
    f.addresses.push_back(f.edges.front().from);
    for (const auto& e : f.edges) f.addresses.push_back(e.to);
    f.start_ts = f.edges.front().timestamp;
    f.end_ts = f.edges.back().timestamp;
    f.initial_usd = p0;
    f.max_deviation_fraction = p0.is_zero() ? Decimal{} : Decimal::ratio(maxdiff, p0, 8);
    out.push_back(std::move(f));
  }

  void grow(std::int64_t root_ts) {
    const Edge& last = g.edges[path.back()];
    bool extended = false;
    for (std::size_t j : sale_out[node_id(last.to)]) {
      if (!extends(j, last, root_ts)) continue;
      extended = true;
      path.push_back(j);
      on_path[node_id(g.edges[j].to)] = 1;
      grow(root_ts);
      on_path[node_id(g.edges[j].to)] = 0;
      path.pop_back();
    }
    if (!extended && path.size() >= static_cast<std::size_t>(cfg.min_sequence_len)) emit();
  }

  void run() {
    for (std::size_t r = 0; r < g.edges.size(); ++r) {
      const Edge& e = g.edges[r];
      if (e.kind != EventKind::Sale || e.from == e.to) continue;
      p0 = e.usd_weight;
      path.assign(1, r);
      on_path[node_id(e.from)] = 1;
      on_path[node_id(e.to)] = 1;
      grow(e.timestamp);
      on_path[node_id(e.from)] = 0;
      on_path[node_id(e.to)] = 0;
    }
  }
};

}  // namespace seq_detail

/// Rapid low-risk sale paths: simple paths of Sale edges with strictly
/// increasing timestamps, every price within max_price_deviation of the
/// first, total elapsed strictly under the velocity window, and no
/// transfer of the NFT interposed between consecutive sales. Only paths
/// with no qualifying one-edge extension are reported, so a reported path
/// is never a prefix of another.
inline std::vector<SequenceFinding> find_sequences(const NftGraph& g, const DetectorConfig& cfg) {
  std::vector<SequenceFinding> out;
  if (g.edges.empty()) return out;
  seq_detail::Walker w(g, cfg, out);
  w.run();
  return out;
}

}  // namespace washscan
