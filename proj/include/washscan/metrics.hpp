#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "washscan/cycle_detector.hpp"
#include "washscan/decimal.hpp"
#include "washscan/event_model.hpp"
#include "washscan/sequence_detector.hpp"
#include "washscan/types.hpp"

namespace washscan {

/// Deduplicated union of everything the detectors flagged. Sorted members
/// keep merges and serialization deterministic.
struct FlagSet {
  std::vector<std::string> addresses;    // sorted unique
  std::vector<std::string> sale_tx_ids;  // sorted unique
  std::vector<NftId> nfts;               // sorted unique
  Decimal usd_volume;                    // sum over deduplicated sale edges

  bool contains_tx(std::string_view tx) const {
    return std::binary_search(sale_tx_ids.begin(), sale_tx_ids.end(), tx);
  }
};

inline FlagSet flag_union(const std::vector<CycleFinding>& cycles,
                          const std::vector<SequenceFinding>& sequences) {
  FlagSet fs;
  std::map<std::string, Decimal> sale_edges;  // tx -> weight, dedup across findings
  auto absorb = [&](const NftId& nft, const std::vector<Edge>& edges,
                    const std::vector<std::string>& addrs) {
    fs.nfts.push_back(nft);
    fs.addresses.insert(fs.addresses.end(), addrs.begin(), addrs.end());
    for (const auto& e : edges) {
      if (e.kind == EventKind::Sale) sale_edges.emplace(e.tx_id, e.usd_weight);
    }
  };
  for (const auto& c : cycles) absorb(c.nft, c.edges, c.addresses);
  for (const auto& s : sequences) absorb(s.nft, s.edges, s.addresses);
  std::sort(fs.addresses.begin(), fs.addresses.end());
  fs.addresses.erase(std::unique(fs.addresses.begin(), fs.addresses.end()), fs.addresses.end());
  std::sort(fs.nfts.begin(), fs.nfts.end());
  fs.nfts.erase(std::unique(fs.nfts.begin(), fs.nfts.end()), fs.nfts.end());
  fs.sale_tx_ids.reserve(sale_edges.size());
  for (const auto& [tx, w] : sale_edges) {
    fs.sale_tx_ids.push_back(tx);
    fs.usd_volume = fs.usd_volume + w;
  }
  return fs;
}

/// Denominators for the overview shares. Addresses and NFTs cover all
/// events so every flaggable participant is inside the denominator;
/// transaction and volume counters cover sales only (transfers carry no
/// price). The rendered report labels each basis.
struct DatasetTotals {
  std::uint64_t addresses = 0;
  std::uint64_t sale_transactions = 0;
  std::uint64_t nfts = 0;
  Decimal usd_volume;
};

inline DatasetTotals dataset_totals(const std::vector<TradeEvent>& events) {
  DatasetTotals t;
  std::vector<std::string> addrs;
  std::vector<NftId> nfts;
  addrs.reserve(events.size() * 2);
  nfts.reserve(events.size());
  for (const auto& ev : events) {
    addrs.push_back(ev.from);
    addrs.push_back(ev.to);
    nfts.push_back(ev.nft);
    if (ev.kind == EventKind::Sale) {
      ++t.sale_transactions;
      t.usd_volume = t.usd_volume + ev.usd_price.value_or(Decimal{});
    }
  }
  std::sort(addrs.begin(), addrs.end());
  t.addresses = static_cast<std::uint64_t>(
      std::unique(addrs.begin(), addrs.end()) - addrs.begin());
  std::sort(nfts.begin(), nfts.end());
  t.nfts = static_cast<std::uint64_t>(std::unique(nfts.begin(), nfts.end()) - nfts.begin());
  return t;
}

struct ShareLine {
  std::uint64_t flagged = 0;
  std::uint64_t total = 0;
  Decimal share_pct;  // 100*flagged/total, half-up, 2 decimals

  bool operator==(const ShareLine&) const = default;
};

struct VolumeLine {
  Decimal flagged;
  Decimal total;
  Decimal share_pct;

  bool operator==(const VolumeLine&) const = default;
};

struct TotalsSection {
  ShareLine addresses;
  ShareLine transactions;
  ShareLine nfts;
  VolumeLine volume;
  std::vector<std::string> warnings;  // zero-denominator notes

  bool operator==(const TotalsSection&) const = default;
};

inline TotalsSection summarize(const FlagSet& flags, const DatasetTotals& totals) {
  TotalsSection s;
  auto count_line = [&](std::uint64_t f, std::uint64_t t, const char* name) {
    ShareLine line{f, t, Decimal{}};
    if (t == 0) {
      s.warnings.push_back(std::string(name) + ": zero denominator, share reported as 0");
    } else {
      line.share_pct = Decimal::percent_of_counts(f, t);
    }
    return line;
  };
  s.addresses = count_line(flags.addresses.size(), totals.addresses, "addresses");
  s.transactions =
      count_line(flags.sale_tx_ids.size(), totals.sale_transactions, "transactions");
  s.nfts = count_line(flags.nfts.size(), totals.nfts, "nfts");
  s.volume.flagged = flags.usd_volume;
  s.volume.total = totals.usd_volume;
  if (totals.usd_volume.is_zero()) {
    s.warnings.push_back("volume: zero denominator, share reported as 0");
  } else {
    s.volume.share_pct = Decimal::percent(flags.usd_volume, totals.usd_volume);
  }
  return s;
}

/// Flagged sale transactions split into cyclic and sequential, cycles
/// taking precedence for edges flagged by both, so the two counts
/// partition the flagged set.
struct FlagSplit {
  std::uint64_t cyclic_tx = 0;
  std::uint64_t sequential_tx = 0;

  bool operator==(const FlagSplit&) const = default;
};

inline FlagSplit cyclic_sequential_split(const std::vector<CycleFinding>& cycles,
                                         const std::vector<SequenceFinding>& sequences) {
  std::vector<std::string> cyc;
  for (const auto& c : cycles) {
    for (const auto& e : c.edges) {
      if (e.kind == EventKind::Sale) cyc.push_back(e.tx_id);
    }
  }
  std::sort(cyc.begin(), cyc.end());
  cyc.erase(std::unique(cyc.begin(), cyc.end()), cyc.end());
  std::vector<std::string> seq;
  for (const auto& q : sequences) {
    for (const auto& e : q.edges) {
      if (!std::binary_search(cyc.begin(), cyc.end(), e.tx_id)) seq.push_back(e.tx_id);
    }
  }
  std::sort(seq.begin(), seq.end());
  seq.erase(std::unique(seq.begin(), seq.end()), seq.end());
  return {cyc.size(), seq.size()};
}

/// Indexed by CycleClass in declaration order.
struct CycleClassDist {
  std::uint64_t counts[4] = {0, 0, 0, 0};
  double fractions[4] = {0, 0, 0, 0};
  std::uint64_t total = 0;

  bool operator==(const CycleClassDist&) const = default;
};

inline CycleClassDist cycle_length_distribution(const std::vector<CycleFinding>& cycles) {
  CycleClassDist d;
  for (const auto& c : cycles) ++d.counts[static_cast<int>(classify_cycle(c))];
  d.total = cycles.size();
  if (d.total > 0) {
    for (int i = 0; i < 4; ++i) {
      d.fractions[i] = static_cast<double>(d.counts[i]) / static_cast<double>(d.total);
    }
  }
  return d;
}

/// Elapsed-time buckets for cycles: under a day, then left-closed day
/// ranges, 30 days and beyond last.
struct ElapsedBuckets {
  std::uint64_t counts[4] = {0, 0, 0, 0};  // <1d, [1d,7d), [7d,30d), >=30d
  double fractions[4] = {0, 0, 0, 0};
  double cumulative_lt_30d = 0;
  std::uint64_t total = 0;

  bool operator==(const ElapsedBuckets&) const = default;
};

inline ElapsedBuckets elapsed_buckets(const std::vector<CycleFinding>& cycles) {
  ElapsedBuckets b;
  constexpr std::int64_t kDay = 86400;
  for (const auto& c : cycles) {
    const std::int64_t el = c.end_ts - c.start_ts;
    int bin = el < kDay ? 0 : el < 7 * kDay ? 1 : el < 30 * kDay ? 2 : 3;
    ++b.counts[bin];
  }
  b.total = cycles.size();
  if (b.total > 0) {
    for (int i = 0; i < 4; ++i) {
      b.fractions[i] = static_cast<double>(b.counts[i]) / static_cast<double>(b.total);
    }
    b.cumulative_lt_30d =
        static_cast<double>(b.counts[0] + b.counts[1] + b.counts[2]) / static_cast<double>(b.total);
  }
  return b;
}

/// Lower median of elapsed seconds per cycle length; lengths with no
/// cycles are absent.
inline std::map<std::size_t, std::int64_t> median_duration_by_length(
    const std::vector<CycleFinding>& cycles) {
  std::map<std::size_t, std::vector<std::int64_t>> grouped;
  for (const auto& c : cycles) grouped[c.length()].push_back(c.end_ts - c.start_ts);
  std::map<std::size_t, std::int64_t> out;
  for (auto& [len, els] : grouped) {
    std::sort(els.begin(), els.end());
    out[len] = els[(els.size() - 1) / 2];
  }
  return out;
}

/// Mean of (next organic price / flagged price - 1) over flagged sales
/// that have a later unflagged sale of the same NFT; the pairing uses the
/// earliest such sale in (timestamp, tx_id) order. Absent when no pair
/// qualifies. Zero-priced flagged sales cannot anchor a ratio and are
/// skipped.
inline std::optional<double> price_impact(const FlagSet& flags,
                                          const std::vector<TradeEvent>& events) {
  std::map<NftId, std::vector<const TradeEvent*>> sales;
  for (const auto& ev : events) {
    if (ev.kind == EventKind::Sale) sales[ev.nft].push_back(&ev);
  }
  double sum = 0;
  std::size_t n = 0;
  std::vector<std::size_t> next_organic;
  for (auto& [nft, evs] : sales) {
    std::sort(evs.begin(), evs.end(), [](const TradeEvent* a, const TradeEvent* b) {
      return event_order_less(*a, *b);
    });
    const std::size_t len = evs.size();
    next_organic.assign(len, len);
    std::size_t carry = len;
    for (std::size_t i = len; i-- > 0;) {
      next_organic[i] = carry;
      if (!flags.contains_tx(evs[i]->tx_id)) carry = i;
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (!flags.contains_tx(evs[i]->tx_id)) continue;
      if (next_organic[i] == len) continue;
      const Decimal flagged = evs[i]->usd_price.value_or(Decimal{});
      const Decimal organic = evs[next_organic[i]]->usd_price.value_or(Decimal{});
      if (!flagged.is_positive()) continue;
      sum += organic.to_double() / flagged.to_double() - 1.0;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

/// Histogram of flagged sales over normalized collection lifetime, ten
/// equal bins; a collection whose events share one timestamp lands in
/// bin 0.
struct LifetimeProfile {
  std::uint64_t bins[10] = {0};
  double fractions[10] = {0};
  std::uint64_t total = 0;

  bool operator==(const LifetimeProfile&) const = default;
};

inline LifetimeProfile lifetime_profile(const FlagSet& flags,
                                        const std::vector<TradeEvent>& events) {
  struct Span {
    std::int64_t first, last;
  };
  std::unordered_map<std::string, Span> spans;
  for (const auto& ev : events) {
    auto [it, fresh] = spans.try_emplace(ev.collection, Span{ev.timestamp, ev.timestamp});
    if (!fresh) {
      it->second.first = std::min(it->second.first, ev.timestamp);
      it->second.last = std::max(it->second.last, ev.timestamp);
    }
  }
  LifetimeProfile p;
  for (const auto& ev : events) {
    if (ev.kind != EventKind::Sale || !flags.contains_tx(ev.tx_id)) continue;
    const Span s = spans.at(ev.collection);
    std::int64_t bin = 0;
    if (s.last > s.first) {
      bin = std::min<std::int64_t>(9, (ev.timestamp - s.first) * 10 / (s.last - s.first));
    }
    ++p.bins[bin];
    ++p.total;
  }
  if (p.total > 0) {
    for (int i = 0; i < 10; ++i) {
      p.fractions[i] = static_cast<double>(p.bins[i]) / static_cast<double>(p.total);
    }
  }
  return p;
}

struct AddressActivity {
  std::string address;
  std::uint64_t trade_count = 0;       // sales as buyer or seller; self-sale once
  std::uint64_t unique_partners = 0;   // distinct counterparties over sales
  std::uint64_t flagged_trade_count = 0;

  bool operator==(const AddressActivity&) const = default;
};

inline std::vector<AddressActivity> partner_stats(const std::vector<TradeEvent>& events,
                                                  const FlagSet& flags) {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<AddressActivity> acts;
  auto id_of = [&](const std::string& a) {
    auto [it, fresh] = ids.try_emplace(a, acts.size());
    if (fresh) acts.push_back({a, 0, 0, 0});
    return it->second;
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& ev : events) {
    if (ev.kind != EventKind::Sale) continue;
    const std::size_t f = id_of(ev.from);
    const std::size_t t = id_of(ev.to);
    const bool flagged = flags.contains_tx(ev.tx_id);
    ++acts[f].trade_count;
    if (flagged) ++acts[f].flagged_trade_count;
    pairs.emplace_back(f, t);
    if (f != t) {
      ++acts[t].trade_count;
      if (flagged) ++acts[t].flagged_trade_count;
      pairs.emplace_back(t, f);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  for (const auto& [a, b] : pairs) ++acts[a].unique_partners;
  std::sort(acts.begin(), acts.end(),
            [](const AddressActivity& x, const AddressActivity& y) { return x.address < y.address; });
  return acts;
}

struct CollectionStats {
  std::string collection;
  Decimal share_addresses;     // (A)
  Decimal share_transactions;  // (B)
  Decimal flagged_usd;         // (C1)
  Decimal share_volume;        // (C2)
  Decimal share_nfts;          // (D)

  bool operator==(const CollectionStats&) const = default;
};

/// Per-collection mirror of the overview shares. An NFT belongs to the
/// collection named by its first event; flagged items attribute to the
/// collection of the finding's NFT, so flagged volumes partition exactly
/// across collections.
inline std::vector<CollectionStats> per_collection(const std::vector<CycleFinding>& cycles,
                                                   const std::vector<SequenceFinding>& sequences,
                                                   const std::vector<TradeEvent>& events) {
  std::map<NftId, std::string> coll_of;  // first event wins; events come sorted
  for (const auto& ev : events) coll_of.try_emplace(ev.nft, ev.collection);

  struct Agg {
    std::vector<std::string> addrs;  // later sorted/uniqued
    std::vector<NftId> nfts;
    std::uint64_t sale_tx = 0;
    Decimal usd;
    std::vector<std::string> flag_addrs;
    std::vector<NftId> flag_nfts;
    std::map<std::string, Decimal> flag_sales;  // tx -> weight
  };
  std::map<std::string, Agg> by_coll;

  for (const auto& ev : events) {
    Agg& a = by_coll[coll_of.at(ev.nft)];
    a.addrs.push_back(ev.from);
    a.addrs.push_back(ev.to);
    a.nfts.push_back(ev.nft);
    if (ev.kind == EventKind::Sale) {
      ++a.sale_tx;
      a.usd = a.usd + ev.usd_price.value_or(Decimal{});
    }
  }
  auto absorb = [&](const NftId& nft, const std::vector<Edge>& edges,
                    const std::vector<std::string>& addrs) {
    Agg& a = by_coll[coll_of.at(nft)];
    a.flag_nfts.push_back(nft);
    a.flag_addrs.insert(a.flag_addrs.end(), addrs.begin(), addrs.end());
    for (const auto& e : edges) {
      if (e.kind == EventKind::Sale) a.flag_sales.emplace(e.tx_id, e.usd_weight);
    }
  };
  for (const auto& c : cycles) absorb(c.nft, c.edges, c.addresses);
  for (const auto& s : sequences) absorb(s.nft, s.edges, s.addresses);

  std::vector<CollectionStats> out;
  out.reserve(by_coll.size());
  auto uniq = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return static_cast<std::uint64_t>(v.size());
  };
  for (auto& [name, a] : by_coll) {
    CollectionStats cs;
    cs.collection = name;
    const std::uint64_t total_addrs = uniq(a.addrs);
    const std::uint64_t total_nfts = uniq(a.nfts);
    const std::uint64_t flag_addrs = uniq(a.flag_addrs);
    const std::uint64_t flag_nfts = uniq(a.flag_nfts);
    for (const auto& [tx, w] : a.flag_sales) cs.flagged_usd = cs.flagged_usd + w;
    if (total_addrs > 0) cs.share_addresses = Decimal::percent_of_counts(flag_addrs, total_addrs);
    if (a.sale_tx > 0) {
      cs.share_transactions = Decimal::percent_of_counts(a.flag_sales.size(), a.sale_tx);
    }
    if (!a.usd.is_zero()) cs.share_volume = Decimal::percent(cs.flagged_usd, a.usd);
    if (total_nfts > 0) cs.share_nfts = Decimal::percent_of_counts(flag_nfts, total_nfts);
    out.push_back(std::move(cs));
  }
  return out;
}

struct MarketReport {
  TotalsSection totals;
  FlagSplit split;
  CycleClassDist cycle_classes;
  ElapsedBuckets buckets;
  std::map<std::size_t, std::int64_t> median_by_length;
  std::optional<double> price_impact_mean;
  LifetimeProfile lifetime;
  std::vector<CollectionStats> collections;
  std::vector<AddressActivity> partners;

  bool operator==(const MarketReport&) const = default;
};

inline MarketReport build_report(const std::vector<CycleFinding>& cycles,
                                 const std::vector<SequenceFinding>& sequences,
                                 const std::vector<TradeEvent>& events) {
  MarketReport r;
  const FlagSet flags = flag_union(cycles, sequences);
  r.totals = summarize(flags, dataset_totals(events));
  r.split = cyclic_sequential_split(cycles, sequences);
  r.cycle_classes = cycle_length_distribution(cycles);
  r.buckets = elapsed_buckets(cycles);
  r.median_by_length = median_duration_by_length(cycles);
  r.price_impact_mean = price_impact(flags, events);
  r.lifetime = lifetime_profile(flags, events);
  r.collections = per_collection(cycles, sequences, events);
  r.partners = partner_stats(events, flags);
  return r;
}

}  // namespace washscan
