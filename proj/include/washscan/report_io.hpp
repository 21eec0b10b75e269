#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "washscan/config.hpp"
#include "washscan/csv.hpp"
#include "washscan/cycle_detector.hpp"
#include "washscan/metrics.hpp"
#include "washscan/sequence_detector.hpp"
#include "washscan/types.hpp"

namespace washscan {

struct FindingsBundle {
  std::vector<CycleFinding> cycles;
  std::vector<SequenceFinding> sequences;
};

inline constexpr std::string_view kFindingsHeader =
    "type,nft,length,start_ts,end_ts,sale_count,initial_usd,max_deviation,usd_volume,"
    "tx_ids,addresses";
inline constexpr std::string_view kFindingEdgesHeader =
    "finding,seq,tx_id,kind,from,to,timestamp,usd_weight";

namespace io_detail {

inline std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ';';
    out += parts[i];
  }
  return out;
}

inline std::vector<std::string> tx_ids_of(const std::vector<Edge>& edges) {
  std::vector<std::string> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(e.tx_id);
  return out;
}

inline void write_edge_rows(std::ostream& out, std::size_t finding, const std::vector<Edge>& edges) {
  std::string buf;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    buf.clear();
    csv::append_row(buf, {std::to_string(finding), std::to_string(i), e.tx_id, to_string(e.kind),
                          e.from, e.to, std::to_string(e.timestamp), e.usd_weight.to_string()});
    out << buf;
  }
}

}  // namespace io_detail

/// Findings rows under kFindingsHeader, cycles before sequences; each row's
/// edges live in the companion file keyed by row index.
inline void write_findings(const FindingsBundle& b, std::ostream& rows, std::ostream& edges) {
  rows << kFindingsHeader << '\n';
  edges << kFindingEdgesHeader << '\n';
  std::string buf;
  std::size_t idx = 0;
  for (const auto& c : b.cycles) {
    buf.clear();
    csv::append_row(buf, {"cycle", c.nft.str(), std::to_string(c.length()),
                          std::to_string(c.start_ts), std::to_string(c.end_ts),
                          std::to_string(c.sale_count), "", "", c.usd_volume.to_string(),
                          io_detail::join(io_detail::tx_ids_of(c.edges)),
                          io_detail::join(c.addresses)});
    rows << buf;
    io_detail::write_edge_rows(edges, idx++, c.edges);
  }
  for (const auto& s : b.sequences) {
    buf.clear();
    csv::append_row(buf, {"sequence", s.nft.str(), std::to_string(s.length()),
                          std::to_string(s.start_ts), std::to_string(s.end_ts),
                          std::to_string(s.length()), s.initial_usd.to_string(),
                          s.max_deviation_fraction.to_string(), s.usd_volume.to_string(),
                          io_detail::join(io_detail::tx_ids_of(s.edges)),
                          io_detail::join(s.addresses)});
    rows << buf;
    io_detail::write_edge_rows(edges, idx++, s.edges);
  }
}

namespace io_detail {

struct RawFindingRow {
  std::string type;
  NftId nft;
  std::size_t length = 0;
  std::int64_t start_ts = 0, end_ts = 0;
  std::size_t sale_count = 0;
  Decimal initial_usd, max_deviation, usd_volume;
};

inline std::int64_t to_i64(const std::string& s, const char* what, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw DataError("findings line " + std::to_string(line) + ": bad " + what);
  }
  return v;
}

}  // namespace io_detail

/// Rebuilds findings from the two files. Malformed rows raise DataError;
/// stored summary columns that disagree with the edge rows raise
/// ValidationError, which is the tamper signal cmd_report relies on.
inline FindingsBundle read_findings(std::istream& rows_in, std::istream& edges_in) {
  using io_detail::RawFindingRow;
  using io_detail::to_i64;
  if (!rows_in) throw UsageError("findings: stream not readable");
  if (!edges_in) throw UsageError("finding edges: stream not readable");

  std::vector<RawFindingRow> raw;
  {
    std::string line;
    std::vector<std::string> f;
    std::size_t line_no = 0;
    while (std::getline(rows_in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1 && line == kFindingsHeader) continue;
      if (!csv::split(line, f) || f.size() != 11) {
        throw DataError("findings line " + std::to_string(line_no) + ": bad row");
      }
      RawFindingRow r;
      r.type = f[0];
      if (r.type != "cycle" && r.type != "sequence") {
        throw DataError("findings line " + std::to_string(line_no) + ": unknown type " + r.type);
      }
      auto colon = f[1].find(':');
      if (colon == std::string::npos) {
        throw DataError("findings line " + std::to_string(line_no) + ": bad nft");
      }
      auto nft = NftId::make(f[1].substr(0, colon), f[1].substr(colon + 1));
      if (!nft) throw DataError("findings line " + std::to_string(line_no) + ": bad nft");
      r.nft = *nft;
      r.length = static_cast<std::size_t>(to_i64(f[2], "length", line_no));
      r.start_ts = to_i64(f[3], "start_ts", line_no);
      r.end_ts = to_i64(f[4], "end_ts", line_no);
      r.sale_count = static_cast<std::size_t>(to_i64(f[5], "sale_count", line_no));
      if (!f[6].empty()) r.initial_usd = Decimal::parse(f[6]);
      if (!f[7].empty()) r.max_deviation = Decimal::parse(f[7]);
      r.usd_volume = Decimal::parse(f[8]);
      raw.push_back(std::move(r));
    }
  }

  std::vector<std::vector<Edge>> edge_lists(raw.size());
  {
    std::string line;
    std::vector<std::string> f;
    std::size_t line_no = 0;
    while (std::getline(edges_in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1 && line == kFindingEdgesHeader) continue;
      if (!csv::split(line, f) || f.size() != 8) {
        throw DataError("finding edges line " + std::to_string(line_no) + ": bad row");
      }
      const auto idx = static_cast<std::size_t>(to_i64(f[0], "finding index", line_no));
      if (idx >= raw.size()) {
        throw ValidationError("finding edges line " + std::to_string(line_no) +
                              ": index out of range");
      }
      const auto seq = static_cast<std::size_t>(to_i64(f[1], "edge seq", line_no));
      if (seq != edge_lists[idx].size()) {
        throw ValidationError("finding edges line " + std::to_string(line_no) +
                              ": edges out of order");
      }
      auto kind = parse_event_kind(f[3]);
      if (!kind) throw DataError("finding edges line " + std::to_string(line_no) + ": bad kind");
      Edge e;
      e.tx_id = f[2];
      e.kind = *kind;
      e.from = f[4];
      e.to = f[5];
      e.timestamp = to_i64(f[6], "timestamp", line_no);
      e.usd_weight = Decimal::parse(f[7]);
      edge_lists[idx].push_back(std::move(e));
    }
  }

  FindingsBundle b;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawFindingRow& r = raw[i];
    auto& edges = edge_lists[i];
    auto bad = [&](const std::string& what) -> ValidationError {
      return ValidationError("findings row " + std::to_string(i) + ": " + what);
    };
    if (edges.empty()) throw bad("no edges");
    if (edges.size() != r.length) throw bad("stored length disagrees with edges");
    if (r.start_ts != edges.front().timestamp || r.end_ts != edges.back().timestamp) {
      throw bad("stored span disagrees with edges");
    }
    std::size_t sales = 0;
    Decimal vol;
    for (const auto& e : edges) {
      if (e.kind == EventKind::Sale) {
        ++sales;
        vol = vol + e.usd_weight;
      }
    }
    if (vol != r.usd_volume) throw bad("stored usd_volume disagrees with edges");
    if (r.type == "cycle") {
      if (sales != r.sale_count) throw bad("stored sale_count disagrees with edges");
      CycleFinding c;
      c.nft = r.nft;
      c.edges = std::move(edges);
      for (const auto& e : c.edges) c.addresses.push_back(e.from);
      c.start_ts = r.start_ts;
      c.end_ts = r.end_ts;
      c.sale_count = sales;
      c.usd_volume = vol;
      b.cycles.push_back(std::move(c));
    } else {
      SequenceFinding s;
      s.nft = r.nft;
      s.edges = std::move(edges);
      s.addresses.push_back(s.edges.front().from);
      for (const auto& e : s.edges) s.addresses.push_back(e.to);
      s.start_ts = r.start_ts;
      s.end_ts = r.end_ts;
      s.initial_usd = s.edges.front().usd_weight;
      if (s.initial_usd != r.initial_usd) throw bad("stored initial_usd disagrees with edges");
      Decimal maxdiff;
      for (const auto& e : s.edges) {
        Decimal diff = (e.usd_weight - s.initial_usd).abs();
        if (maxdiff < diff) maxdiff = diff;
      }
      s.max_deviation_fraction =
          s.initial_usd.is_zero() ? Decimal{} : Decimal::ratio(maxdiff, s.initial_usd, 8);
      if (s.max_deviation_fraction != r.max_deviation) {
        throw bad("stored max_deviation disagrees with edges");
      }
      s.usd_volume = vol;
      b.sequences.push_back(std::move(s));
    }
  }
  return b;
}

/// Structural invariants every persisted finding must satisfy; violations
/// raise ValidationError. Event-level rules (transfer interposition) need
/// the source dataset and are not checkable here.
inline void validate_findings(const FindingsBundle& b, const DetectorConfig& cfg) {
  auto bad = [](const std::string& what) -> ValidationError {
    return ValidationError("findings validation: " + what);
  };
  auto check_distinct = [&](const std::vector<std::string>& addrs, const char* kind) {
    std::vector<std::string> sorted(addrs);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw bad(std::string(kind) + " repeats an address");
    }
  };
  for (const auto& c : b.cycles) {
    if (c.edges.empty()) throw bad("empty cycle");
    if (c.length() > static_cast<std::size_t>(cfg.max_cycle_len)) throw bad("cycle over length cap");
    if (c.sale_count < 1) throw bad("cycle without a sale");
    for (std::size_t i = 0; i + 1 < c.edges.size(); ++i) {
      if (c.edges[i].to != c.edges[i + 1].from) throw bad("cycle walk broken");
      if (c.edges[i].timestamp >= c.edges[i + 1].timestamp) throw bad("cycle time order broken");
    }
    if (c.edges.back().to != c.edges.front().from) throw bad("cycle not closed");
    check_distinct(c.addresses, "cycle");
  }
  for (const auto& s : b.sequences) {
    if (s.length() < static_cast<std::size_t>(cfg.min_sequence_len)) throw bad("sequence too short");
    if (s.end_ts - s.start_ts >= cfg.velocity_window_seconds) {
      throw bad("sequence spans the velocity window");
    }
    for (std::size_t i = 0; i < s.edges.size(); ++i) {
      const Edge& e = s.edges[i];
      if (e.kind != EventKind::Sale) throw bad("sequence contains a transfer");
      if (i + 1 < s.edges.size()) {
        if (e.to != s.edges[i + 1].from) throw bad("sequence path broken");
        if (e.timestamp >= s.edges[i + 1].timestamp) throw bad("sequence time order broken");
      }
      if (compare_abs_products(e.usd_weight - s.initial_usd, Decimal::from_int(1),
                               cfg.max_price_deviation, s.initial_usd) > 0) {
        throw bad("sequence price outside the deviation bound");
      }
    }
    check_distinct(s.addresses, "sequence");
  }
}

// ---- report JSON ----

namespace io_detail {

inline nlohmann::json share_to_json(const ShareLine& s) {
  return {{"flagged", s.flagged}, {"total", s.total}, {"share_pct", s.share_pct.to_string()}};
}

inline ShareLine share_from_json(const nlohmann::json& j) {
  ShareLine s;
  s.flagged = j.at("flagged").get<std::uint64_t>();
  s.total = j.at("total").get<std::uint64_t>();
  s.share_pct = Decimal::parse(j.at("share_pct").get<std::string>());
  return s;
}

}  // namespace io_detail

inline nlohmann::json report_to_json(const MarketReport& r) {
  using io_detail::share_to_json;
  nlohmann::json j;
  j["totals"] = {
      {"addresses", share_to_json(r.totals.addresses)},
      {"transactions", share_to_json(r.totals.transactions)},
      {"nfts", share_to_json(r.totals.nfts)},
      {"volume",
       {{"flagged", r.totals.volume.flagged.to_string()},
        {"total", r.totals.volume.total.to_string()},
        {"share_pct", r.totals.volume.share_pct.to_string()}}},
      {"warnings", r.totals.warnings},
  };
  j["split"] = {{"cyclic_tx", r.split.cyclic_tx}, {"sequential_tx", r.split.sequential_tx}};
  static const char* kClassNames[4] = {"self_loop", "two_tx", "three_tx", "more_than_three"};
  nlohmann::json cc_counts, cc_fracs;
  for (int i = 0; i < 4; ++i) {
    cc_counts[kClassNames[i]] = r.cycle_classes.counts[i];
    cc_fracs[kClassNames[i]] = r.cycle_classes.fractions[i];
  }
  j["cycle_classes"] = {{"counts", cc_counts}, {"fractions", cc_fracs},
                        {"total", r.cycle_classes.total}};
  static const char* kBucketNames[4] = {"lt_1d", "d1_7", "d7_30", "ge_30d"};
  nlohmann::json eb_counts, eb_fracs;
  for (int i = 0; i < 4; ++i) {
    eb_counts[kBucketNames[i]] = r.buckets.counts[i];
    eb_fracs[kBucketNames[i]] = r.buckets.fractions[i];
  }
  j["elapsed_buckets"] = {{"counts", eb_counts},
                          {"fractions", eb_fracs},
                          {"cumulative_lt_30d", r.buckets.cumulative_lt_30d},
                          {"total", r.buckets.total}};
  nlohmann::json medians = nlohmann::json::object();
  for (const auto& [len, med] : r.median_by_length) medians[std::to_string(len)] = med;
  j["median_by_length"] = medians;
  j["price_impact_mean"] =
      r.price_impact_mean ? nlohmann::json(*r.price_impact_mean) : nlohmann::json(nullptr);
  nlohmann::json lt_bins = nlohmann::json::array(), lt_fracs = nlohmann::json::array();
  for (int i = 0; i < 10; ++i) {
    lt_bins.push_back(r.lifetime.bins[i]);
    lt_fracs.push_back(r.lifetime.fractions[i]);
  }
  j["lifetime"] = {{"bins", lt_bins}, {"fractions", lt_fracs}, {"total", r.lifetime.total}};
  nlohmann::json colls = nlohmann::json::array();
  for (const auto& c : r.collections) {
    colls.push_back({{"collection", c.collection},
                     {"share_addresses", c.share_addresses.to_string()},
                     {"share_transactions", c.share_transactions.to_string()},
                     {"flagged_usd", c.flagged_usd.to_string()},
                     {"share_volume", c.share_volume.to_string()},
                     {"share_nfts", c.share_nfts.to_string()}});
  }
  j["collections"] = colls;
  nlohmann::json partners = nlohmann::json::array();
  for (const auto& p : r.partners) {
    partners.push_back({p.address, p.trade_count, p.unique_partners, p.flagged_trade_count});
  }
  j["partners"] = partners;
  return j;
}

inline MarketReport report_from_json(const nlohmann::json& j) {
  using io_detail::share_from_json;
  MarketReport r;
  const auto& t = j.at("totals");
  r.totals.addresses = share_from_json(t.at("addresses"));
  r.totals.transactions = share_from_json(t.at("transactions"));
  r.totals.nfts = share_from_json(t.at("nfts"));
  r.totals.volume.flagged = Decimal::parse(t.at("volume").at("flagged").get<std::string>());
  r.totals.volume.total = Decimal::parse(t.at("volume").at("total").get<std::string>());
  r.totals.volume.share_pct = Decimal::parse(t.at("volume").at("share_pct").get<std::string>());
  r.totals.warnings = t.at("warnings").get<std::vector<std::string>>();
  r.split.cyclic_tx = j.at("split").at("cyclic_tx").get<std::uint64_t>();
  r.split.sequential_tx = j.at("split").at("sequential_tx").get<std::uint64_t>();
  static const char* kClassNames[4] = {"self_loop", "two_tx", "three_tx", "more_than_three"};
  for (int i = 0; i < 4; ++i) {
    r.cycle_classes.counts[i] = j.at("cycle_classes").at("counts").at(kClassNames[i]).get<std::uint64_t>();
    r.cycle_classes.fractions[i] = j.at("cycle_classes").at("fractions").at(kClassNames[i]).get<double>();
  }
  r.cycle_classes.total = j.at("cycle_classes").at("total").get<std::uint64_t>();
  static const char* kBucketNames[4] = {"lt_1d", "d1_7", "d7_30", "ge_30d"};
  for (int i = 0; i < 4; ++i) {
    r.buckets.counts[i] = j.at("elapsed_buckets").at("counts").at(kBucketNames[i]).get<std::uint64_t>();
    r.buckets.fractions[i] = j.at("elapsed_buckets").at("fractions").at(kBucketNames[i]).get<double>();
  }
  r.buckets.cumulative_lt_30d = j.at("elapsed_buckets").at("cumulative_lt_30d").get<double>();
  r.buckets.total = j.at("elapsed_buckets").at("total").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("median_by_length").items()) {
    r.median_by_length[std::stoull(k)] = v.get<std::int64_t>();
  }
  if (!j.at("price_impact_mean").is_null()) {
    r.price_impact_mean = j.at("price_impact_mean").get<double>();
  }
  for (int i = 0; i < 10; ++i) {
    r.lifetime.bins[i] = j.at("lifetime").at("bins").at(i).get<std::uint64_t>();
    r.lifetime.fractions[i] = j.at("lifetime").at("fractions").at(i).get<double>();
  }
  r.lifetime.total = j.at("lifetime").at("total").get<std::uint64_t>();
  for (const auto& cj : j.at("collections")) {
    CollectionStats c;
    c.collection = cj.at("collection").get<std::string>();
    c.share_addresses = Decimal::parse(cj.at("share_addresses").get<std::string>());
    c.share_transactions = Decimal::parse(cj.at("share_transactions").get<std::string>());
    c.flagged_usd = Decimal::parse(cj.at("flagged_usd").get<std::string>());
    c.share_volume = Decimal::parse(cj.at("share_volume").get<std::string>());
    c.share_nfts = Decimal::parse(cj.at("share_nfts").get<std::string>());
    r.collections.push_back(std::move(c));
  }
  for (const auto& pj : j.at("partners")) {
    AddressActivity a;
    a.address = pj.at(0).get<std::string>();
    a.trade_count = pj.at(1).get<std::uint64_t>();
    a.unique_partners = pj.at(2).get<std::uint64_t>();
    a.flagged_trade_count = pj.at(3).get<std::uint64_t>();
    r.partners.push_back(std::move(a));
  }
  return r;
}

// ---- rendering ----

namespace io_detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace io_detail

inline std::string render_report_text(const MarketReport& r) {
  using io_detail::fixed4;
  std::ostringstream os;
  os << "wash-trade scan report\n";
  os << "======================\n\n";
  os << "overview (addresses and nfts counted over all events; transactions and volume over sales)\n";
  auto line = [&](const char* name, const std::string& flagged, const std::string& total,
                  const std::string& share) {
    os << "  " << std::left << std::setw(14) << name << std::right << std::setw(18) << flagged
       << std::setw(22) << total << std::setw(9) << share << "%\n";
  };
  os << "  " << std::left << std::setw(14) << "metric" << std::right << std::setw(18) << "flagged"
     << std::setw(22) << "total" << std::setw(10) << "share\n";
  line("addresses", std::to_string(r.totals.addresses.flagged),
       std::to_string(r.totals.addresses.total), r.totals.addresses.share_pct.format_fixed(2));
  line("sale tx", std::to_string(r.totals.transactions.flagged),
       std::to_string(r.totals.transactions.total), r.totals.transactions.share_pct.format_fixed(2));
  line("usd volume", r.totals.volume.flagged.to_string(), r.totals.volume.total.to_string(),
       r.totals.volume.share_pct.format_fixed(2));
  line("nfts", std::to_string(r.totals.nfts.flagged), std::to_string(r.totals.nfts.total),
       r.totals.nfts.share_pct.format_fixed(2));
  for (const auto& w : r.totals.warnings) os << "  warning: " << w << '\n';
  os << '\n';
  os << "flagged sale transactions: cyclic=" << r.split.cyclic_tx
     << " sequential=" << r.split.sequential_tx << '\n';
  os << '\n';
  os << "cycle classes (" << r.cycle_classes.total << " cycles)\n";
  static const char* kClassNames[4] = {"self_loop", "two_tx", "three_tx", "more_than_three"};
  for (int i = 0; i < 4; ++i) {
    os << "  " << std::left << std::setw(16) << kClassNames[i] << std::right << std::setw(10)
       << r.cycle_classes.counts[i] << std::setw(9) << fixed4(r.cycle_classes.fractions[i]) << '\n';
  }
  os << '\n';
  os << "cycle elapsed time\n";
  static const char* kBucketLabels[4] = {"< 1 day", "1-7 days", "7-30 days", ">= 30 days"};
  for (int i = 0; i < 4; ++i) {
    os << "  " << std::left << std::setw(16) << kBucketLabels[i] << std::right << std::setw(10)
       << r.buckets.counts[i] << std::setw(9) << fixed4(r.buckets.fractions[i]) << '\n';
  }
  os << "  cumulative under 30 days: " << fixed4(r.buckets.cumulative_lt_30d) << '\n';
  os << '\n';
  os << "median cycle duration by length (seconds)\n";
  if (r.median_by_length.empty()) os << "  none\n";
  for (const auto& [len, med] : r.median_by_length) os << "  " << len << ": " << med << '\n';
  os << '\n';
  os << "price impact (mean next-organic/flagged - 1, per flagged sale): ";
  os << (r.price_impact_mean ? fixed4(*r.price_impact_mean) : "n/a") << '\n';
  os << '\n';
  os << "flagged sales across collection lifetime (10 bins, " << r.lifetime.total << " sales)\n ";
  for (int i = 0; i < 10; ++i) os << ' ' << r.lifetime.bins[i];
  os << '\n';
  os << '\n';
  os << "collections (A addr% / B tx% / C1 flagged usd / C2 vol% / D nft%)\n";
  for (const auto& c : r.collections) {
    os << "  " << std::left << std::setw(24) << c.collection << std::right << std::setw(9)
       << c.share_addresses.format_fixed(2) << std::setw(9) << c.share_transactions.format_fixed(2)
       << std::setw(20) << c.flagged_usd.to_string() << std::setw(9)
       << c.share_volume.format_fixed(2) << std::setw(9) << c.share_nfts.format_fixed(2) << '\n';
  }
  os << '\n';
  os << "address activity: " << r.partners.size() << " addresses (full data in fig5_partners.csv)\n";
  return os.str();
}

inline void write_fig3(const ElapsedBuckets& b, std::ostream& out) {
  static const char* kBucketNames[4] = {"lt_1d", "d1_7", "d7_30", "ge_30d"};
  out << "bucket,count,fraction\n";
  for (int i = 0; i < 4; ++i) {
    out << kBucketNames[i] << ',' << b.counts[i] << ',' << io_detail::fixed4(b.fractions[i])
        << '\n';
  }
}

inline void write_fig4(const LifetimeProfile& p, std::ostream& out) {
  out << "bin,count,fraction\n";
  for (int i = 0; i < 10; ++i) {
    out << i << ',' << p.bins[i] << ',' << io_detail::fixed4(p.fractions[i]) << '\n';
  }
}

inline void write_fig5(const std::vector<AddressActivity>& acts, std::ostream& out) {
  out << "address,trade_count,unique_partners,flagged_trade_count\n";
  std::string buf;
  for (const auto& a : acts) {
    buf.clear();
    csv::append_row(buf, {a.address, std::to_string(a.trade_count),
                          std::to_string(a.unique_partners), std::to_string(a.flagged_trade_count)});
    out << buf;
  }
}

}  // namespace washscan
