#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "washscan/config.hpp"
#include "washscan/csv.hpp"
#include "washscan/types.hpp"

namespace washscan {

struct ParseResult {
  std::vector<TradeEvent> events;  // input order
  CleaningReport report;
};

struct CleanResult {
  std::vector<TradeEvent> events;  // sorted by (timestamp, tx_id)
  CleaningReport report;
};

namespace detail {

inline bool parse_int64(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// Event rows: contract, token, kind, tx_id, timestamp, from, to,
// payment_token?, payment_amount?, usd_price?, collection, marketplace?
inline constexpr std::size_t kEventFieldCount = 12;

inline std::string parse_event_line(const std::vector<std::string>& f, TradeEvent& ev) {
  auto nft = NftId::make(f[0], f[1]);
  if (!nft) return "bad contract/token";
  ev.nft = std::move(*nft);

  auto kind = parse_event_kind(f[2]);
  if (!kind) return "bad kind '" + f[2] + "'";
  ev.kind = *kind;

  if (f[3].empty()) return "empty tx_id";
  ev.tx_id = f[3];

  if (!parse_int64(f[4], ev.timestamp) || ev.timestamp <= 0) return "bad timestamp";

  auto from = normalize_address(f[5]);
  if (!from) return "bad from address";
  ev.from = std::move(*from);
  auto to = normalize_address(f[6]);
  if (!to) return "bad to address";
  ev.to = std::move(*to);

  ev.payment_token = f[7].empty() ? std::nullopt : std::optional<std::string>(f[7]);
  if (!f[8].empty()) {
    auto amt = Decimal::try_parse(f[8]);
    if (!amt || amt->is_negative()) return "bad payment_amount";
    ev.payment_amount = *amt;
  } else {
    ev.payment_amount = std::nullopt;
  }
  if (!f[9].empty()) {
    auto usd = Decimal::try_parse(f[9]);
    if (!usd || usd->is_negative()) return "bad usd_price";
    ev.usd_price = *usd;
  } else {
    ev.usd_price = std::nullopt;
  }

  if (ev.kind == EventKind::Transfer &&
      (ev.payment_token || ev.payment_amount || ev.usd_price)) {
    return "transfer with payment fields";
  }

  if (f[10].empty()) return "empty collection";
  ev.collection = f[10];
  ev.marketplace = f[11].empty() ? std::nullopt : std::optional<std::string>(f[11]);
  return {};
}

}  // namespace detail

inline constexpr std::string_view kEventHeader =
    "contract,token,kind,tx_id,timestamp,from,to,payment_token,payment_amount,"
    "usd_price,collection,marketplace";

/// Parses line-delimited event records. Malformed lines never abort the
/// run: each one is recorded as dropped(malformed) with line context and
/// the scan continues. Output preserves input order. An unreadable stream
/// is the only fatal case.
inline ParseResult parse_events(std::istream& in) {
  if (!in) throw UsageError("events: stream not readable");
  ParseResult result;
  std::string line;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == kEventHeader) continue;

    auto fail = [&](std::string detail, std::string tx) {
      result.report.dropped.push_back(
          {tx.empty() ? "line:" + std::to_string(line_no) : std::move(tx),
           DropReason::Malformed, "line " + std::to_string(line_no) + ": " + detail});
    };

    if (!csv::split(line, fields)) {
      fail("broken quoting", {});
      continue;
    }
    if (fields.size() != detail::kEventFieldCount) {
      fail("expected 12 fields, got " + std::to_string(fields.size()),
           fields.size() > 3 ? fields[3] : std::string{});
      continue;
    }
    TradeEvent ev;
    std::string err = detail::parse_event_line(fields, ev);
    if (!err.empty()) {
      fail(err, fields[3]);
      continue;
    }
    result.events.push_back(std::move(ev));
  }
  if (in.bad()) throw UsageError("events: read error at line " + std::to_string(line_no));
  result.report.kept = result.events.size();
  return result;
}

inline void serialize_events(const std::vector<TradeEvent>& events, std::ostream& out) {
  std::string buf;
  buf.reserve(256);
  out << kEventHeader << '\n';
  for (const auto& ev : events) {
    buf.clear();
    std::string ts = std::to_string(ev.timestamp);
    std::string amount = ev.payment_amount ? ev.payment_amount->to_string() : std::string{};
    std::string usd = ev.usd_price ? ev.usd_price->to_string() : std::string{};
    csv::append_row(buf, {ev.nft.contract, ev.nft.token, to_string(ev.kind), ev.tx_id, ts,
                          ev.from, ev.to,
                          ev.payment_token ? std::string_view(*ev.payment_token) : std::string_view{},
                          amount, usd, ev.collection,
                          ev.marketplace ? std::string_view(*ev.marketplace) : std::string_view{}});
    out << buf;
  }
}

inline bool event_order_less(const TradeEvent& a, const TradeEvent& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.tx_id < b.tx_id;
}

/// Applies the cleaning rules to parsed (and typically enriched) events:
/// duplicates by tx_id go first-wins in (timestamp, tx_id) order, sales
/// without a resolved usd_price drop as exotic_asset, zero-price sales
/// drop when configured. Total: never throws. Result is sorted by
/// (timestamp, tx_id) and cleaning again is a no-op.
inline CleanResult clean(std::vector<TradeEvent> events, const DetectorConfig& cfg) {
  CleanResult result;
  std::stable_sort(events.begin(), events.end(), event_order_less);

  std::unordered_set<std::string> seen;
  seen.reserve(events.size() * 2);
  result.events.reserve(events.size());
  for (auto& ev : events) {
    if (!seen.insert(ev.tx_id).second) {
      result.report.dropped.push_back({ev.tx_id, DropReason::Duplicate, {}});
      continue;
    }
    if (ev.kind == EventKind::Sale) {
      if (!ev.usd_price) {
        result.report.dropped.push_back(
            {ev.tx_id, DropReason::ExoticAsset,
             ev.payment_token ? "no quote for " + *ev.payment_token : "no price data"});
        continue;
      }
      if (cfg.drop_zero_price && ev.usd_price->is_zero()) {
        result.report.dropped.push_back({ev.tx_id, DropReason::ZeroPrice, {}});
        continue;
      }
    }
    result.events.push_back(std::move(ev));
  }
  result.report.kept = result.events.size();
  return result;
}

inline void write_cleaning_report(const CleaningReport& report, std::ostream& out) {
  out << "tx_id,reason,detail\n";
  std::string buf;
  for (const auto& d : report.dropped) {
    buf.clear();
    csv::append_row(buf, {d.tx_id, to_string(d.reason), d.detail});
    out << buf;
  }
}

}  // namespace washscan
