#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "washscan/csv.hpp"
#include "washscan/decimal.hpp"
#include "washscan/types.hpp"

namespace washscan {

struct PriceQuote {
  std::string token;
  std::int64_t day = 0;  // days since 1970-01-01 UTC
  Decimal usd_per_unit;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kStalenessWarnDays = 7;

inline std::int64_t day_of_timestamp(std::int64_t ts) {
  // floor division; timestamps are positive in practice but keep it total
  std::int64_t d = ts / kSecondsPerDay;
  if (ts % kSecondsPerDay < 0) --d;
  return d;
}

// Civil-date conversion after Howard Hinnant's chrono algorithms.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

/// Strict YYYY-MM-DD, real calendar dates only.
inline std::optional<std::int64_t> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<unsigned> {
    unsigned v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + static_cast<unsigned>(s[i] - '0');
    }
    return v;
  };
  auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1) return std::nullopt;
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  unsigned dim = kDays[*m - 1];
  bool leap = (*y % 4 == 0 && *y % 100 != 0) || *y % 400 == 0;
  if (*m == 2 && leap) dim = 29;
  if (*d > dim) return std::nullopt;
  return days_from_civil(static_cast<std::int64_t>(*y), *m, *d);
}

/// Immutable after load; lookups are read-only.
class PriceTable {
 public:
  void add(PriceQuote q) { by_token_[q.token].push_back({q.day, q.usd_per_unit}); }

  /// Sorts per-token quote lists; throws DataError on duplicate (token, day).
  void finalize() {
    for (auto& [token, quotes] : by_token_) {
      std::sort(quotes.begin(), quotes.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 1; i < quotes.size(); ++i) {
        if (quotes[i].first == quotes[i - 1].first) {
          throw DataError("prices: duplicate quote for token '" + token + "' on day " +
                          std::to_string(quotes[i].first));
        }
      }
    }
  }

  /// Nearest quote at or before `day`, or none.
  std::optional<PriceQuote> quote_at_or_before(std::string_view token, std::int64_t day) const {
    auto it = by_token_.find(std::string(token));
    if (it == by_token_.end()) return std::nullopt;
    const auto& quotes = it->second;
    auto pos = std::upper_bound(quotes.begin(), quotes.end(), day,
                                [](std::int64_t d, const auto& q) { return d < q.first; });
    if (pos == quotes.begin()) return std::nullopt;
    --pos;
    return PriceQuote{std::string(token), pos->first, pos->second};
  }

  std::optional<Decimal> rate_at(std::string_view token, std::int64_t timestamp) const {
    auto q = quote_at_or_before(token, day_of_timestamp(timestamp));
    if (!q) return std::nullopt;
    return q->usd_per_unit;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [token, quotes] : by_token_) n += quotes.size();
    return n;
  }

 private:
  std::unordered_map<std::string, std::vector<std::pair<std::int64_t, Decimal>>> by_token_;
};

inline constexpr std::string_view kPriceHeader = "token,date,usd_per_unit";

/// Loads `token,date,usd_per_unit` rows. Unlike the event feed, the price
/// table is operator-curated, so any malformed row is fatal with its line
/// number.
inline PriceTable load_price_table(std::istream& in) {
  if (!in) throw UsageError("prices: stream not readable");
  PriceTable table;
  std::string line;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == kPriceHeader) continue;
    auto die = [&](const std::string& what) -> DataError {
      return DataError("prices line " + std::to_string(line_no) + ": " + what);
    };
    if (!csv::split(line, fields)) throw die("broken quoting");
    if (fields.size() != 3) throw die("expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw die("empty token");
    auto day = parse_date(fields[1]);
    if (!day) throw die("bad date '" + fields[1] + "'");
    auto rate = Decimal::try_parse(fields[2]);
    if (!rate || !rate->is_positive()) throw die("usd_per_unit must be a positive decimal");
    table.add({fields[0], *day, *rate});
  }
  if (in.bad()) throw UsageError("prices: read error at line " + std::to_string(line_no));
  table.finalize();
  return table;
}

struct EnrichReport {
  std::size_t resolved = 0;
  std::size_t unresolved = 0;  // sales left without usd_price
  std::size_t stale = 0;       // resolved from a quote older than the warn window
};

/// Resolves usd_price for sales that lack it: payment_amount times the
/// nearest per-unit quote at or before the sale's UTC day. Sales already
/// priced are untouched; unresolvable sales stay unpriced for clean() to
/// drop as exotic_asset. Never throws.
inline EnrichReport enrich_usd(std::vector<TradeEvent>& events, const PriceTable& table) {
  EnrichReport report;
  for (auto& ev : events) {
    if (ev.kind != EventKind::Sale || ev.usd_price) continue;
    if (!ev.payment_token || !ev.payment_amount) {
      ++report.unresolved;
      continue;
    }
    auto q = table.quote_at_or_before(*ev.payment_token, day_of_timestamp(ev.timestamp));
    if (!q) {
      ++report.unresolved;
      continue;
    }
    ev.usd_price = *ev.payment_amount * q->usd_per_unit;
    ++report.resolved;
    if (day_of_timestamp(ev.timestamp) - q->day > kStalenessWarnDays) ++report.stale;
  }
  return report;
}

}  // namespace washscan
