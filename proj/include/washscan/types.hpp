#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "washscan/decimal.hpp"

namespace washscan {

/// Bad command line / unreadable input path.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Input violates a file schema (carries line context in the message).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Stored artifacts fail their own invariants (tampering, corruption).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EventKind : std::uint8_t { Sale, Transfer };

inline std::string_view to_string(EventKind k) {
  return k == EventKind::Sale ? "sale" : "transfer";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "sale") return EventKind::Sale;
  if (s == "transfer") return EventKind::Transfer;
  return std::nullopt;
}

/// 20-byte hex address normalized to 40 lowercase hex characters
/// (a leading 0x/0X on input is accepted and stripped).
inline std::optional<std::string> normalize_address(std::string_view raw) {
  if (raw.size() >= 2 && raw[0] == '0' && (raw[1] == 'x' || raw[1] == 'X')) {
    raw.remove_prefix(2);
  }
  if (raw.size() != 40) return std::nullopt;
  std::string out;
  out.reserve(40);
  for (char c : raw) {
    if (c >= '0' && c <= '9') {
      out.push_back(c);
    } else if (c >= 'a' && c <= 'f') {
      out.push_back(c);
    } else if (c >= 'A' && c <= 'F') {
      out.push_back(char(c - 'A' + 'a'));
    } else {
      return std::nullopt;
    }
  }
  return out;
}

/// Token ids are unsigned integers of arbitrary size, kept as canonical
/// decimal strings (no leading zeros). Ordering compares numerically.
inline std::optional<std::string> normalize_token(std::string_view raw) {
  if (raw.empty()) return std::nullopt;
  std::size_t i = 0;
  while (i + 1 < raw.size() && raw[i] == '0') ++i;
  std::string out;
  out.reserve(raw.size() - i);
  for (; i < raw.size(); ++i) {
    if (raw[i] < '0' || raw[i] > '9') return std::nullopt;
    out.push_back(raw[i]);
  }
  return out;
}

struct NftId {
  std::string contract;  // 40 lowercase hex chars
  std::string token;     // canonical decimal digits

  static std::optional<NftId> make(std::string_view contract_raw, std::string_view token_raw) {
    auto c = normalize_address(contract_raw);
    auto t = normalize_token(token_raw);
    if (!c || !t) return std::nullopt;
    return NftId{std::move(*c), std::move(*t)};
  }

  std::string str() const { return contract + ":" + token; }

  bool operator==(const NftId& o) const = default;

  std::strong_ordering operator<=>(const NftId& o) const {
    if (auto c = contract <=> o.contract; c != 0) return c;
    // shorter decimal string == smaller number
    if (auto c = token.size() <=> o.token.size(); c != 0) return c;
    return token <=> o.token;
  }
};

struct NftIdHash {
  std::size_t operator()(const NftId& id) const {
    std::size_t h = std::hash<std::string>{}(id.contract);
    h ^= std::hash<std::string>{}(id.token) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// One sale or transfer of one NFT. Transfers never carry payment fields;
/// sales must end up with a resolved usd_price once enrichment has run.
struct TradeEvent {
  NftId nft;
  EventKind kind = EventKind::Sale;
  std::string tx_id;   // transaction hash + log index, unique per dataset
  std::int64_t timestamp = 0;  // UTC seconds
  std::string from;
  std::string to;
  std::optional<std::string> payment_token;
  std::optional<Decimal> payment_amount;
  std::optional<Decimal> usd_price;
  std::string collection;
  std::optional<std::string> marketplace;

  bool operator==(const TradeEvent& o) const = default;
};

enum class DropReason : std::uint8_t { Malformed, ExoticAsset, ZeroPrice, Duplicate };

inline std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::Malformed: return "malformed";
    case DropReason::ExoticAsset: return "exotic_asset";
    case DropReason::ZeroPrice: return "zero_price";
    case DropReason::Duplicate: return "duplicate";
  }
  return "unknown";
}

struct DropRecord {
  std::string tx_id;  // "line:<n>" when the line had no usable tx_id
  DropReason reason = DropReason::Malformed;
  std::string detail;
};

struct CleaningReport {
  std::size_t kept = 0;
  std::vector<DropRecord> dropped;

  void merge(CleaningReport other) {
    kept = other.kept;
    dropped.insert(dropped.end(), std::make_move_iterator(other.dropped.begin()),
                   std::make_move_iterator(other.dropped.end()));
  }
};

}  // namespace washscan
