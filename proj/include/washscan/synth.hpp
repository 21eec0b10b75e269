#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "washscan/config.hpp"
#include "washscan/csv.hpp"
#include "washscan/decimal.hpp"
#include "washscan/types.hpp"

namespace washscan {

enum class PlantPattern { SelfLoop, Cycle2, Cycle3, CycleK, RapidSequence };

inline const char* to_string(PlantPattern p) {
  switch (p) {
    case PlantPattern::SelfLoop: return "self_loop";
    case PlantPattern::Cycle2: return "cycle2";
    case PlantPattern::Cycle3: return "cycle3";
    case PlantPattern::CycleK: return "cycle_k";
    case PlantPattern::RapidSequence: return "sequence";
  }
  return "?";
}

struct PlantSpec {
  PlantPattern pattern = PlantPattern::Cycle2;
  std::uint32_t k = 0;  // edges for CycleK, hops for RapidSequence
  std::uint32_t count = 1;
  std::int64_t window_seconds = 3600;  // span the pattern's edges fit into
  bool within = true;                  // inside detector thresholds or a decoy
};

struct PriceModel {
  Decimal start_price = Decimal::from_int(100);
  Decimal drift = Decimal::parse("0.01");  // per-step fraction
  Decimal noise = Decimal::parse("0.05");  // per-step amplitude
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_collections = 1;
  std::uint32_t n_nfts = 0;
  std::uint32_t n_organic_traders = 0;
  std::uint32_t organic_trade_rate = 4;  // mean sale hops per NFT
  PriceModel price_model;
  std::vector<PlantSpec> planted;
};

struct LabelRow {
  std::string tx_id;
  std::string pattern_class;  // e.g. "cycle3_within", "sequence4_outside"
  std::uint64_t plant_id = 0;
};

struct SynthResult {
  std::vector<TradeEvent> events;  // sorted by (timestamp, tx_id)
  std::vector<LabelRow> labels;    // planted tx only, in plant order
};

namespace synth_detail {

// splitmix64; integer draws only, so output is identical on every platform
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

inline std::string hex40(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(40, '0');
  for (int i = 39; i >= 0 && v != 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

// address namespaces kept disjoint by construction
inline std::string organic_addr(std::uint64_t t) { return hex40(0x100000000ull + t); }
inline std::string detour_addr(std::uint64_t t) { return hex40(0x200000000ull + t); }
inline std::string plant_addr(std::uint64_t plant, std::uint64_t k) {
  return hex40(0x300000000ull + plant * 1024 + k);
}

inline Decimal frac_multiplier(std::int64_t permyriad) {
  // 1 + permyriad/10000 as an exact decimal
  return Decimal::from_raw(Decimal::kScale + permyriad * (Decimal::kScale / 10000));
}

inline Decimal jitter_price(Decimal base, const PriceModel& pm, Rng& rng) {
  // drift plus symmetric noise, multiplier floored at 0.01
  const std::int64_t noise_steps = static_cast<std::int64_t>(rng.below(2001)) - 1000;
  const __int128 noise_raw = static_cast<__int128>(pm.noise.raw()) * noise_steps / 1000;
  Decimal mult = Decimal::from_raw(Decimal::kScale + pm.drift.raw() + noise_raw);
  const Decimal floor = Decimal::parse("0.01");
  if (mult < floor) mult = floor;
  Decimal out = base * mult;
  if (!out.is_positive()) out = floor;
  return out;
}

}  // namespace synth_detail

inline void validate(const SynthConfig& cfg) {
  if (cfg.n_nfts > 0) {
    if (cfg.n_collections == 0) throw DataError("synth: n_collections must be >= 1");
    const std::uint64_t max_chain =
        2ull * std::max<std::uint64_t>(1, cfg.organic_trade_rate) + 1;
    if (cfg.n_organic_traders < max_chain + 1) {
      throw DataError("synth: n_organic_traders must exceed the longest organic chain (" +
                      std::to_string(max_chain + 1) + " owners needed)");
    }
  }
  if (!cfg.price_model.start_price.is_positive()) throw DataError("synth: start_price must be > 0");
  if (cfg.price_model.drift.is_negative() || cfg.price_model.drift >= Decimal::from_int(1)) {
    throw DataError("synth: drift must be in [0, 1)");
  }
  if (cfg.price_model.noise.is_negative() || cfg.price_model.noise >= Decimal::parse("0.5")) {
    throw DataError("synth: noise must be in [0, 0.5)");
  }
  for (const auto& p : cfg.planted) {
    std::uint32_t hops = 0;
    switch (p.pattern) {
      case PlantPattern::SelfLoop: hops = 1; break;
      case PlantPattern::Cycle2: hops = 2; break;
      case PlantPattern::Cycle3: hops = 3; break;
      case PlantPattern::CycleK:
        if (p.k < 4) throw DataError("synth: cycle_k needs k >= 4");
        hops = p.k;
        break;
      case PlantPattern::RapidSequence:
        if (p.k < 2) throw DataError("synth: sequence needs k >= 2");
        hops = p.k;
        break;
    }
    if (p.window_seconds < static_cast<std::int64_t>(hops)) {
      throw DataError("synth: plant window of " + std::to_string(p.window_seconds) +
                      "s cannot fit " + std::to_string(hops) + " edges at 1s resolution");
    }
    if (hops > 1000) {
      throw DataError("synth: plant k of " + std::to_string(hops) +
                      " exceeds the per-plant address budget");
    }
  }
}

/// Deterministic labeled trace. Organic ownership chains never revisit an
/// address per NFT and never leave two sales within the velocity window,
/// so the organic background can trigger neither detector. Plants occupy
/// dedicated NFTs in a reserved collection so their footprint is exactly
/// their labeled transactions.
inline SynthResult generate(const SynthConfig& cfg, const DetectorConfig& det) {
  validate(cfg);
  det.validate();
  // a plant labeled "within" must actually clear the detector's
  // thresholds, which its own window setting does not guarantee
  for (const auto& spec : cfg.planted) {
    if (spec.pattern != PlantPattern::RapidSequence || !spec.within) continue;
    const std::int64_t hops = spec.k;
    const std::int64_t step = std::max<std::int64_t>(1, spec.window_seconds / hops);
    if ((hops - 1) * step >= det.velocity_window_seconds) {
      throw DataError("synth: within-sequence plant spans " + std::to_string((hops - 1) * step) +
                      "s but the velocity window is " +
                      std::to_string(det.velocity_window_seconds) + "s");
    }
    const Decimal bump = Decimal::from_raw(std::min<std::int64_t>(hops - 1, 4) * 100 *
                                           (Decimal::kScale / 10000));
    if (det.max_price_deviation < bump) {
      throw DataError("synth: within-sequence plant prices exceed max_price_deviation");
    }
  }
  using namespace synth_detail;
  SynthResult out;
  Rng rng(cfg.seed ^ 0x5DEECE66Dull);
  constexpr std::int64_t kBase = 1609459200;  // 2021-01-01
  const std::int64_t guard = det.velocity_window_seconds + 1;

  // organic background
  std::uint64_t detours = 0;
  for (std::uint32_t n = 0; n < cfg.n_nfts; ++n) {
    const std::uint32_t coll = n % cfg.n_collections;
    const NftId nft{hex40(0x400000000ull + coll), std::to_string(n)};
    const std::string coll_name = "coll" + std::to_string(coll);
    const std::uint64_t hops =
        1 + rng.below(2 * std::max<std::uint64_t>(1, cfg.organic_trade_rate));
    std::int64_t ts = kBase + static_cast<std::int64_t>(rng.below(30ull * 86400));
    Decimal price = jitter_price(cfg.price_model.start_price, cfg.price_model, rng);

    std::vector<std::uint64_t> owners;
    std::unordered_set<std::uint64_t> used;
    owners.reserve(hops + 1);
    while (owners.size() < hops + 1) {
      std::uint64_t t = rng.below(cfg.n_organic_traders);
      if (used.insert(t).second) owners.push_back(t);
    }

    std::string holder = organic_addr(owners[0]);
    for (std::uint64_t h = 0; h < hops; ++h) {
      std::string next = organic_addr(owners[h + 1]);
      if (rng.below(4) == 0) {
        // custody detour through a fresh wallet, recorded as a transfer
        std::string mid = detour_addr(detours++);
        TradeEvent tr;
        tr.nft = nft;
        tr.kind = EventKind::Transfer;
        tr.tx_id = "org-" + std::to_string(n) + "-" + std::to_string(h) + "t";
        tr.timestamp = ts;
        tr.from = holder;
        tr.to = mid;
        tr.collection = coll_name;
        out.events.push_back(std::move(tr));
        ts += guard + static_cast<std::int64_t>(rng.below(86400));
        holder = std::move(mid);
      }
      TradeEvent ev;
      ev.nft = nft;
      ev.kind = EventKind::Sale;
      ev.tx_id = "org-" + std::to_string(n) + "-" + std::to_string(h);
      ev.timestamp = ts;
      ev.from = holder;
      ev.to = next;
      ev.usd_price = price;
      ev.collection = coll_name;
      ev.marketplace = "synthmarket";
      out.events.push_back(std::move(ev));
      ts += guard + static_cast<std::int64_t>(rng.below(86400));
      holder = std::move(next);
      price = jitter_price(price, cfg.price_model, rng);
    }
  }

  // plants, each on its own NFT
  std::uint64_t plant_id = 0;
  const Decimal mul_outside = Decimal::parse("1.1");  // 10% per hop, over threshold
  const Decimal mul_cycle = Decimal::parse("1.2");    // keeps cycle plants out of sequence range
  for (const auto& spec : cfg.planted) {
    for (std::uint32_t inst = 0; inst < spec.count; ++inst, ++plant_id) {
      const NftId nft{hex40(0x500000000ull + plant_id), "1"};
      const std::string coll_name = "plantcoll";
      const std::string suffix = spec.within ? "_within" : "_outside";
      std::uint32_t hops = spec.pattern == PlantPattern::SelfLoop  ? 1
                           : spec.pattern == PlantPattern::Cycle2  ? 2
                           : spec.pattern == PlantPattern::Cycle3  ? 3
                                                                   : spec.k;
      std::string cls;
      switch (spec.pattern) {
        case PlantPattern::SelfLoop: cls = "self_loop"; break;
        case PlantPattern::RapidSequence: cls = "sequence" + std::to_string(hops); break;
        default: cls = "cycle" + std::to_string(hops); break;
      }
      cls += suffix;

      std::int64_t ts = kBase + static_cast<std::int64_t>(rng.below(365ull * 86400));
      const std::int64_t step = std::max<std::int64_t>(1, spec.window_seconds / hops);
      Decimal price = jitter_price(cfg.price_model.start_price, cfg.price_model, rng);

      auto push = [&](std::uint32_t i, EventKind kind, std::string from, std::string to,
                      Decimal usd) {
        TradeEvent ev;
        ev.nft = nft;
        ev.kind = kind;
        ev.tx_id = "plant-" + std::to_string(plant_id) + "-" + std::to_string(i);
        ev.timestamp = ts;
        ev.from = std::move(from);
        ev.to = std::move(to);
        if (kind == EventKind::Sale) {
          ev.usd_price = usd;
          ev.marketplace = "synthmarket";
        }
        ev.collection = coll_name;
        out.labels.push_back({ev.tx_id, cls, plant_id});
        out.events.push_back(std::move(ev));
      };

      const bool is_cycle = spec.pattern != PlantPattern::RapidSequence;
      if (spec.pattern == PlantPattern::SelfLoop) {
        // a transfer self-loop is the excluded transfer-only cycle
        push(0, spec.within ? EventKind::Sale : EventKind::Transfer, plant_addr(plant_id, 0),
             plant_addr(plant_id, 0), price);
        continue;
      }
      if (is_cycle) {
        // decoy cycles are all transfers; live ones are sales whose prices
        // move 20% per hop, far outside any sequence deviation
        for (std::uint32_t i = 0; i < hops; ++i) {
          const std::string from = plant_addr(plant_id, i);
          const std::string to = plant_addr(plant_id, (i + 1) % hops);
          push(i, spec.within ? EventKind::Sale : EventKind::Transfer, from, to, price);
          ts += (i + 1 < hops) ? step : 0;
          price = price * mul_cycle;
        }
        continue;
      }
      // rapid sequences: a simple sale path on fresh addresses
      if (spec.within) {
        const Decimal p0 = price;
        for (std::uint32_t i = 0; i < hops; ++i) {
          // deviation vs the initial price walks up to 4%, inside 5%
          const std::int64_t bump = std::min<std::int64_t>(static_cast<std::int64_t>(i), 4) * 100;
          push(i, EventKind::Sale, plant_addr(plant_id, i), plant_addr(plant_id, i + 1),
               p0 * frac_multiplier(bump));
          ts += (i + 1 < hops) ? step : 0;
        }
      } else if (inst % 2 == 0) {
        // price decoy: every hop beyond the first is 10%+ off the start
        for (std::uint32_t i = 0; i < hops; ++i) {
          push(i, EventKind::Sale, plant_addr(plant_id, i), plant_addr(plant_id, i + 1), price);
          ts += (i + 1 < hops) ? step : 0;
          price = price * mul_outside;
        }
      } else {
        // timing decoy: flat price, every gap clears the velocity window
        for (std::uint32_t i = 0; i < hops; ++i) {
          push(i, EventKind::Sale, plant_addr(plant_id, i), plant_addr(plant_id, i + 1), price);
          ts += det.velocity_window_seconds + 600;
        }
      }
    }
  }

  std::sort(out.events.begin(), out.events.end(), event_order_less);
  return out;
}

inline constexpr std::string_view kLabelHeader = "tx_id,pattern_class,plant_id";

inline void write_labels(const std::vector<LabelRow>& labels, std::ostream& out) {
  out << kLabelHeader << '\n';
  std::string buf;
  for (const auto& l : labels) {
    buf.clear();
    csv::append_row(buf, {l.tx_id, l.pattern_class, std::to_string(l.plant_id)});
    out << buf;
  }
}

inline std::vector<LabelRow> read_labels(std::istream& in) {
  if (!in) throw UsageError("labels: stream not readable");
  std::vector<LabelRow> rows;
  std::string line;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == kLabelHeader) continue;
    if (!csv::split(line, fields) || fields.size() != 3) {
      throw DataError("labels line " + std::to_string(line_no) + ": bad row");
    }
    LabelRow r;
    r.tx_id = fields[0];
    r.pattern_class = fields[1];
    r.plant_id = std::stoull(fields[2]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n_collections")) cfg.n_collections = j.at("n_collections").get<std::uint32_t>();
  if (j.contains("n_nfts")) cfg.n_nfts = j.at("n_nfts").get<std::uint32_t>();
  if (j.contains("n_organic_traders")) {
    cfg.n_organic_traders = j.at("n_organic_traders").get<std::uint32_t>();
  }
  if (j.contains("organic_trade_rate")) {
    cfg.organic_trade_rate = j.at("organic_trade_rate").get<std::uint32_t>();
  }
  if (j.contains("price_model")) {
    const auto& pm = j.at("price_model");
    if (pm.contains("start_price")) {
      cfg.price_model.start_price = DetectorConfig::decimal_from_json(pm.at("start_price"), "start_price");
    }
    if (pm.contains("drift")) {
      cfg.price_model.drift = DetectorConfig::decimal_from_json(pm.at("drift"), "drift");
    }
    if (pm.contains("noise")) {
      cfg.price_model.noise = DetectorConfig::decimal_from_json(pm.at("noise"), "noise");
    }
  }
  for (const auto& pj : j.value("planted", nlohmann::json::array())) {
    PlantSpec p;
    const std::string pat = pj.at("pattern").get<std::string>();
    if (pat == "self_loop") {
      p.pattern = PlantPattern::SelfLoop;
    } else if (pat == "cycle2") {
      p.pattern = PlantPattern::Cycle2;
    } else if (pat == "cycle3") {
      p.pattern = PlantPattern::Cycle3;
    } else if (pat == "cycle_k") {
      p.pattern = PlantPattern::CycleK;
    } else if (pat == "sequence") {
      p.pattern = PlantPattern::RapidSequence;
    } else {
      throw DataError("synth config: unknown pattern '" + pat + "'");
    }
    if (pj.contains("k")) p.k = pj.at("k").get<std::uint32_t>();
    if (pj.contains("count")) p.count = pj.at("count").get<std::uint32_t>();
    if (pj.contains("window_seconds")) p.window_seconds = pj.at("window_seconds").get<std::int64_t>();
    if (pj.contains("within")) p.within = pj.at("within").get<bool>();
    cfg.planted.push_back(p);
  }
  return cfg;
}

}  // namespace washscan
