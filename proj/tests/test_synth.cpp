#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "washscan/config.hpp"
#include "washscan/event_model.hpp"
#include "washscan/graph_builder.hpp"
#include "washscan/metrics.hpp"
#include "washscan/pipeline.hpp"
#include "washscan/synth.hpp"

using namespace washscan;

namespace {

std::string render(const SynthResult& r) {
  std::ostringstream ev;
  serialize_events(r.events, ev);
  std::ostringstream lb;
  write_labels(r.labels, lb);
  return ev.str() + "\x1f" + lb.str();
}

SynthConfig organic_cfg(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.n_collections = 3;
  cfg.n_nfts = 40;
  cfg.n_organic_traders = 30;
  cfg.organic_trade_rate = 4;
  return cfg;
}

}  // namespace

TEST_CASE("same seed reproduces the trace byte for byte") {
  auto cfg = organic_cfg(11);
  cfg.planted.push_back({PlantPattern::Cycle3, 0, 2, 3600, true});
  cfg.planted.push_back({PlantPattern::RapidSequence, 4, 2, 3600, false});
  DetectorConfig det;
  auto a = generate(cfg, det);
  auto b = generate(cfg, det);
  CHECK(render(a) == render(b));

  cfg.seed = 12;
  auto c = generate(cfg, det);
  CHECK(render(a) != render(c));
}

TEST_CASE("events come out sorted and parse back in") {
  auto cfg = organic_cfg(21);
  cfg.planted.push_back({PlantPattern::Cycle2, 0, 3, 3600, true});
  DetectorConfig det;
  auto r = generate(cfg, det);
  REQUIRE_FALSE(r.events.empty());
  CHECK(std::is_sorted(r.events.begin(), r.events.end(), event_order_less));

  std::ostringstream os;
  serialize_events(r.events, os);
  std::istringstream is(os.str());
  auto parsed = parse_events(is);
  CHECK(parsed.report.dropped.empty());
  REQUIRE(parsed.events.size() == r.events.size());
  CHECK(parsed.events == r.events);
}

TEST_CASE("no plants means no labels") {
  auto cfg = organic_cfg(31);
  DetectorConfig det;
  auto r = generate(cfg, det);
  CHECK(r.labels.empty());
  REQUIRE_FALSE(r.events.empty());
}

TEST_CASE("organic background triggers neither detector") {
  DetectorConfig det;
  for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
    auto r = generate(organic_cfg(seed), det);
    auto set = build_graphs(r.events);
    auto outcome = detect_all(set, det, 1);
    CAPTURE(seed);
    CHECK(outcome.cycles.empty());
    CHECK(outcome.sequences.empty());
  }
}

TEST_CASE("within plants are exactly the flagged transactions, decoys never are") {
  SynthConfig cfg = organic_cfg(51);
  cfg.planted.push_back({PlantPattern::SelfLoop, 0, 3, 3600, true});
  cfg.planted.push_back({PlantPattern::SelfLoop, 0, 2, 3600, false});
  cfg.planted.push_back({PlantPattern::Cycle2, 0, 3, 3600, true});
  cfg.planted.push_back({PlantPattern::Cycle2, 0, 2, 3600, false});
  cfg.planted.push_back({PlantPattern::Cycle3, 0, 3, 7200, true});
  cfg.planted.push_back({PlantPattern::CycleK, 5, 2, 7200, true});
  cfg.planted.push_back({PlantPattern::CycleK, 6, 2, 7200, false});
  cfg.planted.push_back({PlantPattern::RapidSequence, 4, 3, 3600, true});
  cfg.planted.push_back({PlantPattern::RapidSequence, 3, 4, 3600, false});
  DetectorConfig det;

  auto r = generate(cfg, det);
  std::size_t want_labels = 3 * 1 + 2 * 1 + 3 * 2 + 2 * 2 + 3 * 3 + 2 * 5 + 2 * 6 + 3 * 4 + 4 * 3;
  REQUIRE(r.labels.size() == want_labels);

  std::set<std::string> within;
  std::set<std::string> decoy;
  for (const auto& l : r.labels) {
    const bool in = l.pattern_class.size() > 7 &&
                    l.pattern_class.compare(l.pattern_class.size() - 7, 7, "_within") == 0;
    (in ? within : decoy).insert(l.tx_id);
  }
  REQUIRE_FALSE(within.empty());
  REQUIRE_FALSE(decoy.empty());

  auto set = build_graphs(r.events);
  auto outcome = detect_all(set, det, 1);
  auto flags = flag_union(outcome.cycles, outcome.sequences);
  std::set<std::string> flagged(flags.sale_tx_ids.begin(), flags.sale_tx_ids.end());
  CHECK(flagged == within);
}

TEST_CASE("plant validation rejects impossible shapes") {
  DetectorConfig det;
  SynthConfig cfg;  // no organic background needed

  SECTION("window too small for the hops") {
    cfg.planted.push_back({PlantPattern::Cycle3, 0, 1, 2, true});
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("k exceeds the address budget") {
    cfg.planted.push_back({PlantPattern::CycleK, 1001, 1, 2000, true});
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("cycle_k below four edges") {
    cfg.planted.push_back({PlantPattern::CycleK, 3, 1, 3600, true});
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("sequence below two hops") {
    cfg.planted.push_back({PlantPattern::RapidSequence, 1, 1, 3600, true});
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("within sequence spans past the velocity window") {
    cfg.planted.push_back({PlantPattern::RapidSequence, 2, 1, 100000, true});
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("within sequence prices cannot fit the deviation") {
    det.max_price_deviation = Decimal::parse("0.03");
    cfg.planted.push_back({PlantPattern::RapidSequence, 5, 1, 3600, true});
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("the same shape as a decoy is fine") {
    det.max_price_deviation = Decimal::parse("0.03");
    cfg.planted.push_back({PlantPattern::RapidSequence, 5, 1, 3600, false});
    CHECK_NOTHROW(generate(cfg, det));
  }
}

TEST_CASE("background validation rejects bad knobs") {
  DetectorConfig det;
  SECTION("too few traders for the longest chain") {
    auto cfg = organic_cfg(1);
    cfg.n_organic_traders = 5;
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("zero collections with nfts") {
    auto cfg = organic_cfg(1);
    cfg.n_collections = 0;
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("non-positive start price") {
    auto cfg = organic_cfg(1);
    cfg.price_model.start_price = Decimal{};
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("drift out of range") {
    auto cfg = organic_cfg(1);
    cfg.price_model.drift = Decimal::from_int(1);
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
  SECTION("noise out of range") {
    auto cfg = organic_cfg(1);
    cfg.price_model.noise = Decimal::parse("0.5");
    CHECK_THROWS_AS(generate(cfg, det), DataError);
  }
}

TEST_CASE("label io round-trips") {
  std::vector<LabelRow> labels = {{"plant-0-0", "cycle2_within", 0},
                                  {"plant-0-1", "cycle2_within", 0},
                                  {"plant-1-0", "sequence3_outside", 1}};
  std::ostringstream os;
  write_labels(labels, os);
  std::istringstream is(os.str());
  auto back = read_labels(is);
  REQUIRE(back.size() == 3);
  CHECK(back[0].tx_id == "plant-0-0");
  CHECK(back[0].pattern_class == "cycle2_within");
  CHECK(back[2].plant_id == 1);

  std::istringstream bad("tx_id,pattern_class,plant_id\nonly,two\n");
  CHECK_THROWS_AS(read_labels(bad), DataError);
}

TEST_CASE("synth config parses from json") {
  auto j = nlohmann::json::parse(R"({
    "seed": 7,
    "n_collections": 2,
    "n_nfts": 10,
    "n_organic_traders": 20,
    "organic_trade_rate": 3,
    "price_model": {"start_price": "250.5", "drift": "0.02", "noise": "0.1"},
    "planted": [
      {"pattern": "cycle3", "count": 4, "window_seconds": 1800, "within": true},
      {"pattern": "sequence", "k": 5, "count": 2, "within": false},
      {"pattern": "self_loop"},
      {"pattern": "cycle_k", "k": 7}
    ]
  })");
  auto cfg = synth_config_from_json(j);
  CHECK(cfg.seed == 7);
  CHECK(cfg.n_collections == 2);
  CHECK(cfg.n_nfts == 10);
  CHECK(cfg.n_organic_traders == 20);
  CHECK(cfg.organic_trade_rate == 3);
  CHECK(cfg.price_model.start_price == Decimal::parse("250.5"));
  CHECK(cfg.price_model.drift == Decimal::parse("0.02"));
  CHECK(cfg.price_model.noise == Decimal::parse("0.1"));
  REQUIRE(cfg.planted.size() == 4);
  CHECK(cfg.planted[0].pattern == PlantPattern::Cycle3);
  CHECK(cfg.planted[0].count == 4);
  CHECK(cfg.planted[0].window_seconds == 1800);
  CHECK(cfg.planted[0].within);
  CHECK(cfg.planted[1].pattern == PlantPattern::RapidSequence);
  CHECK(cfg.planted[1].k == 5);
  CHECK_FALSE(cfg.planted[1].within);
  CHECK(cfg.planted[2].pattern == PlantPattern::SelfLoop);
  CHECK(cfg.planted[3].pattern == PlantPattern::CycleK);
  CHECK(cfg.planted[3].k == 7);

  auto bad = nlohmann::json::parse(R"({"planted": [{"pattern": "mystery"}]})");
  CHECK_THROWS_AS(synth_config_from_json(bad), DataError);

  auto defaults = synth_config_from_json(nlohmann::json::object());
  CHECK(defaults.seed == 1);
  CHECK(defaults.planted.empty());
}
