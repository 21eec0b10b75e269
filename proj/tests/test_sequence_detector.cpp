#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "washscan/config.hpp"
#include "washscan/graph_builder.hpp"
#include "washscan/sequence_detector.hpp"
#include "washscan/types.hpp"

#include "generators.hpp"
#include "oracles.hpp"

using namespace washscan;

namespace {

struct Spec {
  std::string from, to;
  std::int64_t ts;
  EventKind kind = EventKind::Sale;
  const char* usd = "100";
};

NftGraph make_graph(const std::vector<Spec>& specs) {
  std::vector<TradeEvent> events;
  int i = 0;
  for (const auto& s : specs) {
    TradeEvent e;
    e.nft = NftId{"c0", "1"};
    e.kind = s.kind;
    char tx[8];
    std::snprintf(tx, sizeof tx, "t%02d", i++);
    e.tx_id = tx;
    e.timestamp = s.ts;
    e.from = s.from;
    e.to = s.to;
    if (s.kind == EventKind::Sale) e.usd_price = Decimal::parse(s.usd);
    e.collection = "c";
    events.push_back(std::move(e));
  }
  return build_graphs(events).graphs.at(0);
}

std::vector<std::vector<std::string>> tx_paths(const std::vector<SequenceFinding>& findings) {
  std::vector<std::vector<std::string>> out;
  for (const auto& f : findings) {
    std::vector<std::string> txs;
    for (const auto& e : f.edges) txs.push_back(e.tx_id);
    out.push_back(std::move(txs));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_finding_invariants(const SequenceFinding& f, const DetectorConfig& cfg) {
  REQUIRE(f.length() >= static_cast<std::size_t>(cfg.min_sequence_len));
  REQUIRE(f.addresses.size() == f.edges.size() + 1);
  REQUIRE(f.addresses.front() == f.edges.front().from);
  for (std::size_t i = 0; i < f.edges.size(); ++i) {
    REQUIRE(f.edges[i].kind == EventKind::Sale);
    REQUIRE(f.addresses[i + 1] == f.edges[i].to);
    if (i > 0) {
      REQUIRE(f.edges[i - 1].to == f.edges[i].from);
      REQUIRE(f.edges[i - 1].timestamp < f.edges[i].timestamp);
    }
  }
  std::set<std::string> uniq(f.addresses.begin(), f.addresses.end());
  REQUIRE(uniq.size() == f.addresses.size());
  REQUIRE(f.end_ts - f.start_ts < cfg.velocity_window_seconds);
  REQUIRE(f.max_deviation_fraction <= cfg.max_price_deviation);
  REQUIRE(f.initial_usd == f.edges.front().usd_weight);
}

constexpr std::int64_t kH = 3600;

}  // namespace

TEST_CASE("a fast low-risk resale chain reports the full path and its rooted tails") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                       {"B", "C", kH, EventKind::Sale, "102"},
                       {"C", "D", 2 * kH, EventKind::Sale, "98"}});
  auto found = find_sequences(g, cfg);
  // The walk rooted at A reaches D; the walk rooted at B is its own
  // qualifying leaf (p0 = 102 there). The tail rooted at C is too short.
  REQUIRE(found.size() == 2);
  for (const auto& f : found) check_finding_invariants(f, cfg);
  CHECK(found[0].length() == 3);
  CHECK(found[0].usd_volume == Decimal::parse("300"));
  CHECK(found[0].initial_usd == Decimal::parse("100"));
  CHECK(found[0].max_deviation_fraction == Decimal::parse("0.02"));
  CHECK(found[1].length() == 2);
  CHECK(found[1].initial_usd == Decimal::parse("102"));
  CHECK(found[1].addresses == std::vector<std::string>{"B", "C", "D"});
}

TEST_CASE("elapsed exactly at the window is out, one second less is in") {
  DetectorConfig cfg;  // 12h window
  auto at_window = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 12 * kH, EventKind::Sale, "100"}});
  CHECK(find_sequences(at_window, cfg).empty());

  auto inside = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 12 * kH - 1, EventKind::Sale, "100"}});
  CHECK(find_sequences(inside, cfg).size() == 1);
}

TEST_CASE("deviation exactly at five percent is in, one raw unit more is out") {
  DetectorConfig cfg;
  auto exact = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 1, EventKind::Sale, "105"}});
  auto found = find_sequences(exact, cfg);
  REQUIRE(found.size() == 1);
  CHECK(found[0].max_deviation_fraction == Decimal::parse("0.05"));

  auto low = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 1, EventKind::Sale, "95"}});
  CHECK(find_sequences(low, cfg).size() == 1);

  auto over = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 1, EventKind::Sale, "105.00000001"}});
  CHECK(find_sequences(over, cfg).empty());

  auto under = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 1, EventKind::Sale, "94.99999999"}});
  CHECK(find_sequences(under, cfg).empty());
}

TEST_CASE("deviation is measured against the initial price, not the previous sale") {
  DetectorConfig cfg;
  // each hop moves 4% off the previous price but the second hop breaches
  // the 5% corridor around the initial price
  auto g = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                       {"B", "C", 1, EventKind::Sale, "104"},
                       {"C", "D", 2, EventKind::Sale, "108.16"}});
  auto found = find_sequences(g, cfg);
  // no three-edge path: 108.16 is 8.16% off the first price even though
  // each hop moves only 4%. The tail rooted at the 104 sale qualifies on
  // its own (108.16 is 4% off 104), so two overlapping pairs report.
  auto paths = tx_paths(found);
  CHECK(paths == std::vector<std::vector<std::string>>{{"t00", "t01"}, {"t01", "t02"}});
  for (const auto& f : found) CHECK(f.length() == 2);
}

TEST_CASE("a transfer between two sales breaks the sequence") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                       {"B", "X", 50, EventKind::Transfer},
                       {"B", "C", 100, EventKind::Sale, "100"}});
  CHECK(find_sequences(g, cfg).empty());

  // at the same instant as a sale, the transfer is not strictly between
  auto boundary = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                              {"B", "X", 100, EventKind::Transfer},
                              {"B", "C", 100 + 1, EventKind::Sale, "100"}});
  CHECK(find_sequences(boundary, cfg).empty());
  auto at_sale = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                             {"B", "X", 0, EventKind::Transfer},
                             {"B", "C", 100, EventKind::Sale, "100"}});
  CHECK(find_sequences(at_sale, cfg).size() == 1);
}

TEST_CASE("revisiting an address ends the path") {
  DetectorConfig cfg;
  // C -> A would revisit A, so the path stops at C
  auto g = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                       {"B", "C", 1, EventKind::Sale, "100"},
                       {"C", "A", 2, EventKind::Sale, "100"}});
  auto found = find_sequences(g, cfg);
  // the A->B->C prefix reports, and so does the B->C->A tail rooted at t01
  auto paths = tx_paths(found);
  REQUIRE(paths == std::vector<std::vector<std::string>>{{"t00", "t01"}, {"t01", "t02"}});
  for (const auto& f : found) check_finding_invariants(f, cfg);
}

TEST_CASE("self-loop sales neither start nor extend sequences") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "A", 0, EventKind::Sale, "100"},
                       {"A", "B", 1, EventKind::Sale, "100"},
                       {"B", "B", 2, EventKind::Sale, "100"},
                       {"B", "C", 3, EventKind::Sale, "100"}});
  auto found = find_sequences(g, cfg);
  REQUIRE(found.size() == 1);
  CHECK(tx_paths(found) == std::vector<std::vector<std::string>>{{"t01", "t03"}});
}

TEST_CASE("reported paths are never prefixes of other reported paths") {
  DetectorConfig cfg;
  for (std::uint64_t seed = 300; seed < 360; ++seed) {
    auto g = gen::random_graph(seed);
    auto found = find_sequences(g, cfg);
    auto paths = tx_paths(found);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (std::size_t j = 0; j < paths.size(); ++j) {
        if (i == j) continue;
        const bool is_prefix = paths[i].size() < paths[j].size() &&
                               std::equal(paths[i].begin(), paths[i].end(), paths[j].begin());
        CAPTURE(seed, i, j);
        REQUIRE_FALSE(is_prefix);
      }
    }
    for (const auto& f : found) check_finding_invariants(f, cfg);
  }
}

TEST_CASE("min_sequence_len raises the reporting bar without changing qualification") {
  DetectorConfig cfg;
  cfg.min_sequence_len = 3;
  auto two = make_graph(
      {{"A", "B", 0, EventKind::Sale, "100"}, {"B", "C", 1, EventKind::Sale, "100"}});
  CHECK(find_sequences(two, cfg).empty());
  auto three = make_graph({{"A", "B", 0, EventKind::Sale, "100"},
                           {"B", "C", 1, EventKind::Sale, "100"},
                           {"C", "D", 2, EventKind::Sale, "100"}});
  auto found = find_sequences(three, cfg);
  REQUIRE(found.size() == 1);
  CHECK(found[0].length() == 3);
}

TEST_CASE("zero-price roots only chain zero-price sales") {
  DetectorConfig cfg;
  cfg.drop_zero_price = false;
  auto g = make_graph({{"A", "B", 0, EventKind::Sale, "0"},
                       {"B", "C", 1, EventKind::Sale, "0"},
                       {"C", "D", 2, EventKind::Sale, "1"}});
  auto found = find_sequences(g, cfg);
  REQUIRE_FALSE(found.empty());
  auto paths = tx_paths(found);
  CHECK(std::find(paths.begin(), paths.end(), std::vector<std::string>{"t00", "t01"}) !=
        paths.end());
}

TEST_CASE("sequence detection is deterministic") {
  for (std::uint64_t seed = 400; seed < 410; ++seed) {
    auto g = gen::random_graph(seed);
    DetectorConfig cfg;
    auto a = find_sequences(g, cfg);
    auto b = find_sequences(g, cfg);
    REQUIRE(tx_paths(a) == tx_paths(b));
  }
}

TEST_CASE("sequence search equals the exhaustive path oracle on random multigraphs") {
  std::size_t nonempty = 0;
  for (std::uint64_t seed = 5000; seed < 5250; ++seed) {
    auto g = gen::random_graph(seed);
    DetectorConfig cfg;
    cfg.velocity_window_seconds = 20;  // the generator's 40-tick range, halved
    cfg.max_price_deviation = Decimal::parse("0.08");
    auto got = tx_paths(find_sequences(g, cfg));
    auto want = oracle::sequences(g, cfg);
    CAPTURE(seed, g.edges.size());
    REQUIRE(got == want);
    if (!got.empty()) ++nonempty;
  }
  REQUIRE(nonempty > 30);
}

TEST_CASE("oracle equivalence holds at default thresholds too") {
  DetectorConfig cfg;
  for (std::uint64_t seed = 6000; seed < 6100; ++seed) {
    auto g = gen::random_graph(seed);
    auto got = tx_paths(find_sequences(g, cfg));
    auto want = oracle::sequences(g, cfg);
    CAPTURE(seed);
    REQUIRE(got == want);
  }
}
