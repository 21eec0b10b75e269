#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "washscan/config.hpp"
#include "washscan/cycle_detector.hpp"
#include "washscan/graph_builder.hpp"
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

std::vector<std::vector<std::string>> tx_walks(const std::vector<CycleFinding>& findings) {
  std::vector<std::vector<std::string>> out;
  for (const auto& f : findings) {
    std::vector<std::string> txs;
    for (const auto& e : f.edges) txs.push_back(e.tx_id);
    out.push_back(std::move(txs));
  }
  return out;
}

void check_finding_invariants(const CycleFinding& f) {
  REQUIRE(f.length() >= 1);
  REQUIRE(f.sale_count >= 1);
  REQUIRE(f.edges.size() == f.addresses.size());
  // closed walk
  for (std::size_t i = 0; i < f.edges.size(); ++i) {
    const auto& next = f.edges[(i + 1) % f.edges.size()];
    REQUIRE(f.edges[i].to == next.from);
    REQUIRE(f.addresses[i] == f.edges[i].from);
  }
  // strictly increasing timestamps
  for (std::size_t i = 1; i < f.edges.size(); ++i) {
    REQUIRE(f.edges[i - 1].timestamp < f.edges[i].timestamp);
  }
  // elementary: addresses pairwise distinct
  std::set<std::string> uniq(f.addresses.begin(), f.addresses.end());
  REQUIRE(uniq.size() == f.addresses.size());
  REQUIRE(f.start_ts == f.edges.front().timestamp);
  REQUIRE(f.end_ts == f.edges.back().timestamp);
  Decimal vol;
  std::size_t sales = 0;
  for (const auto& e : f.edges) {
    if (e.kind == EventKind::Sale) {
      vol = vol + e.usd_weight;
      ++sales;
    }
  }
  REQUIRE(vol == f.usd_volume);
  REQUIRE(sales == f.sale_count);
}

}  // namespace

TEST_CASE("a lone sale has no cycle") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 1}});
  CHECK(find_cycles(g, cfg).empty());
}

TEST_CASE("two opposing sales form one two-edge cycle") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 1}, {"B", "A", 2}});
  auto found = find_cycles(g, cfg);
  REQUIRE(found.size() == 1);
  check_finding_invariants(found[0]);
  CHECK(found[0].length() == 2);
  CHECK(found[0].sale_count == 2);
  CHECK(found[0].usd_volume == Decimal::parse("200"));
  CHECK(classify_cycle(found[0]) == CycleClass::TwoTx);
}

TEST_CASE("a self-directed sale is a length-one cycle") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "A", 1}});
  auto found = find_cycles(g, cfg);
  REQUIRE(found.size() == 1);
  check_finding_invariants(found[0]);
  CHECK(found[0].length() == 1);
  CHECK(classify_cycle(found[0]) == CycleClass::SelfLoop);
}

TEST_CASE("transfer-only cycles are excluded") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 1, EventKind::Transfer}, {"B", "A", 2, EventKind::Transfer}});
  CHECK(find_cycles(g, cfg).empty());
  auto loop = make_graph({{"A", "A", 1, EventKind::Transfer}});
  CHECK(find_cycles(loop, cfg).empty());
}

TEST_CASE("mixed sale and transfer cycles are flagged") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 1}, {"B", "A", 2, EventKind::Transfer}});
  auto found = find_cycles(g, cfg);
  REQUIRE(found.size() == 1);
  check_finding_invariants(found[0]);
  CHECK(found[0].sale_count == 1);
  CHECK(found[0].usd_volume == Decimal::parse("100"));
}

TEST_CASE("overlapping activity splits into two sub-cycles distinct by time") {
  DetectorConfig cfg;
  auto g = make_graph({
      {"B", "C", 1},  // t00
      {"C", "B", 2},  // t01
      {"B", "C", 3},  // t02
      {"C", "D", 4},  // t03
      {"D", "B", 5},  // t04
  });
  auto found = find_cycles(g, cfg);
  REQUIRE(found.size() == 2);
  for (const auto& f : found) check_finding_invariants(f);

  auto walks = tx_walks(found);
  std::sort(walks.begin(), walks.end());
  const std::vector<std::vector<std::string>> want = {{"t00", "t01"}, {"t02", "t03", "t04"}};
  CHECK(walks == want);

  std::set<std::string> addrs2(found[0].addresses.begin(), found[0].addresses.end());
  std::set<std::string> addrs3(found[1].addresses.begin(), found[1].addresses.end());
  CHECK(addrs2 == std::set<std::string>{"B", "C"});
  CHECK(addrs3 == std::set<std::string>{"B", "C", "D"});
}

TEST_CASE("multi-edges between one pair yield distinct cycles") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 1}, {"B", "A", 2}, {"A", "B", 3}, {"B", "A", 4}});
  auto found = find_cycles(g, cfg);
  REQUIRE(found.size() == 2);
  auto walks = tx_walks(found);
  std::sort(walks.begin(), walks.end());
  CHECK(walks == std::vector<std::vector<std::string>>{{"t00", "t01"}, {"t02", "t03"}});
}

TEST_CASE("equal timestamps never chain") {
  DetectorConfig cfg;
  auto g = make_graph({{"A", "B", 5}, {"B", "A", 5}});
  CHECK(find_cycles(g, cfg).empty());
}

TEST_CASE("max_cycle_len prunes silently and counts the truncation") {
  DetectorConfig cfg;
  cfg.max_cycle_len = 3;
  // one clean 4-cycle; at bound 3 nothing closes but searches get cut
  auto g = make_graph({{"A", "B", 1}, {"B", "C", 2}, {"C", "D", 3}, {"D", "A", 4}});
  CycleSearchStats stats;
  auto found = find_cycles(g, cfg, &stats);
  CHECK(found.empty());
  CHECK(stats.truncated_searches > 0);

  cfg.max_cycle_len = 4;
  CycleSearchStats stats4;
  auto found4 = find_cycles(g, cfg, &stats4);
  REQUIRE(found4.size() == 1);
  CHECK(found4[0].length() == 4);
  CHECK(classify_cycle(found4[0]) == CycleClass::MoreThanThree);
  CHECK(stats4.truncated_searches == 0);
}

TEST_CASE("truncation counter stays quiet on short cycles") {
  DetectorConfig cfg;
  cfg.max_cycle_len = 2;
  auto g = make_graph({{"A", "B", 1}, {"B", "A", 2}});
  CycleSearchStats stats;
  auto found = find_cycles(g, cfg, &stats);
  CHECK(found.size() == 1);
  CHECK(stats.truncated_searches == 0);
}

TEST_CASE("detection is deterministic") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    auto g = gen::random_graph(seed);
    DetectorConfig cfg;
    auto a = find_cycles(g, cfg);
    auto b = find_cycles(g, cfg);
    REQUIRE(tx_walks(a) == tx_walks(b));
  }
}

TEST_CASE("extracted cycles are edge-disjoint and well-formed") {
  for (std::uint64_t seed = 200; seed < 260; ++seed) {
    auto g = gen::random_graph(seed);
    DetectorConfig cfg;
    auto found = find_cycles(g, cfg);
    std::set<std::string> used;
    for (const auto& f : found) {
      check_finding_invariants(f);
      for (const auto& e : f.edges) {
        CAPTURE(seed);
        REQUIRE(used.insert(e.tx_id).second);  // no edge in two findings
      }
    }
  }
}

TEST_CASE("extraction equals the exhaustive greedy oracle on random multigraphs") {
  DetectorConfig cfg;
  std::size_t nonempty = 0;
  for (std::uint64_t seed = 1000; seed < 1250; ++seed) {
    auto g = gen::random_graph(seed);
    auto got = tx_walks(find_cycles(g, cfg));
    auto want = oracle::cycles(g, cfg);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CAPTURE(seed, g.edges.size());
    REQUIRE(got == want);
    if (!got.empty()) ++nonempty;
  }
  // the corpus must actually exercise the detector
  REQUIRE(nonempty > 50);
}

TEST_CASE("oracle equivalence holds under tight length bounds") {
  DetectorConfig cfg;
  for (int len : {1, 2, 3}) {
    cfg.max_cycle_len = len;
    for (std::uint64_t seed = 2000; seed < 2060; ++seed) {
      auto g = gen::random_graph(seed);
      auto got = tx_walks(find_cycles(g, cfg));
      auto want = oracle::cycles(g, cfg);
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      CAPTURE(len, seed);
      REQUIRE(got == want);
    }
  }
}

TEST_CASE("classification buckets by length") {
  CycleFinding f;
  f.edges.resize(1);
  CHECK(classify_cycle(f) == CycleClass::SelfLoop);
  f.edges.resize(2);
  CHECK(classify_cycle(f) == CycleClass::TwoTx);
  f.edges.resize(3);
  CHECK(classify_cycle(f) == CycleClass::ThreeTx);
  f.edges.resize(5);
  CHECK(classify_cycle(f) == CycleClass::MoreThanThree);
  CHECK(std::string(to_string(CycleClass::SelfLoop)) == "self_loop");
  CHECK(std::string(to_string(CycleClass::MoreThanThree)) == "more_than_three");
}
