#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "washscan/config.hpp"
#include "washscan/cycle_detector.hpp"
#include "washscan/event_model.hpp"
#include "washscan/graph_builder.hpp"
#include "washscan/metrics.hpp"
#include "washscan/price_oracle.hpp"
#include "washscan/report_io.hpp"
#include "washscan/sequence_detector.hpp"
#include "washscan/types.hpp"
#include "washscan/version.hpp"

namespace washscan {

struct StageTimings {
  std::int64_t parse_ms = 0;
  std::int64_t enrich_ms = 0;
  std::int64_t clean_ms = 0;
  std::int64_t build_ms = 0;
  std::int64_t detect_ms = 0;
  std::int64_t metrics_ms = 0;
  std::int64_t write_ms = 0;
  std::int64_t total_ms = 0;
};

struct RunManifest {
  std::string events_path;
  std::string prices_path;  // empty when none
  std::string config_path;  // empty when defaults
  DetectorConfig config;
  std::uint64_t dataset_digest = 0;
  std::string version = kVersion;
  StageTimings timings;
  std::uint64_t events_kept = 0;
  std::uint64_t events_dropped = 0;
  std::uint64_t graphs = 0;
  std::uint64_t cycles = 0;
  std::uint64_t sequences = 0;
  std::uint64_t truncated_searches = 0;
  std::uint64_t enrich_resolved = 0;
  std::uint64_t enrich_unresolved = 0;
  std::uint64_t enrich_stale = 0;
  unsigned workers = 1;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(m.dataset_digest));
  return {
      {"version", m.version},
      {"inputs",
       {{"events", m.events_path},
        {"prices", m.prices_path.empty() ? nlohmann::json(nullptr) : nlohmann::json(m.prices_path)},
        {"config", m.config_path.empty() ? nlohmann::json(nullptr) : nlohmann::json(m.config_path)}}},
      {"config", m.config.to_json()},
      {"dataset_digest", digest},
      {"workers", m.workers},
      {"counts",
       {{"events_kept", m.events_kept},
        {"events_dropped", m.events_dropped},
        {"graphs", m.graphs},
        {"cycles", m.cycles},
        {"sequences", m.sequences},
        {"truncated_searches", m.truncated_searches}}},
      {"enrich",
       {{"resolved", m.enrich_resolved},
        {"unresolved", m.enrich_unresolved},
        {"stale", m.enrich_stale}}},
      {"timings_ms",
       {{"parse", m.timings.parse_ms},
        {"enrich", m.timings.enrich_ms},
        {"clean", m.timings.clean_ms},
        {"build", m.timings.build_ms},
        {"detect", m.timings.detect_ms},
        {"metrics", m.timings.metrics_ms},
        {"write", m.timings.write_ms},
        {"total", m.timings.total_ms}}},
  };
}

struct DetectOutcome {
  std::vector<CycleFinding> cycles;
  std::vector<SequenceFinding> sequences;
  CycleSearchStats stats;
};

/// Fans graphs out across a bounded pool; per-graph results land in
/// slots indexed by graph position, so the merged order never depends on
/// scheduling. Graphs arrive sorted by nft, hence so do findings.
inline DetectOutcome detect_all(const GraphSet& set, const DetectorConfig& cfg, unsigned workers) {
  const std::size_t n = set.graphs.size();
  if (workers == 0) workers = 1;
  struct Slot {
    std::vector<CycleFinding> cycles;
    std::vector<SequenceFinding> sequences;
    CycleSearchStats stats;
  };
  std::vector<Slot> slots(n);
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&] {
    try {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= n) return;
        const NftGraph& g = set.graphs[i];
        slots[i].cycles = find_cycles(g, cfg, &slots[i].stats);
        slots[i].sequences = find_sequences(g, cfg);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(failure_mu);
      if (!failure) failure = std::current_exception();
      cursor.store(n);
    }
  };

  if (workers == 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  DetectOutcome out;
  for (auto& s : slots) {
    out.stats.truncated_searches += s.stats.truncated_searches;
    // graphs arrive nft-sorted; within a graph, order findings by start
    // time (stable, so extraction order still breaks ties)
    std::stable_sort(s.cycles.begin(), s.cycles.end(),
                     [](const CycleFinding& a, const CycleFinding& b) {
                       return a.start_ts < b.start_ts;
                     });
    std::stable_sort(s.sequences.begin(), s.sequences.end(),
                     [](const SequenceFinding& a, const SequenceFinding& b) {
                       return a.start_ts < b.start_ts;
                     });
    std::move(s.cycles.begin(), s.cycles.end(), std::back_inserter(out.cycles));
    std::move(s.sequences.begin(), s.sequences.end(), std::back_inserter(out.sequences));
  }
  return out;
}

struct DetectOptions {
  std::string events_path;
  std::string prices_path;  // optional
  std::string config_path;  // optional
  std::string out_dir;
  DetectorConfig config;
  unsigned workers = 0;  // 0: hardware concurrency
  bool dump_graphs = false;
};

namespace pipeline_detail {

inline std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(std::string(what) + ": cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

inline std::int64_t ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

}  // namespace pipeline_detail

/// Full batch pipeline: parse, enrich, clean, build graphs, detect in
/// parallel, aggregate, persist everything under out_dir. Returns the
/// manifest that was written.
inline RunManifest run_detect(const DetectOptions& opt) {
  namespace fs = std::filesystem;
  using pipeline_detail::ms_since;
  using pipeline_detail::open_input;
  using pipeline_detail::open_output;
  const auto t_total = std::chrono::steady_clock::now();

  RunManifest m;
  m.events_path = opt.events_path;
  m.prices_path = opt.prices_path;
  m.config_path = opt.config_path;
  m.config = opt.config;
  m.config.validate();
  m.workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());

  fs::create_directories(opt.out_dir);

  auto t0 = std::chrono::steady_clock::now();
  auto in = open_input(opt.events_path, "events");
  ParseResult parsed = parse_events(in);
  m.timings.parse_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  EnrichReport enrich;
  if (!opt.prices_path.empty()) {
    auto pin = open_input(opt.prices_path, "prices");
    PriceTable table = load_price_table(pin);
    enrich = enrich_usd(parsed.events, table);
  }
  m.enrich_resolved = enrich.resolved;
  m.enrich_unresolved = enrich.unresolved;
  m.enrich_stale = enrich.stale;
  m.timings.enrich_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  CleanResult cleaned = clean(std::move(parsed.events), m.config);
  CleaningReport drops;
  drops.kept = cleaned.report.kept;
  drops.dropped = std::move(parsed.report.dropped);
  drops.merge(cleaned.report);
  m.events_kept = cleaned.events.size();
  m.events_dropped = drops.dropped.size();
  m.timings.clean_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  GraphSet graphs = build_graphs(cleaned.events);
  m.dataset_digest = graphs.dataset_digest;
  m.graphs = graphs.graphs.size();
  m.timings.build_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  DetectOutcome detected = detect_all(graphs, m.config, m.workers);
  m.cycles = detected.cycles.size();
  m.sequences = detected.sequences.size();
  m.truncated_searches = detected.stats.truncated_searches;
  m.timings.detect_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  MarketReport report = build_report(detected.cycles, detected.sequences, cleaned.events);
  m.timings.metrics_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  const fs::path out(opt.out_dir);
  {
    auto f = open_output(out / "findings.csv");
    auto e = open_output(out / "finding_edges.csv");
    write_findings({detected.cycles, detected.sequences}, f, e);
  }
  {
    auto f = open_output(out / "cleaning.csv");
    write_cleaning_report(drops, f);
  }
  {
    auto f = open_output(out / "report.json");
    f << report_to_json(report).dump(2) << '\n';
  }
  {
    auto f = open_output(out / "report.txt");
    f << render_report_text(report);
  }
  {
    auto f = open_output(out / "fig3_elapsed.csv");
    write_fig3(report.buckets, f);
  }
  {
    auto f = open_output(out / "fig4_lifetime.csv");
    write_fig4(report.lifetime, f);
  }
  {
    auto f = open_output(out / "fig5_partners.csv");
    write_fig5(report.partners, f);
  }
  if (opt.dump_graphs) {
    auto f = open_output(out / "graphs.txt");
    dump_graphs(graphs, f);
  }
  m.timings.write_ms = ms_since(t0);

  m.timings.total_ms = ms_since(t_total);
  {
    auto f = open_output(out / "manifest.json");
    f << manifest_to_json(m).dump(2) << '\n';
  }
  return m;
}

/// Re-renders report.txt and the fig CSVs from the stored findings and
/// report.json, without touching the source dataset. Stored findings are
/// revalidated and the finding-derived report sections recomputed and
/// cross-checked, so tampering in either file surfaces as
/// ValidationError.
inline void run_report(const std::string& dir) {
  namespace fs = std::filesystem;
  using pipeline_detail::open_output;
  const fs::path base(dir);
  for (const char* name : {"manifest.json", "findings.csv", "finding_edges.csv", "report.json"}) {
    if (!fs::exists(base / name)) {
      throw UsageError("report: missing " + (base / name).string());
    }
  }

  nlohmann::json manifest_json;
  {
    std::ifstream in(base / "manifest.json");
    in >> manifest_json;
  }
  DetectorConfig cfg = DetectorConfig::from_json(manifest_json.at("config"));
  cfg.validate();

  FindingsBundle bundle;
  {
    std::ifstream rows(base / "findings.csv", std::ios::binary);
    std::ifstream edges(base / "finding_edges.csv", std::ios::binary);
    bundle = read_findings(rows, edges);
  }
  validate_findings(bundle, cfg);

  nlohmann::json report_json;
  {
    std::ifstream in(base / "report.json");
    in >> report_json;
  }
  MarketReport stored = report_from_json(report_json);

  // finding-derived sections must agree with the stored report
  const FlagSet flags = flag_union(bundle.cycles, bundle.sequences);
  auto fail = [](const std::string& what) -> ValidationError {
    return ValidationError("report: stored report disagrees with findings: " + what);
  };
  if (stored.totals.addresses.flagged != flags.addresses.size()) throw fail("flagged addresses");
  if (stored.totals.transactions.flagged != flags.sale_tx_ids.size()) {
    throw fail("flagged transactions");
  }
  if (stored.totals.nfts.flagged != flags.nfts.size()) throw fail("flagged nfts");
  if (stored.totals.volume.flagged != flags.usd_volume) throw fail("flagged volume");
  if (stored.split != cyclic_sequential_split(bundle.cycles, bundle.sequences)) {
    throw fail("cyclic/sequential split");
  }
  if (stored.cycle_classes != cycle_length_distribution(bundle.cycles)) {
    throw fail("cycle class distribution");
  }
  if (stored.buckets != elapsed_buckets(bundle.cycles)) throw fail("elapsed buckets");
  if (stored.median_by_length != median_duration_by_length(bundle.cycles)) {
    throw fail("median durations");
  }
  Decimal coll_sum;
  for (const auto& c : stored.collections) coll_sum = coll_sum + c.flagged_usd;
  if (coll_sum != flags.usd_volume) throw fail("per-collection volume conservation");

  {
    auto f = open_output(base / "report.txt");
    f << render_report_text(stored);
  }
  {
    auto f = open_output(base / "fig3_elapsed.csv");
    write_fig3(stored.buckets, f);
  }
  {
    auto f = open_output(base / "fig4_lifetime.csv");
    write_fig4(stored.lifetime, f);
  }
  {
    auto f = open_output(base / "fig5_partners.csv");
    write_fig5(stored.partners, f);
  }
}

}  // namespace washscan
