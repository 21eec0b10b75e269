// washscan: batch forensics over NFT trade event logs.
//
//   washscan detect --events trades.csv --out results/
//   washscan synth  --config plants.json --out trace/
//   washscan report --out results/
//
// Exit codes: 0 success, 64 usage, 65 bad data, 66 failed validation,
// 70 internal error.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "washscan/config.hpp"
#include "washscan/pipeline.hpp"
#include "washscan/synth.hpp"
#include "washscan/types.hpp"
#include "washscan/version.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitValidation = 66;
constexpr int kExitInternal = 70;

nlohmann::json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw washscan::UsageError(std::string(what) + ": cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw washscan::DataError(std::string(what) + ": " + path + ": " + e.what());
  }
  return j;
}

struct ThresholdFlags {
  double velocity_hours = 12.0;
  std::string max_deviation = "0.05";
  int max_cycle_len = 32;
  int min_sequence_len = 2;
  bool keep_zero_price = false;

  CLI::Option* velocity_opt = nullptr;
  CLI::Option* deviation_opt = nullptr;
  CLI::Option* cycle_len_opt = nullptr;
  CLI::Option* seq_len_opt = nullptr;
  CLI::Option* keep_zero_opt = nullptr;

  void attach(CLI::App& cmd) {
    velocity_opt = cmd.add_option("--velocity-hours", velocity_hours,
                                  "Rapid-sequence window in hours (default 12)")
                       ->envname("WASHSCAN_VELOCITY_HOURS");
    deviation_opt = cmd.add_option("--max-deviation", max_deviation,
                                   "Max price deviation fraction for sequences (default 0.05)")
                        ->envname("WASHSCAN_MAX_DEVIATION");
    cycle_len_opt = cmd.add_option("--max-cycle-len", max_cycle_len,
                                   "Longest cycle searched for, in edges (default 32)")
                        ->envname("WASHSCAN_MAX_CYCLE_LEN");
    seq_len_opt = cmd.add_option("--min-sequence-len", min_sequence_len,
                                 "Shortest reportable sequence, in sales (default 2)")
                      ->envname("WASHSCAN_MIN_SEQUENCE_LEN");
    keep_zero_opt = cmd.add_flag("--keep-zero-price", keep_zero_price,
                                 "Keep zero-priced sales instead of dropping them")
                        ->envname("WASHSCAN_KEEP_ZERO_PRICE");
  }

  // precedence: built-in defaults, then the config file, then any flag or
  // environment override the user actually set
  washscan::DetectorConfig resolve(const std::string& config_path) const {
    washscan::DetectorConfig cfg;
    if (!config_path.empty()) {
      cfg = washscan::DetectorConfig::from_json(load_json_file(config_path, "config"));
    }
    if (velocity_opt->count()) {
      cfg.velocity_window_seconds = static_cast<std::int64_t>(velocity_hours * 3600.0 + 0.5);
    }
    if (deviation_opt->count()) {
      auto d = washscan::Decimal::try_parse(max_deviation);
      if (!d) throw washscan::UsageError("--max-deviation: not a decimal: " + max_deviation);
      cfg.max_price_deviation = *d;
    }
    if (cycle_len_opt->count()) cfg.max_cycle_len = max_cycle_len;
    if (seq_len_opt->count()) cfg.min_sequence_len = min_sequence_len;
    if (keep_zero_opt->count()) cfg.drop_zero_price = !keep_zero_price;
    cfg.validate();
    return cfg;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"NFT wash-trade forensics over event logs"};
  app.set_version_flag("--version", std::string("washscan ") + washscan::kVersion);
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Run the full detection pipeline");
  std::string events_path, prices_path, config_path, out_dir;
  unsigned workers = 0;
  bool dump_graphs = false;
  detect->add_option("--events", events_path, "Trade event CSV")
      ->required()
      ->envname("WASHSCAN_EVENTS");
  detect->add_option("--prices", prices_path, "Daily price table CSV for USD enrichment")
      ->envname("WASHSCAN_PRICES");
  detect->add_option("--config", config_path, "Detector config JSON")
      ->envname("WASHSCAN_CONFIG");
  detect->add_option("--out", out_dir, "Output directory")->required()->envname("WASHSCAN_OUT");
  detect->add_option("--workers", workers, "Worker threads (default: hardware)")
      ->envname("WASHSCAN_WORKERS");
  detect->add_flag("--dump-graphs", dump_graphs, "Also write per-NFT graphs as text");
  ThresholdFlags detect_thresholds;
  detect_thresholds.attach(*detect);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic trace");
  std::string synth_config_path, synth_out;
  synth->add_option("--config", synth_config_path, "Generator config JSON")
      ->required()
      ->envname("WASHSCAN_CONFIG");
  synth->add_option("--out", synth_out, "Output directory")->required()->envname("WASHSCAN_OUT");
  ThresholdFlags synth_thresholds;
  synth_thresholds.attach(*synth);

  // report
  auto* report = app.add_subcommand("report", "Re-render reports from stored findings");
  std::string report_dir;
  report->add_option("--out", report_dir, "Directory holding a detect run")
      ->required()
      ->envname("WASHSCAN_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help text or the parse message
    return rc == 0 ? 0 : kExitUsage;
  }

  if (detect->parsed()) {
    washscan::DetectOptions opt;
    opt.events_path = events_path;
    opt.prices_path = prices_path;
    opt.config_path = config_path;
    opt.out_dir = out_dir;
    opt.config = detect_thresholds.resolve(config_path);
    opt.workers = workers;
    opt.dump_graphs = dump_graphs;
    washscan::RunManifest m = washscan::run_detect(opt);
    std::cout << "detect: " << m.events_kept << " events, " << m.graphs << " nfts, " << m.cycles
              << " cycles, " << m.sequences << " sequences -> " << out_dir << "\n";
    return 0;
  }

  if (synth->parsed()) {
    // threshold flags describe the detector the trace is aimed at; the
    // generator keeps its organic background outside those thresholds
    washscan::DetectorConfig det = synth_thresholds.resolve("");
    washscan::SynthConfig cfg =
        washscan::synth_config_from_json(load_json_file(synth_config_path, "synth config"));
    washscan::SynthResult result = washscan::generate(cfg, det);
    std::filesystem::create_directories(synth_out);
    const std::filesystem::path base(synth_out);
    {
      std::ofstream f(base / "events.csv", std::ios::binary);
      if (!f) throw washscan::UsageError("cannot write " + (base / "events.csv").string());
      washscan::serialize_events(result.events, f);
    }
    {
      std::ofstream f(base / "labels.csv", std::ios::binary);
      if (!f) throw washscan::UsageError("cannot write " + (base / "labels.csv").string());
      washscan::write_labels(result.labels, f);
    }
    std::cout << "synth: " << result.events.size() << " events, " << result.labels.size()
              << " labeled -> " << synth_out << "\n";
    return 0;
  }

  washscan::run_report(report_dir);
  std::cout << "report: re-rendered from " << report_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const washscan::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const washscan::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const washscan::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
