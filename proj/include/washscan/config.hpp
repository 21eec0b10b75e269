#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "washscan/decimal.hpp"
#include "washscan/types.hpp"

namespace washscan {

/// All detection thresholds and cleaning switches. Defaults: 12h velocity
/// window, 5% price deviation, sequences of at least 2 sales, cycle search
/// bounded at 32 edges, zero-price sales dropped.
struct DetectorConfig {
  std::int64_t velocity_window_seconds = 12 * 3600;
  Decimal max_price_deviation = Decimal::from_raw(5'000'000);  // 0.05
  int min_sequence_len = 2;
  int max_cycle_len = 32;
  bool drop_zero_price = true;

  void validate() const {
    if (velocity_window_seconds <= 0)
      throw DataError("config: velocity window must be positive");
    if (max_price_deviation <= Decimal{} || max_price_deviation >= Decimal::from_int(1))
      throw DataError("config: max_price_deviation must be in (0, 1)");
    if (min_sequence_len < 2)
      throw DataError("config: min_sequence_len must be >= 2");
    if (max_cycle_len < 1)
      throw DataError("config: max_cycle_len must be >= 1");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"velocity_hours", double(velocity_window_seconds) / 3600.0},
        {"velocity_seconds", velocity_window_seconds},
        {"max_price_deviation", max_price_deviation.to_string()},
        {"min_sequence_len", min_sequence_len},
        {"max_cycle_len", max_cycle_len},
        {"drop_zero_price", drop_zero_price},
    };
  }

  static Decimal decimal_from_json(const nlohmann::json& v, const char* key) {
    std::string text = v.is_string() ? v.get<std::string>() : v.dump();
    auto d = Decimal::try_parse(text);
    if (!d) throw DataError(std::string("config: bad decimal for ") + key + ": " + text);
    return *d;
  }

  static DetectorConfig from_json(const nlohmann::json& j) {
    DetectorConfig cfg;
    if (j.contains("velocity_hours")) {
      double h = j.at("velocity_hours").get<double>();
      cfg.velocity_window_seconds = std::int64_t(h * 3600.0 + 0.5);
    }
    if (j.contains("velocity_seconds"))
      cfg.velocity_window_seconds = j.at("velocity_seconds").get<std::int64_t>();
    if (j.contains("max_price_deviation"))
      cfg.max_price_deviation = decimal_from_json(j.at("max_price_deviation"), "max_price_deviation");
    if (j.contains("min_sequence_len")) cfg.min_sequence_len = j.at("min_sequence_len").get<int>();
    if (j.contains("max_cycle_len")) cfg.max_cycle_len = j.at("max_cycle_len").get<int>();
    if (j.contains("drop_zero_price")) cfg.drop_zero_price = j.at("drop_zero_price").get<bool>();
    cfg.validate();
    return cfg;
  }
};

}  // namespace washscan
