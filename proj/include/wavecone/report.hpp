#pragma once

#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <string>

namespace wavecone {

/// FNV-1a 64-bit digest of a file's bytes, as "fnv1a:<hex>". Used to echo
/// input identity into reports.
std::string file_digest(const std::string& path);

class PhaseTimer {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  /// Milliseconds since start(); also records the phase under `name`.
  double lap(nlohmann::json& timings, const std::string& name);

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

/// Schema-1 report envelope shared by every CLI command.
nlohmann::json make_report(const std::string& command, nlohmann::json inputs, std::uint64_t seed,
                           nlohmann::json results, nlohmann::json timings);

/// Flat "key = value" rendering of a report for --format table.
std::string format_table(const nlohmann::json& report);

}  // namespace wavecone
