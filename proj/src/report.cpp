#include "wavecone/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace wavecone {

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[8192];
  while (f) {
    f.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << "fnv1a:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

double PhaseTimer::lap(nlohmann::json& timings, const std::string& name) {
  auto now = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(now - t0_).count();
  timings[name] = ms;
  t0_ = now;
  return ms;
}

nlohmann::json make_report(const std::string& command, nlohmann::json inputs, std::uint64_t seed,
                           nlohmann::json results, nlohmann::json timings) {
  return {{"schema", 1},      {"command", command}, {"inputs", std::move(inputs)},
          {"seed", seed},     {"results", std::move(results)}, {"timings_ms", std::move(timings)}};
}

namespace {

void flatten(const nlohmann::json& j, const std::string& prefix, std::ostringstream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array() && j.size() > 8) {
    os << prefix << " = [" << j.size() << " entries]\n";
  } else {
    os << prefix << " = " << j.dump() << "\n";
  }
}

}  // namespace

std::string format_table(const nlohmann::json& report) {
  std::ostringstream os;
  flatten(report, "", os);
  return os.str();
}

}  // namespace wavecone
