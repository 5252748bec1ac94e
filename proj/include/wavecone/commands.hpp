#pragma once

#include "json.hpp"

#include <cstdint>
#include <string>

// Command bodies behind the CLI, separated so tests can drive them directly.
// Each returns a schema-1 report; failures surface as exceptions that the
// front end turns into stderr diagnostics and a nonzero exit.
namespace wavecone::cli {

struct EllParams {
  std::string op_path;
  int height = 2;
  int samples = 50;
  int restarts = 8;
  std::uint64_t seed = 0;
};

nlohmann::json run_ell(const EllParams& p);

nlohmann::json run_member(const std::string& op_path, const std::string& vec_path);

/// kind: curl | div | ext | boundary. Writes the operator JSON to out_path.
nlohmann::json run_gallery(const std::string& kind, int d, int m, int k, const std::string& out_path);

struct SharpParams {
  std::string op_path;
  std::string cert_path;
  int n = 128;
  double h = 0;  // 0 means 2/n (unit cube domain)
  std::string out_dir;
};

nlohmann::json run_sharp(const SharpParams& p);

nlohmann::json run_residual(const std::string& op_path, const std::string& measure_dir, std::uint64_t seed);

nlohmann::json run_dim_estimate(const std::string& measure_dir, int scales);

nlohmann::json run_mask(const std::string& op_path, const std::string& measure_dir, const std::string& out_dir);

nlohmann::json run_pipeline(const std::string& op_path, int n, std::uint64_t seed);

nlohmann::json run_verify_appendix(int dmax, int samples, std::uint64_t seed);

}  // namespace wavecone::cli
