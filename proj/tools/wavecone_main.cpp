#include "wavecone/commands.hpp"
#include "wavecone/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <string>

namespace {

// Reports go to stdout (or --report FILE); artifact paths use -o; diagnostics
// go to stderr. Exit code 0 iff no stage failed.
void emit(const nlohmann::json& report, const std::string& format, const std::string& report_path) {
  std::string text = format == "table" ? wavecone::format_table(report) : report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(report_path);
    if (!f) throw std::runtime_error("cannot open for writing: " + report_path);
    f << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavecone: algebraic dimension invariants and measure diagnostics for first-order operators"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string report_path;
  app.add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--report", report_path, "write the report here instead of stdout");

  wavecone::cli::EllParams ellp;
  auto* ell_cmd = app.add_subcommand("ell", "compute the ell_P certificate of an operator");
  ell_cmd->add_option("-i,--input", ellp.op_path, "operator JSON")->required();
  ell_cmd->add_option("--height", ellp.height, "lattice height H");
  ell_cmd->add_option("--samples", ellp.samples, "random candidates per structured family");
  ell_cmd->add_option("--restarts", ellp.restarts, "descent restarts");
  ell_cmd->add_option("--seed", ellp.seed, "RNG seed");

  std::string member_op, member_vec;
  auto* member_cmd = app.add_subcommand("member", "test wave-cone membership of a polar vector");
  member_cmd->add_option("-i,--input", member_op, "operator JSON")->required();
  member_cmd->add_option("-e,--vector", member_vec, "vector JSON")->required();

  std::string gal_kind, gal_out;
  int gal_d = 3, gal_m = 1, gal_k = 1;
  auto* gal_cmd = app.add_subcommand("gallery", "emit a gallery operator as JSON");
  gal_cmd->add_option("kind", gal_kind, "curl | div | ext | boundary")->required();
  gal_cmd->add_option("--d", gal_d, "space dimension");
  gal_cmd->add_option("--m", gal_m, "grade / row count");
  gal_cmd->add_option("--k", gal_k, "target dimension (div)");
  gal_cmd->add_option("-o,--output", gal_out, "operator JSON path")->required();

  wavecone::cli::SharpParams sharpp;
  auto* sharp_cmd = app.add_subcommand("sharp", "discretize the sharp measure of a certificate");
  sharp_cmd->add_option("-i,--input", sharpp.op_path, "operator JSON")->required();
  sharp_cmd->add_option("--cert", sharpp.cert_path, "certificate JSON")->required();
  sharp_cmd->add_option("-n", sharpp.n, "cells per axis");
  sharp_cmd->add_option("--h", sharpp.h, "cell width (default 2/n)");
  sharp_cmd->add_option("-o,--output", sharpp.out_dir, "measure directory")->required();

  std::string res_op, res_measure;
  std::uint64_t res_seed = 0;
  auto* res_cmd = app.add_subcommand("residual", "weak-form residual of a measure against an operator");
  res_cmd->add_option("-i,--input", res_op, "operator JSON")->required();
  res_cmd->add_option("-m,--measure", res_measure, "measure directory")->required();
  res_cmd->add_option("--seed", res_seed, "RNG seed");

  std::string dim_measure;
  int dim_scales = 8;
  auto* dim_cmd = app.add_subcommand("dim-estimate", "box-counting dimension of a measure");
  dim_cmd->add_option("-m,--measure", dim_measure, "measure directory")->required();
  dim_cmd->add_option("--scales", dim_scales, "number of dyadic scales");

  std::string mask_op, mask_measure, mask_out;
  auto* mask_cmd = app.add_subcommand("mask", "wave-cone complement mask of a vector measure");
  mask_cmd->add_option("-i,--input", mask_op, "operator JSON")->required();
  mask_cmd->add_option("-m,--measure", mask_measure, "measure directory")->required();
  mask_cmd->add_option("-o,--output", mask_out, "mask directory")->required();

  std::string pipe_op;
  int pipe_n = 128;
  std::uint64_t pipe_seed = 0;
  auto* pipe_cmd = app.add_subcommand("pipeline", "ell -> sharp -> residual -> invariance -> box dimension");
  pipe_cmd->add_option("-i,--input", pipe_op, "operator JSON")->required();
  pipe_cmd->add_option("-n", pipe_n, "cells per axis");
  pipe_cmd->add_option("--seed", pipe_seed, "RNG seed");

  int app_dmax = 5, app_samples = 200;
  std::uint64_t app_seed = 0;
  auto* verify_cmd = app.add_subcommand("verify-appendix", "annihilator-dimension oracle over all (d, m)");
  verify_cmd->add_option("--dmax", app_dmax, "largest ambient dimension (<= 6)");
  verify_cmd->add_option("--samples", app_samples, "random samples per (d, m)");
  verify_cmd->add_option("--seed", app_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json report;
    if (*ell_cmd) report = wavecone::cli::run_ell(ellp);
    else if (*member_cmd) report = wavecone::cli::run_member(member_op, member_vec);
    else if (*gal_cmd) report = wavecone::cli::run_gallery(gal_kind, gal_d, gal_m, gal_k, gal_out);
    else if (*sharp_cmd) report = wavecone::cli::run_sharp(sharpp);
    else if (*res_cmd) report = wavecone::cli::run_residual(res_op, res_measure, res_seed);
    else if (*dim_cmd) report = wavecone::cli::run_dim_estimate(dim_measure, dim_scales);
    else if (*mask_cmd) report = wavecone::cli::run_mask(mask_op, mask_measure, mask_out);
    else if (*pipe_cmd) report = wavecone::cli::run_pipeline(pipe_op, pipe_n, pipe_seed);
    else if (*verify_cmd) report = wavecone::cli::run_verify_appendix(app_dmax, app_samples, app_seed);
    emit(report, format, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
