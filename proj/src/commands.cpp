#include "wavecone/commands.hpp"

#include "wavecone/ell.hpp"
#include "wavecone/measure_ops.hpp"
#include "wavecone/multivector.hpp"
#include "wavecone/report.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace wavecone::cli {

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  f >> j;
  return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

FirstOrderOperator load_operator(const std::string& path) {
  return FirstOrderOperator::from_json(load_json(path));
}

RationalVector load_vector(const std::string& path) {
  nlohmann::json j = load_json(path);
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("e")) throw std::invalid_argument("vector JSON must be an array or hold field 'e'");
    arr = &j.at("e");
  }
  RationalVector v;
  for (const auto& je : *arr)
    v.push_back(je.is_string() ? parse_rational(je.get<std::string>()) : Rational(je.get<long long>()));
  return v;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

nlohmann::json run_ell(const EllParams& p) {
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = load_operator(p.op_path);
  timer.lap(timings, "load");
  EllConfig config{p.height, p.samples, p.restarts, p.seed};
  EllCertificate cert = ell(op, config);
  timer.lap(timings, "search");
  nlohmann::json inputs{{"operator", p.op_path}, {"operator_digest", file_digest(p.op_path)},
                        {"height", p.height},    {"samples", p.samples},
                        {"restarts", p.restarts}};
  return make_report("ell", inputs, p.seed, {{"label", op.label()}, {"certificate", cert.to_json()}}, timings);
}

nlohmann::json run_member(const std::string& op_path, const std::string& vec_path) {
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = load_operator(op_path);
  RationalVector e = load_vector(vec_path);
  WaveConeReport rep = wave_cone_member(op, e);
  timer.lap(timings, "total");
  nlohmann::json je = nlohmann::json::array(), jk;
  for (const auto& x : e) je.push_back(to_string(x));
  if (rep.kernel_direction) {
    jk = nlohmann::json::array();
    for (const auto& x : *rep.kernel_direction) jk.push_back(to_string(x));
  }
  nlohmann::json inputs{{"operator", op_path},
                        {"operator_digest", file_digest(op_path)},
                        {"vector", vec_path},
                        {"vector_digest", file_digest(vec_path)}};
  return make_report("member", inputs, 0,
                     {{"label", op.label()}, {"e", je}, {"member", rep.member}, {"kernel_direction", jk}}, timings);
}

nlohmann::json run_gallery(const std::string& kind, int d, int m, int k, const std::string& out_path) {
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = [&] {
    if (kind == "curl") return make_curl(d, m);
    if (kind == "div") return make_div(k, d);
    if (kind == "ext") return make_ext_derivative(d, m);
    if (kind == "boundary") return make_boundary(d, m);
    throw std::invalid_argument("unknown gallery operator '" + kind + "'");
  }();
  write_json(out_path, op.to_json());
  timer.lap(timings, "total");
  nlohmann::json inputs{{"kind", kind}, {"d", d}, {"m", m}, {"k", k}};
  return make_report("gallery", inputs, 0,
                     {{"label", op.label()},
                      {"path", out_path},
                      {"dimE", op.dimE()},
                      {"dimF", op.dimF()},
                      {"analytic_ell", op.analytic_ell() ? nlohmann::json(*op.analytic_ell()) : nlohmann::json()}},
                     timings);
}

nlohmann::json run_sharp(const SharpParams& p) {
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = load_operator(p.op_path);
  EllCertificate cert = EllCertificate::from_json(load_json(p.cert_path));
  timer.lap(timings, "load");
  double h = p.h > 0 ? p.h : 2.0 / p.n;
  if (cert.value == 0)
    std::cerr << "warning: witness invariance space is zero-dimensional; producing a single-cell measure\n";
  VectorGridMeasure mu = sharp_measure(op, cert, p.n, h);
  timer.lap(timings, "construct");
  mu.save(p.out_dir);
  timer.lap(timings, "save");
  std::size_t supported = 0;
  for (double m : mu.base.mass) supported += m > 0 ? 1 : 0;
  nlohmann::json inputs{{"operator", p.op_path},
                        {"operator_digest", file_digest(p.op_path)},
                        {"certificate", p.cert_path},
                        {"certificate_digest", file_digest(p.cert_path)},
                        {"n", p.n},
                        {"h", h}};
  return make_report("sharp", inputs, 0,
                     {{"label", op.label()},
                      {"ell", cert.value},
                      {"out", p.out_dir},
                      {"total_mass", mu.base.total_mass()},
                      {"supported_cells", supported}},
                     timings);
}

nlohmann::json run_residual(const std::string& op_path, const std::string& measure_dir, std::uint64_t seed) {
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = load_operator(op_path);
  VectorGridMeasure mu = VectorGridMeasure::load(measure_dir);
  timer.lap(timings, "load");
  ResidualOptions opts;
  opts.seed = seed;
  double res = weak_residual(op, mu, opts);
  timer.lap(timings, "residual");
  nlohmann::json inputs{{"operator", op_path},
                        {"operator_digest", file_digest(op_path)},
                        {"measure", measure_dir},
                        {"radii", opts.radii},
                        {"centers_per_radius", opts.centers_per_radius}};
  return make_report("residual", inputs, seed, {{"label", op.label()}, {"residual", res}}, timings);
}

nlohmann::json run_dim_estimate(const std::string& measure_dir, int scales) {
  nlohmann::json timings;
  PhaseTimer timer;
  GridMeasure g = GridMeasure::load(measure_dir);
  timer.lap(timings, "load");
  BoxDimEstimate est = box_dimension(g, scales, 0.5);
  timer.lap(timings, "count");
  nlohmann::json jscales = nlohmann::json::array();
  for (const auto& [eps, count] : est.scale_counts) jscales.push_back({{"eps", eps}, {"count", count}});
  nlohmann::json inputs{{"measure", measure_dir}, {"scales", scales}, {"mass_threshold", 0.5}};
  return make_report("dim-estimate", inputs, 0,
                     {{"estimate", est.estimate}, {"r2", est.r2}, {"degenerate", est.degenerate},
                      {"per_scale", jscales}},
                     timings);
}

nlohmann::json run_mask(const std::string& op_path, const std::string& measure_dir, const std::string& out_dir) {
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = load_operator(op_path);
  VectorGridMeasure mu = VectorGridMeasure::load(measure_dir);
  timer.lap(timings, "load");
  std::vector<std::uint8_t> mask = wave_cone_mask(op, mu);
  timer.lap(timings, "mask");
  std::filesystem::create_directories(out_dir);
  {
    nlohmann::json header{{"d", mu.base.d}, {"n", mu.base.n}, {"dtype", "u8"}};
    std::ofstream hf(std::filesystem::path(out_dir) / "header.json");
    hf << header.dump(2) << "\n";
    std::ofstream mf(std::filesystem::path(out_dir) / "mask.u8", std::ios::binary);
    mf.write(reinterpret_cast<const char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
    if (!mf) throw std::runtime_error("write failed: " + out_dir);
  }
  std::size_t supported = 0, marked = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mu.base.mass[i] > 0) ++supported;
    if (mask[i]) ++marked;
  }
  timer.lap(timings, "save");
  nlohmann::json inputs{{"operator", op_path}, {"operator_digest", file_digest(op_path)}, {"measure", measure_dir}};
  return make_report("mask", inputs, 0,
                     {{"label", op.label()},
                      {"out", out_dir},
                      {"supported_cells", supported},
                      {"marked_cells", marked},
                      {"marked_fraction", supported ? static_cast<double>(marked) / supported : 0.0}},
                     timings);
}

nlohmann::json run_pipeline(const std::string& op_path, int n, std::uint64_t seed) {
  if (n < 16) throw std::invalid_argument("grid too coarse for requested scales");
  nlohmann::json timings;
  PhaseTimer timer;
  FirstOrderOperator op = load_operator(op_path);
  timer.lap(timings, "load");

  EllConfig config;
  config.seed = seed;
  EllCertificate cert = stage("ell", [&] { return ell(op, config); });
  timer.lap(timings, "ell");
  if (cert.value == 0)
    std::cerr << "warning: witness invariance space is zero-dimensional; producing a single-cell measure\n";

  double h = 2.0 / n;
  VectorGridMeasure mu = stage("sharp_measure", [&] { return sharp_measure(op, cert, n, h); });
  if (!(mu.base.total_mass() > 0)) throw std::runtime_error("stage sharp_measure: empty measure");
  timer.lap(timings, "sharp_measure");

  ResidualOptions ropts;
  ropts.seed = seed;
  double residual = stage("weak_residual", [&] { return weak_residual(op, mu, ropts); });
  if (!std::isfinite(residual)) throw std::runtime_error("stage weak_residual: non-finite residual");
  timer.lap(timings, "weak_residual");

  Subspace detected = stage("detect_invariance", [&] { return detect_invariance(mu.base, 0.05, seed); });
  timer.lap(timings, "detect_invariance");

  BoxDimEstimate box = stage("box_dimension", [&] { return box_dimension(mu.base, 8, 0.5); });
  timer.lap(timings, "box_dimension");

  nlohmann::json inputs{{"operator", op_path}, {"operator_digest", file_digest(op_path)}, {"n", n}, {"h", h}};
  return make_report("pipeline", inputs, seed,
                     {{"label", op.label()},
                      {"certificate", cert.to_json()},
                      {"residual", residual},
                      {"detected_invariance_dim", detected.dim()},
                      {"box_estimate", box.estimate},
                      {"box_r2", box.r2}},
                     timings);
}

nlohmann::json run_verify_appendix(int dmax, int samples, std::uint64_t seed) {
  if (dmax < 1 || dmax > 6) throw std::invalid_argument("dmax must lie in 1..6");
  nlohmann::json timings;
  PhaseTimer timer;
  bool all_pass = true;
  nlohmann::json cases = nlohmann::json::array();
  for (int d = 1; d <= dmax; ++d)
    for (int m = 1; m <= d; ++m) {
      LemmaReport rep = lemma_ab_oracle(d, m, samples, seed);
      all_pass = all_pass && rep.pass;
      nlohmann::json jc{{"d", d}, {"m", m}, {"pass", rep.pass},
                        {"basis_cases", rep.basis_cases}, {"random_cases", rep.random_cases}};
      if (!rep.pass) jc["counterexample"] = rep.counterexample;
      cases.push_back(std::move(jc));
    }
  timer.lap(timings, "total");
  nlohmann::json inputs{{"dmax", dmax}, {"samples", samples}};
  return make_report("verify-appendix", inputs, seed, {{"all_pass", all_pass}, {"cases", cases}}, timings);
}

}  // namespace wavecone::cli
