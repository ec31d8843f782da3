// capcover: command-line front end for the sampling, hull, metric and
// experiment modules. Exit status: 0 when every hard gate passes, 1 when a
// gate fails, 2 on invalid input or a runtime error.

#include "capcover/experiments.hpp"
#include "capcover/hull.hpp"
#include "capcover/limits.hpp"
#include "capcover/metric.hpp"
#include "capcover/sampling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace capcover;
using nlohmann::json;

namespace {

json vec_json(const Vec3& v, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(v[i]);
  return a;
}

Vec3 parse_vec(const std::string& s) {
  Vec3 v = Vec3::Zero();
  std::stringstream in(s);
  std::string item;
  int i = 0;
  while (std::getline(in, item, ',')) {
    if (i == 3) throw DomainError("vector has more than 3 entries: " + s);
    v[i++] = std::stod(item);
  }
  if (i < 2) throw DomainError("vector needs 2 or 3 entries: " + s);
  return v;
}

std::vector<Vec3> parse_vec_list(const std::string& s) {
  std::vector<Vec3> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) out.push_back(parse_vec(item));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_gumbel(ExperimentConfig cfg, const std::string& config_path) {
  if (!config_path.empty()) cfg = load_config(config_path);
  cfg.validate();
  const GumbelReport report = run_gumbel_experiment(cfg);
  std::ostringstream csv;
  write_records_csv(report, csv);
  if (!cfg.output.empty()) write_text(cfg.output, csv.str());
  const std::string summary = summary_json(report) + "\n";
  if (!cfg.summary.empty())
    write_text(cfg.summary, summary);
  else
    std::cout << summary;
  return report.exact_oracle_passed ? 0 : 1;
}

int cmd_verify_thm2(const std::string& body_spec, const std::vector<long>& n_values, int seeds,
                    std::uint64_t seed, double factor) {
  const ConvexBody body = parse_body(body_spec);
  json j;
  bool ok = true;
  if (body.dim() == 2 && body.is_sphere() && body.sphere_radius() == 1.0) {
    const std::vector<double> rhos{0.4, 0.2, 0.1, 0.05};
    const auto res = circle_residuals(rhos);
    std::vector<double> r;
    for (const auto& c : res) r.push_back(c.residual);
    const double slope = loglog_slope(rhos, r);
    bool bounded = true;
    for (const auto& c : res) bounded = bounded && c.residual <= c.rho * c.rho * c.rho;
    j["analytic"] = {{"rho", rhos}, {"residual", r}, {"slope", slope}, {"residual_le_rho3", bounded}};
    ok = ok && bounded && std::abs(slope - 4.0) <= 0.3;
  }
  const HdLadder ladder = hd_covering_ladder(body, n_values, seeds, seed, factor);
  json rows = json::array();
  for (const auto& row : ladder.rows) {
    json runs = json::array();
    for (const auto& r : row.runs)
      runs.push_back({{"delta_H", r.delta_H}, {"rho", r.rho}, {"residual", r.residual}, {"C_hat", r.C_hat}});
    rows.push_back({{"n", row.n}, {"C_hat", row.C_hat}, {"max_rho", row.max_rho}, {"runs", runs}});
  }
  j["body"] = body.name();
  j["ladder"] = rows;
  j["C_hat_no_growth"] = ladder.no_growth;
  ok = ok && ladder.no_growth;
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_volume_ladder(const std::string& body_spec, const std::vector<double>& r_values,
                      const std::string& centers, double resolution) {
  const ConvexBody body = parse_body(body_spec);
  std::vector<Vec3> normals = centers.empty()
                                  ? std::vector<Vec3>{Vec3::UnitX(), Vec3(1, 1, 0).normalized()}
                                  : parse_vec_list(centers);
  if (body.dim() == 3 && centers.empty()) normals.push_back(Vec3(1, 1, 1).normalized());
  const MetricMesh mesh = build_metric_mesh(body, resolution);
  const VolumeLadder ladder = volume_ladder(body, r_values, normals, mesh);
  json rows = json::array();
  bool flat_2d = true;
  for (const auto& row : ladder.rows) {
    rows.push_back({{"center", vec_json(row.center, body.dim())},
                    {"r", row.r},
                    {"volume", row.volume},
                    {"volume_mesh", row.volume_mesh},
                    {"defect", row.defect},
                    {"defect_ratio", row.defect_ratio}});
    flat_2d = flat_2d && row.defect <= 1e-10;
  }
  json j = {{"body", body.name()},
            {"rows", rows},
            {"max_defect_ratio", ladder.max_defect_ratio},
            {"bounded_non_growing", ladder.bounded_non_growing}};
  std::cout << j.dump(2) << "\n";
  const bool ok = body.dim() == 2 && body.is_sphere() ? flat_2d : ladder.bounded_non_growing;
  return ok ? 0 : 1;
}

int cmd_median(const std::string& body_spec, const std::vector<long>& n_values, int reps,
               std::uint64_t seed) {
  const ConvexBody body = parse_body(body_spec);
  const MedianCheck check = median_scaling_check(body, n_values, reps, seed);
  json rows = json::array();
  for (const auto& r : check.rows)
    rows.push_back({{"n", r.n}, {"median", r.median}, {"distance_to_target", r.distance_to_target}});
  json j = {{"body", body.name()},
            {"target", check.target},
            {"rows", rows},
            {"drifts_toward_target", check.drifts_toward_target}};
  std::cout << j.dump(2) << "\n";
  return check.drifts_toward_target ? 0 : 1;
}

int cmd_constants(int d, long n, double v_k, const std::string& body_spec) {
  if (!body_spec.empty()) {
    const ConvexBody body = parse_body(body_spec);
    d = body.dim();
    v_k = v_kappa(body).value;
  }
  const ScalingConstants sc = scaling_constants(d, n, v_k);
  json j = {{"d", d},          {"n", n},          {"v_kappa", v_k},  {"kappa_vol", sc.kappa_vol},
            {"alpha", sc.alpha}, {"c_n", sc.c_n}, {"a_n", sc.a_n}, {"b_n", sc.b_n}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sample(const std::string& body_spec, long n, std::uint64_t seed, bool uniform,
               const std::string& output) {
  const ConvexBody body = parse_body(body_spec);
  const SampleSet s = uniform ? sample_uniform_area(body, static_cast<std::size_t>(n), seed)
                              : sample_h_kappa(body, static_cast<std::size_t>(n), seed);
  const int d = body.dim();
  std::ostringstream out;
  out << (d == 2 ? "x,y,nx,ny,kappa\n" : "x,y,z,nx,ny,nz,kappa\n");
  for (const auto& p : s.points) {
    for (int i = 0; i < d; ++i) out << fmt(p.ambient[i]) << ',';
    for (int i = 0; i < d; ++i) out << fmt(p.normal[i]) << ',';
    out << fmt(p.curvature) << '\n';
  }
  write_text(output, out.str());
  return 0;
}

int cmd_hulldist(const std::string& body_spec, long n, std::uint64_t seed) {
  const ConvexBody body = parse_body(body_spec);
  const SampleSet s = sample_h_kappa(body, static_cast<std::size_t>(n), seed);
  InscribedPolytope poly = convex_hull(s);
  const HausdorffResult hd = hausdorff_distance(body, poly);
  json j = {{"n", n},
            {"seed", seed},
            {"delta_H", hd.delta_H},
            {"num_facets", poly.facets.size()},
            {"argmax_normal", vec_json(hd.argmax_facet.outward_normal, body.dim())}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_coverage(const std::string& body_spec, long n, std::uint64_t seed, double resolution) {
  const ConvexBody body = parse_body(body_spec);
  const double v_k = v_kappa(body).value;
  const SampleSet s = sample_h_kappa(body, static_cast<std::size_t>(n), seed);
  MeshOptions opt;
  const MetricMesh mesh = resolution > 0.0 ? build_metric_mesh(body, resolution, opt)
                                           : coverage_mesh(body, n, v_k, 8.0);
  const CoverageResult cov = max_spacing_statistic(s, mesh, v_k);
  json j = {{"n", n},
            {"seed", seed},
            {"rho", cov.rho},
            {"V", cov.V},
            {"witness", vec_json(cov.witness.ambient, body.dim())},
            {"mesh_vertices", mesh.num_vertices()},
            {"mesh_max_edge", mesh.max_edge()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_ballvol(const std::string& body_spec, const std::string& point, double r,
                double resolution) {
  const ConvexBody body = parse_body(body_spec);
  const BoundaryPoint x = body.point_from_direction(parse_vec(point));
  const MetricMesh mesh = build_metric_mesh(body, resolution);
  const double vol = geodesic_ball_volume(body, x, r, mesh);
  json j = {{"center", vec_json(x.ambient, body.dim())},
            {"r", r},
            {"volume", vol},
            {"volume_mesh", body.dim() == 3 ? geodesic_ball_volume_mesh(body, x, r, mesh) : vol},
            {"flat_volume", unit_ball_volume(body.dim() - 1) * std::pow(r, body.dim() - 1)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random inscribed polytopes: Gumbel limits and covering radii"};
  app.require_subcommand(1);
  const std::string body_help =
      "body spec: sphere, circle, ball:d=3,r=1, ellipsoid:2,1,1, quartic:d=3,eps=0.3";

  int status = 0;

  ExperimentConfig gcfg;
  std::string config_path;
  bool no_coverage = false;
  auto* gumbel = app.add_subcommand("gumbel", "Monte Carlo Gumbel experiment");
  gumbel->add_option("--config", config_path, "key=value config file (overrides flags)");
  gumbel->add_option("--body", gcfg.body, body_help);
  gumbel->add_option("--n", gcfg.n_values, "sample sizes, increasing")->delimiter(',');
  gumbel->add_option("--replications", gcfg.replications);
  gumbel->add_option("--seed", gcfg.base_seed);
  gumbel->add_option("--resolution-factor", gcfg.resolution_factor);
  gumbel->add_flag("--no-coverage", no_coverage, "record delta_H only");
  gumbel->add_option("--output", gcfg.output, "records CSV path");
  gumbel->add_option("--summary", gcfg.summary, "summary JSON path (stdout if empty)");
  gumbel->callback([&] {
    gcfg.coverage = !no_coverage;
    status = cmd_gumbel(gcfg, config_path);
  });

  std::string body = "sphere";
  std::vector<long> n_values{100, 1000, 10000};
  long n = 1000;
  int seeds = 20;
  int reps = 100;
  std::uint64_t seed = 1;
  double factor = 8.0;
  auto* thm2 = app.add_subcommand("verify-thm2", "delta_H versus rho^2/2 residual ladder");
  thm2->add_option("--body", body, body_help);
  thm2->add_option("--n", n_values)->delimiter(',');
  thm2->add_option("--seeds", seeds);
  thm2->add_option("--seed", seed);
  thm2->add_option("--resolution-factor", factor);
  thm2->callback([&] { status = cmd_verify_thm2(body, n_values, seeds, seed, factor); });

  std::vector<double> r_values{0.4, 0.2, 0.1};
  std::string centers;
  double resolution = 0.05;
  auto* ladder = app.add_subcommand("volume-ladder", "geodesic ball volume defects");
  ladder->add_option("--body", body, body_help);
  ladder->add_option("--r", r_values, "decreasing radii")->delimiter(',');
  ladder->add_option("--centers", centers, "outward normals, e.g. \"1,0,0;0,0,1\"");
  ladder->add_option("--resolution", resolution, "mesh resolution");
  ladder->callback([&] { status = cmd_volume_ladder(body, r_values, centers, resolution); });

  auto* median = app.add_subcommand("median-check", "median of the scaled Hausdorff distance");
  median->add_option("--body", body, body_help);
  median->add_option("--n", n_values)->delimiter(',');
  median->add_option("--replications", reps);
  median->add_option("--seed", seed);
  median->callback([&] { status = cmd_median(body, n_values, reps, seed); });

  int d = 3;
  double v_k = 4.0 * kPi;
  std::string const_body;
  auto* constants = app.add_subcommand("constants", "scaling constants as JSON");
  constants->add_option("--d", d);
  constants->add_option("--n", n)->required();
  constants->add_option("--vk", v_k, "v_kappa (ignored with --body)");
  constants->add_option("--body", const_body, "take d and v_kappa from this body");
  constants->callback([&] { status = cmd_constants(d, n, v_k, const_body); });

  bool uniform = false;
  std::string output;
  auto* sample = app.add_subcommand("sample", "boundary sample as CSV");
  sample->add_option("--body", body, body_help);
  sample->add_option("--n", n);
  sample->add_option("--seed", seed);
  sample->add_flag("--uniform", uniform, "surface-area measure instead of h_kappa");
  sample->add_option("--output", output, "CSV path (stdout if empty)");
  sample->callback([&] { status = cmd_sample(body, n, seed, uniform, output); });

  auto* hulldist = app.add_subcommand("hulldist", "Hausdorff distance of one random hull");
  hulldist->add_option("--body", body, body_help);
  hulldist->add_option("--n", n);
  hulldist->add_option("--seed", seed);
  hulldist->callback([&] { status = cmd_hulldist(body, n, seed); });

  double cov_resolution = 0.0;
  auto* coverage = app.add_subcommand("coverage", "covering radius and spacing statistic");
  coverage->add_option("--body", body, body_help);
  coverage->add_option("--n", n);
  coverage->add_option("--seed", seed);
  coverage->add_option("--resolution", cov_resolution, "mesh resolution (default rho estimate / 8)");
  coverage->callback([&] { status = cmd_coverage(body, n, seed, cov_resolution); });

  std::string point;
  double r = 0.1;
  auto* ballvol = app.add_subcommand("ballvol", "geodesic ball volume");
  ballvol->add_option("--body", body, body_help);
  ballvol->add_option("--point", point, "direction of the centre from the origin")->required();
  ballvol->add_option("--r", r);
  ballvol->add_option("--resolution", resolution, "mesh resolution");
  ballvol->callback([&] { status = cmd_ballvol(body, point, r, resolution); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}
