// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.

#include <CLI11.hpp>
#include <omp.h>

#include "capcover/experiments.hpp"
#include "capcover/hull.hpp"
#include "capcover/kernels.hpp"
#include "capcover/limits.hpp"
#include "capcover/sampling.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace capcover;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// alpha(d) from the Gamma formula, written out independently of the library.
double alpha_oracle(int d) {
  const double ratio = std::sqrt(kPi) * std::tgamma(0.5 * (d + 1)) / std::tgamma(0.5 * d);
  return std::pow(ratio, d - 2) / std::tgamma(d);
}

Outcome criterion1() {
  const double a2 = alpha_constant(2), a3 = alpha_constant(3), a4 = alpha_constant(4);
  const double want4 = 3.0 * kPi * kPi / 32.0;
  const bool ok2 = a2 == 1.0;
  const bool ok3 = std::abs(a3 - 2.0) <= 1e-12;
  const bool ok4 = std::abs(a4 - want4) <= 1e-12;
  return {ok2 && ok3 && ok4,
          fmt("alpha(2)=%.17g (want 1 exactly) alpha(3)=%.17g (want 2, tol 1e-12; Gamma formula "
              "gives %.17g) alpha(4)=%.17g (want 3pi^2/32=%.17g, tol 1e-12)",
              a2, a3, alpha_oracle(3), a4, want4)};
}

Outcome criterion2() {
  ExperimentConfig cfg;
  cfg.body = "circle";
  cfg.n_values = {10000};
  cfg.replications = 500;
  cfg.base_seed = 2002;
  const GumbelReport r = run_gumbel_experiment(cfg);
  const double ks = r.per_n.at(0).ks_spacing_exact.value();
  return {ks < 0.0729, fmt("circle n=1e4 N=500: KS(V, exact CDF)=%.4f (want < 0.0729)", ks)};
}

struct GumbelRuns {
  GumbelReport circle, sphere;
};

const GumbelRuns& gumbel_runs() {
  static const GumbelRuns runs = [] {
    GumbelRuns out;
    ExperimentConfig cfg;
    cfg.n_values = {1000, 10000, 100000};
    cfg.replications = 300;
    cfg.body = "circle";
    cfg.base_seed = 3003;
    out.circle = run_gumbel_experiment(cfg);
    cfg.body = "sphere";
    cfg.base_seed = 3004;
    cfg.coverage = false;
    out.sphere = run_gumbel_experiment(cfg);
    return out;
  }();
  return runs;
}

Outcome criterion3() {
  const GumbelRuns& g = gumbel_runs();
  bool pass = true;
  std::string detail;
  for (const GumbelReport* r : {&g.circle, &g.sphere}) {
    std::vector<double> ks;
    for (const auto& s : r->per_n) ks.push_back(s.ks_hausdorff);
    const bool trend = nonincreasing_within(ks, r->ks_noise_band);
    const bool last = ks.back() < 0.25;
    pass = pass && trend && last;
    detail += fmt("%s KS=[%.4f %.4f %.4f] band=%.4f trend=%s last<0.25=%s; ", r->config.body.c_str(),
                  ks[0], ks[1], ks[2], r->ks_noise_band, trend ? "ok" : "no", last ? "ok" : "no");
  }
  return {pass, detail};
}

Outcome criterion4() {
  const std::vector<double> rhos{0.4, 0.2, 0.1, 0.05};
  std::vector<double> x, y;
  for (const auto& c : circle_residuals(rhos)) {
    x.push_back(c.rho);
    y.push_back(c.residual);
  }
  const double slope = loglog_slope(x, y);
  bool pass = std::abs(slope - 4.0) <= 0.3;
  std::string detail = fmt("circle slope=%.4f (want 4+-0.3); ", slope);
  const std::vector<long> ns{100, 1000, 10000};
  for (const std::string spec : {"sphere", "ellipsoid:2,1,1"}) {
    const HdLadder l = hd_covering_ladder(parse_body(spec), ns, 20, 4004);
    pass = pass && l.no_growth;
    detail += fmt("%s C_hat=[%.4g %.4g %.4g] no-growth=%s; ", spec.c_str(), l.rows[0].C_hat,
                  l.rows[1].C_hat, l.rows[2].C_hat, l.no_growth ? "ok" : "no");
  }
  return {pass, detail};
}

Outcome criterion5() {
  const std::vector<double> rs{0.4, 0.2, 0.1};
  const std::vector<Vec3> normals{Vec3::UnitX(), Vec3::UnitY(), Vec3(1, 1, 1).normalized()};
  bool pass = true;
  double worst_sphere = 0.0;
  const ConvexBody sphere = make_ball(3, 1.0);
  for (const auto& row : volume_ladder(sphere, rs, normals, build_metric_mesh(sphere, 0.05)).rows) {
    const double series = kPi * std::pow(row.r, 4) / 12.0;
    worst_sphere = std::max(worst_sphere, std::abs(row.defect - series) / series);
  }
  pass = pass && worst_sphere <= 0.05;

  const ConvexBody ell = parse_body("ellipsoid:2,1,1");
  const VolumeLadder el = volume_ladder(ell, rs, normals, build_metric_mesh(ell, 0.05));
  pass = pass && el.bounded_non_growing;

  double worst_flat = 0.0;
  for (const std::string spec : {"circle", "ellipse:2,1"}) {
    const ConvexBody b = parse_body(spec);
    const std::vector<Vec3> c2{Vec3::UnitX(), Vec3::UnitY(), Vec3(1, 1, 0).normalized()};
    for (const auto& row : volume_ladder(b, rs, c2, build_metric_mesh(b, 0.01)).rows)
      worst_flat = std::max(worst_flat, row.defect);
  }
  pass = pass && worst_flat <= 1e-10;
  return {pass, fmt("sphere max |defect/(pi r^4/12) - 1|=%.4f (want <= 0.05); ellipsoid "
                    "defect/r^3 non-growing=%s (max %.4g); d=2 max defect=%.2g (want <= 1e-10)",
                    worst_sphere, el.bounded_non_growing ? "ok" : "no", el.max_defect_ratio, worst_flat)};
}

Outcome criterion6() {
  bool pass = true;
  std::string detail;
  for (const std::string spec : {"sphere", "ellipsoid:2,1,1", "quartic", "circle", "ellipse:2,1"}) {
    const ConvexBody body = parse_body(spec);
    const MetricMesh dense = build_metric_mesh(body, body.dim() == 2 ? 1e-4 : 0.01);
    double worst_gap = 0.0;
    int bad = 0;
    for (int i = 0; i < 20; ++i) {
      const SampleSet s = sample_h_kappa(body, 200, 6000 + i);
      InscribedPolytope poly = convex_hull(s);
      const HausdorffResult h = hausdorff_distance(body, poly);
      const double brute = brute_force_hausdorff(poly, dense.positions()).value;
      const Vec3& c = h.argmax_facet.cap_center.ambient;
      double resolution = std::numeric_limits<double>::infinity();
      for (const Vec3& v : dense.positions()) resolution = std::min(resolution, (c - v).norm());
      const bool ok = brute <= h.delta_H + 1e-12 && brute >= h.delta_H - resolution - 1e-12;
      bad += !ok;
      worst_gap = std::max(worst_gap, (h.delta_H - brute) / h.delta_H);
    }
    pass = pass && bad == 0;
    detail += fmt("%s %d/20 within [delta_H - res, delta_H] (max rel gap %.2g); ", spec.c_str(),
                  20 - bad, worst_gap);
  }
  return {pass, detail};
}

Outcome criterion7() {
  const GumbelRuns& g = gumbel_runs();
  const double sphere_median = g.sphere.per_n.back().median_scaled;
  const double circle_median = g.circle.per_n.back().median_scaled;
  const double target = g.circle.median_target;
  const bool ok_sphere = sphere_median >= 1.6 && sphere_median <= 2.4;
  const bool ok_circle = std::abs(circle_median - target) <= 0.25 * target;
  return {ok_sphere && ok_circle,
          fmt("sphere n=1e5 median=%.4f (want [1.6, 2.4]); circle n=1e5 median=%.4f (want "
              "pi^2/2=%.4f +-25%%)",
              sphere_median, circle_median, target)};
}

Outcome criterion8() {
  const ConvexBody e = parse_body("ellipsoid:2,1,1");
  std::vector<double> masses;
  for (const auto& patch : standard_patches(3))
    masses.push_back(boundary_integral(
        e, [&](const Vec3& x) { return std::sqrt(e.gaussian_curvature(x)); }, patch, 6));
  std::vector<std::size_t> counts(masses.size(), 0);
  for (const auto& p : sample_h_kappa(e, 100000, 8008).points) ++counts[standard_patch_index(3, p.ambient)];
  const ChiSquareResult r = chi_square_test(counts, masses);
  return {r.p_value > 0.01,
          fmt("ellipsoid n=1e5, 32 patches: chi2=%.2f dof=%d p=%.4f (want > 0.01)", r.statistic, r.dof, r.p_value)};
}

Outcome criterion9() {
  ExperimentConfig cfg;
  cfg.body = "ellipsoid:2,1,1";
  cfg.n_values = {200, 400};
  cfg.replications = 8;
  cfg.base_seed = 9009;
  const int saved = omp_get_max_threads();
  std::string csv[2];
  const int threads[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    omp_set_num_threads(threads[i]);
    std::ostringstream out;
    write_records_csv(run_gumbel_experiment(cfg), out);
    csv[i] = out.str();
  }
  omp_set_num_threads(saved);
  const bool same = csv[0] == csv[1];
  return {same, fmt("gumbel CSV with 1 and 4 threads: %s (%zu bytes)", same ? "byte-identical" : "different",
                    csv[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  app.add_option("criteria", selected, "criteria to run (default: all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::map<int, std::function<Outcome()>> checks{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  int failures = 0;
  for (int id : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks.at(id)();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
