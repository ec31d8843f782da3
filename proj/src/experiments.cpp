#include "capcover/experiments.hpp"

#include "capcover/hull.hpp"
#include "capcover/sampling.hpp"

#include <boost/math/statistics/linear_regression.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace capcover {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw DomainError("not a number: '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && end == s.data() + s.size()) return v;
  // Accept 1e5 style integers.
  const double d = to_double(s);
  if (d != std::floor(d) || std::abs(d) > 1e15) throw DomainError("not an integer: '" + s + "'");
  return static_cast<long>(d);
}

std::map<std::string, std::string> key_values(const std::string& args) {
  std::map<std::string, std::string> kv;
  for (const auto& item : split(args, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("expected key=value in body spec, got '" + item + "'");
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ConvexBody parse_body(const std::string& spec) {
  const std::string s = trim(spec);
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "sphere" && args.empty()) return make_ball(3, 1.0);
  if (kind == "circle" && args.empty()) return make_ball(2, 1.0);
  if (kind == "ball") {
    const auto kv = key_values(args);
    const int d = kv.count("d") ? static_cast<int>(to_long(kv.at("d"))) : 3;
    const double r = kv.count("r") ? to_double(kv.at("r")) : 1.0;
    return make_ball(d, r);
  }
  if (kind == "ellipsoid" || kind == "ellipse") {
    std::vector<double> axes;
    for (const auto& a : split(args, ',')) axes.push_back(to_double(a));
    return make_ellipsoid(axes);
  }
  if (kind == "quartic") {
    const auto kv = key_values(args);
    const int d = kv.count("d") ? static_cast<int>(to_long(kv.at("d"))) : 3;
    const double eps = kv.count("eps") ? to_double(kv.at("eps")) : 0.3;
    return make_quartic(d, eps);
  }
  throw DomainError("unknown body spec '" + spec + "'");
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw DomainError("n_values is empty");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 16) throw DomainError("every n must be >= 16");
    if (i > 0 && n_values[i] <= n_values[i - 1])
      throw DomainError("n_values must be strictly increasing");
  }
  if (replications < 1) throw DomainError("replications must be >= 1");
  if (!(resolution_factor >= 1.0)) throw DomainError("resolution_factor must be >= 1");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "body") {
      cfg.body = value;
    } else if (key == "n_values") {
      cfg.n_values.clear();
      for (const auto& v : split(value, ',')) cfg.n_values.push_back(to_long(v));
    } else if (key == "replications") {
      cfg.replications = static_cast<int>(to_long(value));
    } else if (key == "base_seed") {
      cfg.base_seed = static_cast<std::uint64_t>(to_long(value));
    } else if (key == "resolution_factor") {
      cfg.resolution_factor = to_double(value);
    } else if (key == "coverage") {
      if (value != "true" && value != "false")
        throw DomainError("config line " + std::to_string(lineno) + ": coverage must be true or false");
      cfg.coverage = value == "true";
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "summary") {
      cfg.summary = value;
    } else {
      throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  parse_body(cfg.body);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  return parse_config(in);
}

std::uint64_t replication_seed(std::uint64_t base_seed, long n, int replication) {
  return splitmix64(splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(n))) +
                    static_cast<std::uint64_t>(replication));
}

double rho_estimate(int d, long n, double v_k) {
  const double ln = std::log(static_cast<double>(n));
  return std::pow(v_k * ln / (unit_ball_volume(d - 1) * static_cast<double>(n)), 1.0 / (d - 1));
}

MetricMesh coverage_mesh(const ConvexBody& body, long n, double v_k, double resolution_factor) {
  const double rho = rho_estimate(body.dim(), n, v_k);
  MeshOptions opt;
  if (body.dim() == 3 && !body.is_sphere()) {
    const double chart_reach = std::sqrt(0.5 * body.curvature_bounds().k_min) * body.chart_radius();
    opt.build_graph = 2.0 * rho >= chart_reach;
  }
  return build_metric_mesh(body, rho / resolution_factor, opt);
}

namespace {

ExperimentRecord run_replication(const ConvexBody& body, const ScalingConstants& sc,
                                 const MetricMesh* mesh, int replication, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.n = sc.n;
  rec.replication = replication;
  rec.rho = kNaN;
  rec.V = kNaN;
  rec.T_spacing = kNaN;
  // A degenerate hull gets one fresh seed.
  for (int attempt = 0; attempt < 2; ++attempt) {
    rec.seed = attempt == 0 ? seed : splitmix64(seed);
    try {
      const SampleSet sample = sample_h_kappa(body, static_cast<std::size_t>(sc.n), rec.seed);
      InscribedPolytope poly = convex_hull(sample);
      rec.delta_H = hausdorff_distance(body, poly).delta_H;
      rec.T_hausdorff = standardize_hausdorff(rec.delta_H, sc);
      if (mesh) {
        const CoverageResult cov = max_spacing_statistic(sample, *mesh, sc.v_k);
        rec.rho = cov.rho;
        rec.V = cov.V;
        rec.T_spacing = standardize_spacing(cov.V, sc.n, sc.d);
      }
      rec.failed = false;
      rec.error.clear();
      break;
    } catch (const DegenerateError& e) {
      rec.failed = true;
      rec.error = e.what();
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
      break;
    }
  }
  rec.wall_time = seconds_since(t0);
  return rec;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

GumbelReport run_gumbel_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  GumbelReport report;
  report.config = cfg;
  const ConvexBody body = parse_body(cfg.body);
  const int d = body.dim();
  report.dim = d;
  report.v_k = v_kappa(body).value;
  report.median_target = median_scaling_target(d, report.v_k);
  report.ks_noise_band = 2.0 * ks_band95(static_cast<std::size_t>(cfg.replications));

  std::vector<double> ks_sequence;
  for (const long n : cfg.n_values) {
    const auto t0 = std::chrono::steady_clock::now();
    GumbelSummary summary;
    summary.n = n;
    summary.constants = scaling_constants(d, n, report.v_k);
    std::optional<MetricMesh> mesh;
    if (cfg.coverage) mesh.emplace(coverage_mesh(body, n, report.v_k, cfg.resolution_factor));

    std::vector<ExperimentRecord> records(static_cast<std::size_t>(cfg.replications));
    const long jobs = cfg.replications;
    // Seeds are fixed per job, so the schedule cannot change any record.
#pragma omp parallel for schedule(dynamic, 1)
    for (long r = 0; r < jobs; ++r)
      records[r] = run_replication(body, summary.constants, mesh ? &*mesh : nullptr,
                                   static_cast<int>(r),
                                   replication_seed(cfg.base_seed, n, static_cast<int>(r)));

    std::vector<double> t_h, t_s, v, delta;
    for (const auto& rec : records) {
      if (rec.failed) {
        ++summary.failures;
        continue;
      }
      ++summary.completed;
      t_h.push_back(rec.T_hausdorff);
      delta.push_back(rec.delta_H);
      if (cfg.coverage) {
        t_s.push_back(rec.T_spacing);
        v.push_back(rec.V);
      }
    }
    if (summary.failures * 100 > static_cast<std::size_t>(cfg.replications))
      throw NumericalError("more than 1% of the replications failed at n = " + std::to_string(n) +
                           " (first error: " +
                           std::find_if(records.begin(), records.end(),
                                        [](const ExperimentRecord& r) { return r.failed; })
                               ->error +
                           ")");
    if (t_h.empty()) throw NumericalError("no replication completed at n = " + std::to_string(n));

    summary.ks_hausdorff = ks_statistic(t_h, gumbel_cdf);
    summary.ks_hausdorff_p = ks_pvalue(summary.ks_hausdorff, t_h.size());
    ks_sequence.push_back(summary.ks_hausdorff);
    summary.ks_spacing = kNaN;
    summary.ks_spacing_p = kNaN;
    if (!t_s.empty()) {
      summary.ks_spacing = ks_statistic(t_s, gumbel_cdf);
      summary.ks_spacing_p = ks_pvalue(summary.ks_spacing, t_s.size());
      if (d == 2 && n <= 10000) {
        const double ks = ks_statistic(v, [n](double s) { return circle_max_spacing_cdf(n, s); });
        summary.ks_spacing_exact = ks;
        if (ks >= ks_band99(v.size())) report.exact_oracle_passed = false;
      }
    }
    const double scale = std::pow(static_cast<double>(n) / std::log(static_cast<double>(n)),
                                  2.0 / (d - 1));
    for (double& x : delta) x *= scale;
    summary.median_scaled = median_of(std::move(delta));
    summary.wall_seconds = seconds_since(t0);
    report.per_n.push_back(summary);
    report.records.insert(report.records.end(), records.begin(), records.end());
  }
  report.ks_trend_nonincreasing = nonincreasing_within(ks_sequence, report.ks_noise_band);
  return report;
}

void write_records_csv(const GumbelReport& report, std::ostream& out) {
  out << "n,replication,seed,delta_H,rho,V,T_hausdorff,T_spacing\n";
  for (const auto& r : report.records) {
    if (r.failed) continue;
    out << r.n << ',' << r.replication << ',' << r.seed << ',' << format_double(r.delta_H) << ','
        << format_double(r.rho) << ',' << format_double(r.V) << ','
        << format_double(r.T_hausdorff) << ',' << format_double(r.T_spacing) << '\n';
  }
}

std::string summary_json(const GumbelReport& report) {
  using nlohmann::json;
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  const auto& c = report.config;
  j["config"] = {{"body", c.body},
                 {"n_values", c.n_values},
                 {"replications", c.replications},
                 {"base_seed", c.base_seed},
                 {"resolution_factor", c.resolution_factor},
                 {"coverage", c.coverage}};
  j["dim"] = report.dim;
  j["v_kappa"] = report.v_k;
  j["median_target"] = report.median_target;
  json per_n = json::array();
  for (const auto& s : report.per_n) {
    json e = {{"n", s.n},
              {"c_n", s.constants.c_n},
              {"a_n", s.constants.a_n},
              {"b_n", s.constants.b_n},
              {"completed", s.completed},
              {"failures", s.failures},
              {"ks_hausdorff", s.ks_hausdorff},
              {"ks_hausdorff_p", s.ks_hausdorff_p},
              {"ks_spacing", num(s.ks_spacing)},
              {"ks_spacing_p", num(s.ks_spacing_p)},
              {"median_scaled", s.median_scaled},
              {"wall_seconds", s.wall_seconds}};
    e["ks_spacing_exact"] = s.ks_spacing_exact ? json(*s.ks_spacing_exact) : json(nullptr);
    per_n.push_back(std::move(e));
  }
  j["per_n"] = std::move(per_n);
  j["ks_noise_band"] = report.ks_noise_band;
  j["ks_trend_nonincreasing"] = report.ks_trend_nonincreasing;
  j["exact_oracle_passed"] = report.exact_oracle_passed;
  return j.dump(2);
}

double scaled_median(const std::vector<ExperimentRecord>& records, long n, int d) {
  const double scale = std::pow(static_cast<double>(n) / std::log(static_cast<double>(n)),
                                2.0 / (d - 1));
  std::vector<double> v;
  for (const auto& r : records)
    if (r.n == n && !r.failed) v.push_back(scale * r.delta_H);
  if (v.empty()) throw DomainError("no completed records at n = " + std::to_string(n));
  return median_of(std::move(v));
}

bool nonincreasing_within(const std::vector<double>& ks, double band) {
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] > ks[i - 1] + band) return false;
  return true;
}

HdCoveringResult verify_hd_covering(const ConvexBody& body, long n, std::uint64_t seed,
                                    MetricMesh& mesh, double resolution_factor) {
  const SampleSet sample = sample_h_kappa(body, static_cast<std::size_t>(n), seed);
  InscribedPolytope poly = convex_hull(sample);
  HdCoveringResult out;
  out.delta_H = hausdorff_distance(body, poly).delta_H;

  auto cover = [&]() {
    try {
      return covering_radius(sample, mesh).rho;
    } catch (const ChartError&) {
      if (mesh.has_graph()) throw;
      MeshOptions opt;
      opt.build_graph = true;
      mesh = build_metric_mesh(body, mesh.resolution(), opt);
      return covering_radius(sample, mesh).rho;
    }
  };
  out.rho = cover();
  if (mesh.max_edge() > 0.25 * out.rho) {
    MeshOptions opt;
    opt.build_graph = mesh.has_graph();
    mesh = build_metric_mesh(body, out.rho / resolution_factor, opt);
    out.rho = cover();
    if (mesh.max_edge() > 0.25 * out.rho)
      throw DomainError("mesh resolution insufficient for rho = " + std::to_string(out.rho));
  }
  out.residual = std::abs(out.delta_H - 0.5 * out.rho * out.rho);
  out.C_hat = out.residual / (out.rho * out.rho * out.rho);
  return out;
}

HdLadder hd_covering_ladder(const ConvexBody& body, const std::vector<long>& n_values, int seeds,
                            std::uint64_t base_seed, double resolution_factor) {
  if (seeds < 1) throw DomainError("need at least one seed");
  const double v_k = v_kappa(body).value;
  HdLadder ladder;
  for (const long n : n_values) {
    MetricMesh mesh = coverage_mesh(body, n, v_k, resolution_factor);
    HdLadderRow row;
    row.n = n;
    for (int s = 0; s < seeds; ++s) {
      row.runs.push_back(
          verify_hd_covering(body, n, replication_seed(base_seed, n, s), mesh, resolution_factor));
      row.C_hat = std::max(row.C_hat, row.runs.back().C_hat);
      row.max_rho = std::max(row.max_rho, row.runs.back().rho);
    }
    if (!ladder.rows.empty() && row.C_hat > ladder.rows.back().C_hat) ladder.no_growth = false;
    ladder.rows.push_back(std::move(row));
  }
  return ladder;
}

std::vector<CircleResidual> circle_residuals(const std::vector<double>& rhos) {
  std::vector<CircleResidual> out;
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    // 1 - cos(rho) = 2 sin^2(rho / 2) avoids cancellation.
    const double s = std::sin(0.5 * rho);
    out.push_back({rho, std::abs(2.0 * s * s - 0.5 * rho * rho)});
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("log-log slope needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto [intercept, slope] = boost::math::statistics::simple_ordinary_least_squares(lx, ly);
  (void)intercept;
  return slope;
}

VolumeLadder volume_ladder(const ConvexBody& body, const std::vector<double>& r_values,
                           const std::vector<Vec3>& center_normals, const MetricMesh& mesh) {
  for (std::size_t i = 1; i < r_values.size(); ++i)
    if (!(r_values[i] < r_values[i - 1])) throw DomainError("r_values must be decreasing");
  const int d = body.dim();
  const double kappa = unit_ball_volume(d - 1);
  VolumeLadder ladder;
  for (const Vec3& u : center_normals) {
    const BoundaryPoint x = body.point_from_normal(u);
    double previous = std::numeric_limits<double>::infinity();
    for (double r : r_values) {
      VolumeLadderRow row;
      row.center = x.ambient;
      row.r = r;
      row.volume = geodesic_ball_volume(body, x, r, mesh);
      row.volume_mesh = d == 2 ? row.volume : geodesic_ball_volume_mesh(body, x, r, mesh);
      row.defect = std::abs(row.volume - kappa * std::pow(r, d - 1));
      row.defect_ratio = row.defect / std::pow(r, d);
      if (row.defect_ratio > previous) ladder.bounded_non_growing = false;
      previous = row.defect_ratio;
      ladder.max_defect_ratio = std::max(ladder.max_defect_ratio, row.defect_ratio);
      ladder.rows.push_back(row);
    }
  }
  return ladder;
}

MedianCheck median_scaling_check(const ConvexBody& body, const std::vector<long>& n_values,
                                 int replications, std::uint64_t base_seed) {
  ExperimentConfig cfg;
  cfg.n_values = n_values;
  cfg.replications = replications;
  cfg.base_seed = base_seed;
  cfg.validate();
  const int d = body.dim();
  MedianCheck out;
  const double v_k = v_kappa(body).value;
  out.target = median_scaling_target(d, v_k);
  for (const long n : n_values) {
    std::vector<ExperimentRecord> records(static_cast<std::size_t>(replications));
    const ScalingConstants sc = scaling_constants(d, n, v_k);
#pragma omp parallel for schedule(dynamic, 1)
    for (long r = 0; r < replications; ++r)
      records[r] = run_replication(body, sc, nullptr, static_cast<int>(r),
                                   replication_seed(base_seed, n, static_cast<int>(r)));
    MedianRow row;
    row.n = n;
    row.median = scaled_median(records, n, d);
    row.distance_to_target = std::abs(row.median - out.target);
    if (!out.rows.empty() &&
        row.distance_to_target > out.rows.back().distance_to_target + 0.1 * out.target)
      out.drifts_toward_target = false;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace capcover
