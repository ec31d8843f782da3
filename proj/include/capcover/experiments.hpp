#pragma once

// Monte Carlo drivers: the Gumbel experiment for delta_H and the spacing
// statistic, the delta_H versus rho^2/2 residual study, the geodesic ball
// volume ladder and the median scaling check.

#include "capcover/bodies.hpp"
#include "capcover/limits.hpp"
#include "capcover/metric.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace capcover {

/// "ball:d=3,r=1", "sphere", "circle", "ellipsoid:2,1,1" or
/// "quartic:d=3,eps=0.3" (d and eps default to 3 and 0.3). Throws
/// DomainError on anything else.
ConvexBody parse_body(const std::string& spec);

struct ExperimentConfig {
  std::string body = "ball:d=3,r=1";
  std::vector<long> n_values{1000};
  int replications = 100;
  std::uint64_t base_seed = 1;
  /// Mesh resolution = rho_estimate / resolution_factor.
  double resolution_factor = 8.0;
  /// Compute rho and V; when false only delta_H is recorded.
  bool coverage = true;
  std::string output;   // records CSV; empty for none
  std::string summary;  // summary JSON; empty for none

  /// Throws DomainError unless n_values is strictly increasing with n >= 16
  /// and replications >= 1.
  void validate() const;
};

/// Flat key=value text; '#' starts a comment. Keys: body, n_values
/// (comma separated), replications, base_seed, resolution_factor, coverage
/// (true/false), output, summary.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Seed of replication r at sample size n; independent of execution order.
std::uint64_t replication_seed(std::uint64_t base_seed, long n, int replication);

/// (v_kappa / kappa_{d-1} * ln n / n)^{1/(d-1)}, the scale of rho.
double rho_estimate(int d, long n, double v_k);

struct ExperimentRecord {
  long n = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  double delta_H = 0.0;
  double rho = 0.0;  // NaN when coverage is off
  double V = 0.0;    // NaN when coverage is off
  double T_hausdorff = 0.0;
  double T_spacing = 0.0;
  double wall_time = 0.0;  // seconds; never written to the CSV
  bool failed = false;
  std::string error;
};

struct GumbelSummary {
  long n = 0;
  ScalingConstants constants;
  std::size_t completed = 0;
  std::size_t failures = 0;
  double ks_hausdorff = 0.0;
  double ks_hausdorff_p = 0.0;
  double ks_spacing = 0.0;  // NaN when coverage is off
  double ks_spacing_p = 0.0;
  /// d = 2 and n <= 10^4 only: KS of V against the exact circle oracle.
  std::optional<double> ks_spacing_exact;
  double median_scaled = 0.0;  // median of (n / ln n)^{2/(d-1)} delta_H
  double wall_seconds = 0.0;
};

struct GumbelReport {
  ExperimentConfig config;
  int dim = 3;
  double v_k = 0.0;
  double median_target = 0.0;
  std::vector<ExperimentRecord> records;  // sorted by (n, replication)
  std::vector<GumbelSummary> per_n;
  /// 2 * 1.36 / sqrt(N): allowed KS increase between consecutive n.
  double ks_noise_band = 0.0;
  bool ks_trend_nonincreasing = true;
  /// Hard gate: every exact-oracle KS below the 99% band.
  bool exact_oracle_passed = true;
};

/// Runs every (n, replication) job. Degenerate hulls are re-seeded once;
/// throws NumericalError when more than 1% of the replications at some n
/// fail.
GumbelReport run_gumbel_experiment(const ExperimentConfig& cfg);

/// Column order: n,replication,seed,delta_H,rho,V,T_hausdorff,T_spacing.
void write_records_csv(const GumbelReport& report, std::ostream& out);
std::string summary_json(const GumbelReport& report);

/// Median of (n / ln n)^{2/(d-1)} delta_H over the completed records at n.
double scaled_median(const std::vector<ExperimentRecord>& records, long n, int d);

/// KS sequence check: ks[i+1] <= ks[i] + band for all i.
bool nonincreasing_within(const std::vector<double>& ks, double band);

/// Builds the mesh for coverage at sample size n, with the Dijkstra graph
/// when far pairs can leave the tangent charts.
MetricMesh coverage_mesh(const ConvexBody& body, long n, double v_k, double resolution_factor);

struct HdCoveringResult {
  double delta_H = 0.0;
  double rho = 0.0;
  double residual = 0.0;  // |delta_H - rho^2 / 2|
  double C_hat = 0.0;     // residual / rho^3
};

/// One sample of size n: delta_H from the hull and rho from the mesh. If rho
/// comes out finer than four mesh edges the mesh is refined once, then
/// DomainError is thrown.
HdCoveringResult verify_hd_covering(const ConvexBody& body, long n, std::uint64_t seed,
                                    MetricMesh& mesh, double resolution_factor = 8.0);

struct HdLadderRow {
  long n = 0;
  std::vector<HdCoveringResult> runs;
  double C_hat = 0.0;  // max over runs
  double max_rho = 0.0;
};

struct HdLadder {
  std::vector<HdLadderRow> rows;
  /// C_hat at each n is at most C_hat at the previous n.
  bool no_growth = true;
};

HdLadder hd_covering_ladder(const ConvexBody& body, const std::vector<long>& n_values, int seeds,
                            std::uint64_t base_seed, double resolution_factor = 8.0);

struct CircleResidual {
  double rho = 0.0;
  double residual = 0.0;  // |(1 - cos rho) - rho^2 / 2|
};

/// Analytic unit-circle residuals and the least-squares slope of
/// ln residual against ln rho.
std::vector<CircleResidual> circle_residuals(const std::vector<double>& rhos);
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct VolumeLadderRow {
  Vec3 center = Vec3::Zero();
  double r = 0.0;
  double volume = 0.0;       // polar quadrature (exact arclength in d = 2)
  double volume_mesh = 0.0;  // mesh summation cross-check
  double defect = 0.0;       // |volume - kappa_{d-1} r^{d-1}|
  double defect_ratio = 0.0; // defect / r^d
};

struct VolumeLadder {
  std::vector<VolumeLadderRow> rows;  // grouped by centre, r as given
  /// Per centre, defect / r^d does not grow as r decreases.
  bool bounded_non_growing = true;
  double max_defect_ratio = 0.0;
};

/// Centres are boundary points given by their outward normals. r_values
/// must be decreasing.
VolumeLadder volume_ladder(const ConvexBody& body, const std::vector<double>& r_values,
                           const std::vector<Vec3>& center_normals, const MetricMesh& mesh);

struct MedianRow {
  long n = 0;
  double median = 0.0;
  double distance_to_target = 0.0;
};

struct MedianCheck {
  double target = 0.0;
  std::vector<MedianRow> rows;
  /// |median - target| does not grow with n beyond 10% of the target.
  bool drifts_toward_target = true;
};

MedianCheck median_scaling_check(const ConvexBody& body, const std::vector<long>& n_values,
                                 int replications, std::uint64_t base_seed);

}  // namespace capcover
