#pragma once

// Constants and distributional tools for the extreme-value limits of the
// Hausdorff distance and the maximal-spacing statistic. All logarithms are
// natural.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace capcover {

/// Volume of the k-dimensional Euclidean unit ball, pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(int k);

/// alpha(d) = 1/(d-1)! * (sqrt(pi) Gamma((d+1)/2) / Gamma(d/2))^{d-2}.
double alpha_constant(int d);

struct ScalingConstants {
  int d = 3;
  long n = 0;
  double v_k = 0.0;
  double kappa_vol = 0.0;  // kappa_{d-1}
  double alpha = 0.0;
  double c_n = 0.0;
  double a_n = 0.0;
  double b_n = 0.0;
};

/// c_n = (v_k / kappa_{d-1} * ln n / n)^{2/(d-1)}, b_n = c_n / ((d-1) ln n),
/// a_n = (1/2 + ((d-2) ln ln n + ln alpha) / ((d-1) ln n)) c_n.
/// Requires d >= 2, n >= 16 and v_k > 0.
ScalingConstants scaling_constants(int d, long n, double v_k);

/// (1/2) (v_k / kappa_{d-1})^{2/(d-1)}: the limit of (n / ln n)^{2/(d-1)} delta_H.
double median_scaling_target(int d, double v_k);

double gumbel_cdf(double x);
double gumbel_quantile(double p);

double standardize_hausdorff(double delta_H, const ScalingConstants& sc);
/// n V - ln n - (d-2) ln ln n - ln alpha(d).
double standardize_spacing(double V, long n, int d);

/// P[max spacing of n uniform points on a unit-length circle <= s], by the
/// alternating inclusion-exclusion sum in log domain with compensated
/// summation. Valid for 2 <= n <= 10^4; throws NumericalError when the
/// cancellation exceeds double precision.
double circle_max_spacing_cdf(long n, double s);

/// sup |F_N - F| for the empirical CDF of the samples. Throws on empty input.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov tail probability with Stephens' finite-N correction.
double ks_pvalue(double D, std::size_t N);

/// Kuiper's V = D+ + D- (rotation invariant, for circular data).
double kuiper_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
double kuiper_pvalue(double V, std::size_t N);

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_two_sample_pvalue(double D, std::size_t n, std::size_t m);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed counts against cell probabilities.
ChiSquareResult chi_square_test(std::span<const std::size_t> observed,
                                std::span<const double> probabilities);

/// 1.36 / sqrt(N) and 1.63 / sqrt(N): 95% and 99% one-sample Kolmogorov bands.
double ks_band95(std::size_t N);
double ks_band99(std::size_t N);

}  // namespace capcover
