#include "capcover/limits.hpp"

#include "capcover/types.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace capcover {

double unit_ball_volume(int k) {
  if (k < 0) throw DomainError("unit ball dimension must be >= 0");
  return std::exp(0.5 * k * std::log(kPi) - std::lgamma(0.5 * k + 1.0));
}

double alpha_constant(int d) {
  if (d < 2) throw DomainError("alpha needs d >= 2");
  const double log_ratio = 0.5 * std::log(kPi) + std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d);
  return std::exp((d - 2) * log_ratio - std::lgamma(static_cast<double>(d)));
}

ScalingConstants scaling_constants(int d, long n, double v_k) {
  if (d < 2) throw DomainError("scaling constants need d >= 2");
  if (n < 16) throw DomainError("scaling constants need n >= 16 so that ln ln n > 0");
  if (!(v_k > 0.0)) throw DomainError("v_k must be positive");
  ScalingConstants sc;
  sc.d = d;
  sc.n = n;
  sc.v_k = v_k;
  sc.kappa_vol = unit_ball_volume(d - 1);
  sc.alpha = alpha_constant(d);
  const double ln = std::log(static_cast<double>(n));
  sc.c_n = std::pow(v_k / sc.kappa_vol * ln / static_cast<double>(n), 2.0 / (d - 1));
  sc.b_n = sc.c_n / ((d - 1) * ln);
  sc.a_n = (0.5 + ((d - 2) * std::log(ln) + std::log(sc.alpha)) / ((d - 1) * ln)) * sc.c_n;
  return sc;
}

double median_scaling_target(int d, double v_k) {
  if (d < 2) throw DomainError("d must be >= 2");
  return 0.5 * std::pow(v_k / unit_ball_volume(d - 1), 2.0 / (d - 1));
}

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double gumbel_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return -std::log(-std::log(p));
}

double standardize_hausdorff(double delta_H, const ScalingConstants& sc) {
  return (delta_H - sc.a_n) / sc.b_n;
}

double standardize_spacing(double V, long n, int d) {
  if (n < 16) throw DomainError("standardization needs n >= 16");
  const double ln = std::log(static_cast<double>(n));
  return static_cast<double>(n) * V - ln - (d - 2) * std::log(ln) - std::log(alpha_constant(d));
}

double circle_max_spacing_cdf(long n, double s) {
  if (n < 2 || n > 10000) throw DomainError("circle spacing oracle needs 2 <= n <= 10^4");
  if (s >= 1.0) return 1.0;
  if (s * static_cast<double>(n) <= 1.0) return 0.0;
  const long kmax = std::min(n, static_cast<long>(std::floor(1.0 / s)));
  const double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
  // Neumaier summation.
  double sum = 0.0, comp = 0.0, largest = 0.0;
  for (long k = 0; k <= kmax; ++k) {
    const double rest = 1.0 - static_cast<double>(k) * s;
    if (rest <= 0.0) break;
    const double log_term = log_nfact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                            (n - 1) * std::log(rest);
    const double term = (k % 2 == 0 ? 1.0 : -1.0) * std::exp(log_term);
    largest = std::max(largest, std::abs(term));
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  const double error = largest * static_cast<double>(kmax + 1) * std::numeric_limits<double>::epsilon();
  if (error > 1e-9)
    throw NumericalError("circle spacing sum is numerically unstable here (error bound " +
                         std::to_string(error) + ")");
  return std::clamp(sum + comp, 0.0, 1.0);
}

namespace {

std::vector<double> sorted_copy(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("goodness-of-fit statistic of an empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  return x;
}

// Largest deviations above and below the CDF.
std::pair<double, double> one_sample_deviations(std::span<const double> samples,
                                                const std::function<double(double)>& cdf) {
  const auto x = sorted_copy(samples);
  const double n = static_cast<double>(x.size());
  double plus = 0.0, minus = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    plus = std::max(plus, (i + 1) / n - f);
    minus = std::max(minus, f - i / n);
  }
  return {plus, minus};
}

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  const auto [plus, minus] = one_sample_deviations(samples, cdf);
  return std::max(plus, minus);
}

double ks_pvalue(double D, std::size_t N) {
  const double r = std::sqrt(static_cast<double>(N));
  return kolmogorov_tail((r + 0.12 + 0.11 / r) * D);
}

double kuiper_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  const auto [plus, minus] = one_sample_deviations(samples, cdf);
  return plus + minus;
}

double kuiper_pvalue(double V, std::size_t N) {
  const double r = std::sqrt(static_cast<double>(N));
  const double lambda = (r + 0.155 + 0.24 / r) * V;
  if (lambda < 0.4) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double l2 = k * k * lambda * lambda;
    const double term = (4.0 * l2 - 1.0) * std::exp(-2.0 * l2);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return d;
}

double ks_two_sample_pvalue(double D, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * m / (static_cast<double>(n) + m);
  const double r = std::sqrt(ne);
  return kolmogorov_tail((r + 0.12 + 0.11 / r) * D);
}

ChiSquareResult chi_square_test(std::span<const std::size_t> observed,
                                std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2)
    throw DomainError("chi-square needs matching counts and probabilities, at least 2 cells");
  double total = 0.0, psum = 0.0;
  for (std::size_t c : observed) total += static_cast<double>(c);
  for (double p : probabilities) {
    if (!(p > 0.0)) throw DomainError("chi-square cell probabilities must be positive");
    psum += p;
  }
  ChiSquareResult out;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probabilities[i] / psum;
    const double diff = static_cast<double>(observed[i]) - expected;
    out.statistic += diff * diff / expected;
  }
  out.dof = static_cast<int>(observed.size()) - 1;
  const boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

double ks_band95(std::size_t N) { return 1.36 / std::sqrt(static_cast<double>(N)); }
double ks_band99(std::size_t N) { return 1.63 / std::sqrt(static_cast<double>(N)); }

}  // namespace capcover
