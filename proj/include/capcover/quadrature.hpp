#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

namespace capcover {

struct QuadNode {
  double x;
  double w;
};

/// Composite 10-point Gauss-Legendre nodes on [a, b].
inline std::vector<QuadNode> gauss_legendre_nodes(double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  std::vector<QuadNode> out;
  out.reserve(static_cast<std::size_t>(panels) * 10);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      if (abscissa[i] == 0.0) {
        out.push_back({mid, half * weights[i]});
        continue;
      }
      out.push_back({mid - half * abscissa[i], half * weights[i]});
      out.push_back({mid + half * abscissa[i], half * weights[i]});
    }
  }
  return out;
}

template <class F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  for (const auto& node : gauss_legendre_nodes(a, b, panels)) sum += node.w * f(node.x);
  return sum;
}

}  // namespace capcover
