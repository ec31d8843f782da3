#pragma once

// Data-parallel kernels. Each has a serial reference path (Exec::kSerial)
// and an OpenMP path; both produce identical results, with ties in every
// argmax resolved to the lowest index.

#include "capcover/hull.hpp"
#include "capcover/types.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace capcover {

enum class Exec { kSerial, kParallel };

/// out[i] = f(i) for i in [0, n). f must be safe to call concurrently.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f,
                                 Exec exec = Exec::kParallel);

struct ArgMax {
  std::size_t index = 0;
  double value = 0.0;
};

/// Largest entry; the lowest index wins ties. Requires a nonempty span.
ArgMax argmax(std::span<const double> values, Exec exec = Exec::kParallel);

/// For each query point the Euclidean distance to the nearest facet of the
/// polytope (brute force over all facets).
std::vector<double> distances_to_polytope(const InscribedPolytope& poly,
                                          std::span<const Vec3> queries,
                                          Exec exec = Exec::kParallel);

/// max over queries of the distance to the polytope: the direct one-sided
/// Hausdorff distance when the queries sample the body boundary.
ArgMax brute_force_hausdorff(const InscribedPolytope& poly, std::span<const Vec3> queries,
                             Exec exec = Exec::kParallel);

/// True when the caller may start an OpenMP region (not already inside one).
bool can_parallelize();

}  // namespace capcover
