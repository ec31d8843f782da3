#include "capcover/kernels.hpp"

#include <omp.h>

#include <exception>
#include <limits>

namespace capcover {

bool can_parallelize() { return !omp_in_parallel(); }

std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f,
                                 Exec exec) {
  std::vector<double> out(n);
  const long count = static_cast<long>(n);
  if (exec == Exec::kSerial) {
    for (long i = 0; i < count; ++i) out[i] = f(static_cast<std::size_t>(i));
    return out;
  }
  // Exceptions may not leave an OpenMP region; one of them is rethrown.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 256) if (can_parallelize())
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(capcover_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ArgMax argmax(std::span<const double> values, Exec exec) {
  if (values.empty()) throw DomainError("argmax of an empty range");
  const long count = static_cast<long>(values.size());
  if (exec == Exec::kSerial) {
    ArgMax best{0, values[0]};
    for (long i = 1; i < count; ++i)
      if (values[i] > best.value) best = {static_cast<std::size_t>(i), values[i]};
    return best;
  }
  ArgMax best{0, values[0]};
#pragma omp parallel if (can_parallelize())
  {
    ArgMax local{0, -std::numeric_limits<double>::infinity()};
#pragma omp for schedule(static) nowait
    for (long i = 0; i < count; ++i)
      if (values[i] > local.value) local = {static_cast<std::size_t>(i), values[i]};
#pragma omp critical(capcover_argmax)
    {
      if (local.value > best.value || (local.value == best.value && local.index < best.index))
        best = local;
    }
  }
  return best;
}

std::vector<double> distances_to_polytope(const InscribedPolytope& poly,
                                          std::span<const Vec3> queries, Exec exec) {
  if (poly.is_degenerate || poly.facets.empty())
    throw DegenerateError("distance to a degenerate polytope");
  return parallel_map(
      queries.size(),
      [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : poly.facets) best = std::min(best, distance_to_facet(poly, f, queries[i]));
        return best;
      },
      exec);
}

ArgMax brute_force_hausdorff(const InscribedPolytope& poly, std::span<const Vec3> queries,
                             Exec exec) {
  const auto d = distances_to_polytope(poly, queries, exec);
  return argmax(d, exec);
}

}  // namespace capcover
