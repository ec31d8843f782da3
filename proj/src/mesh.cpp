#include "capcover/kdtree.hpp"
#include "capcover/kernels.hpp"
#include "capcover/metric.hpp"
#include "capcover/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_set>

namespace capcover {

namespace {

double wrap_angle(double t) {
  t = std::fmod(t, 2.0 * kPi);
  return t < 0.0 ? t + 2.0 * kPi : t;
}

// d = 2: gamma arclength density with respect to the radial angle.
double arclength_density(const ConvexBody& body, double theta) {
  const Vec3 w(std::cos(theta), std::sin(theta), 0.0);
  return std::sqrt(body.gaussian_curvature(body.radial_point(w))) * body.area_jacobian(w);
}

double arclength_between(const ConvexBody& body, double a, double b) {
  if (body.is_sphere()) return std::sqrt(body.sphere_radius()) * (b - a);
  return gauss_legendre([&](double t) { return arclength_density(body, t); }, a, b, 1);
}

double solve_angle(const ConvexBody& body, double lo, double hi, double base, double target) {
  if (target <= base) return lo;
  auto f = [&](double t) { return base + arclength_between(body, lo, t) - target; };
  const double flo = f(lo), fhi = f(hi);
  if (fhi <= 0.0) return hi;
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(50),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

// Metric area of a surface triangle, measured in the chart at the boundary
// point above its centroid.
double metric_triangle_area(const ConvexBody& body, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 base = body.radial_point((a + b + c) / 3.0);
  const Frame fr = body.frame_for_normal(body.outward_normal(base));
  ChartVec ya(2), yb(2), yc(2);
  for (int i = 0; i < 2; ++i) {
    ya(i) = fr.tangent[i].dot(a - base);
    yb(i) = fr.tangent[i].dot(b - base);
    yc(i) = fr.tangent[i].dot(c - base);
  }
  const ChartVec e1 = yb - ya, e2 = yc - ya;
  const double chart_area = 0.5 * std::abs(e1(0) * e2(1) - e1(1) * e2(0));
  const ChartVec centroid = (ya + yb + yc) / 3.0;
  return chart_area * metric_volume_density(body.graph_jet(fr, base, centroid));
}

double metric_edge_length(const ConvexBody& body, const Vec3& a, const Vec3& b) {
  if (body.is_sphere()) return geodesic_distance_exact_sphere(a, b, body.sphere_radius());
  return chord_metric_length(body, a, b);
}

struct Icosahedron {
  std::array<Vec3, 12> v;
  std::array<std::array<int, 3>, 20> f;
};

Icosahedron icosahedron() {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  Icosahedron ico;
  ico.v = {Vec3(-1, p, 0), Vec3(1, p, 0),  Vec3(-1, -p, 0), Vec3(1, -p, 0),
           Vec3(0, -1, p), Vec3(0, 1, p),  Vec3(0, -1, -p), Vec3(0, 1, -p),
           Vec3(p, 0, -1), Vec3(p, 0, 1),  Vec3(-p, 0, -1), Vec3(-p, 0, 1)};
  for (auto& x : ico.v) x.normalize();
  ico.f = {{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};
  return ico;
}

}  // namespace

void MetricMesh::build_polygon(double resolution) {
  const ConvexBody& body = body_;
  constexpr int kGrid = 1024;
  std::vector<double> grid_cum(kGrid + 1, 0.0);
  for (int j = 0; j < kGrid; ++j)
    grid_cum[j + 1] = grid_cum[j] + arclength_between(body, 2.0 * kPi * j / kGrid,
                                                      2.0 * kPi * (j + 1) / kGrid);
  const double total = grid_cum.back();
  const auto count = static_cast<std::size_t>(std::ceil(total / resolution));
  const std::size_t n = std::max<std::size_t>(count, 3);
  angles_.resize(n);
  cumulative_.resize(n + 1);
  positions_.resize(n);
  normals_.resize(n);
  int j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n);
    while (j + 1 < kGrid && grid_cum[j + 1] <= s) ++j;
    angles_[k] = solve_angle(body, 2.0 * kPi * j / kGrid, 2.0 * kPi * (j + 1) / kGrid,
                             grid_cum[j], s);
    cumulative_[k] = s;
  }
  cumulative_[n] = total;
  for (std::size_t k = 0; k < n; ++k) {
    positions_[k] = body.radial_point(Vec3(std::cos(angles_[k]), std::sin(angles_[k]), 0.0));
    normals_[k] = body.outward_normal(positions_[k]);
    faces_.push_back({static_cast<int>(k), static_cast<int>((k + 1) % n), -1});
  }
  max_edge_ = total / static_cast<double>(n);
  frequency_ = static_cast<int>(n);
}

void MetricMesh::build_icosphere(int m) {
  const Icosahedron ico = icosahedron();
  std::map<std::pair<int, int>, int> edge_id;
  for (const auto& f : ico.f)
    for (int i = 0; i < 3; ++i) {
      const int a = std::min(f[i], f[(i + 1) % 3]), b = std::max(f[i], f[(i + 1) % 3]);
      edge_id.emplace(std::make_pair(a, b), static_cast<int>(edge_id.size()));
    }
  const std::size_t per_edge = m - 1;
  const std::size_t per_face = static_cast<std::size_t>(m - 1) * (m - 2) / 2;
  const std::size_t nv = 12 + 30 * per_edge + 20 * per_face;
  std::vector<Vec3> dirs(nv);
  for (int i = 0; i < 12; ++i) dirs[i] = ico.v[i];
  for (const auto& [key, e] : edge_id)
    for (int k = 1; k < m; ++k)
      dirs[12 + e * per_edge + (k - 1)] =
          (ico.v[key.first] + (static_cast<double>(k) / m) * (ico.v[key.second] - ico.v[key.first]))
              .normalized();

  // Global id of grid point (i, j) of face f: A + i/m (B - A) + j/m (C - A).
  auto on_edge = [&](int a, int b, int k) {
    if (a < b) return static_cast<int>(12 + edge_id.at({a, b}) * per_edge + (k - 1));
    return static_cast<int>(12 + edge_id.at({b, a}) * per_edge + (m - k - 1));
  };
  std::vector<int> row_offset(m + 1, 0);
  for (int i = 1; i + 1 < m; ++i) row_offset[i + 1] = row_offset[i] + (m - 1 - i);
  auto grid_id = [&](int f, int i, int j) -> int {
    const auto& t = ico.f[f];
    if (i == 0 && j == 0) return t[0];
    if (i == m) return t[1];
    if (j == m) return t[2];
    if (j == 0) return on_edge(t[0], t[1], i);
    if (i == 0) return on_edge(t[0], t[2], j);
    if (i + j == m) return on_edge(t[1], t[2], j);
    return static_cast<int>(12 + 30 * per_edge + f * per_face + row_offset[i] + (j - 1));
  };
  for (int f = 0; f < 20; ++f) {
    const Vec3& A = ico.v[ico.f[f][0]];
    const Vec3& B = ico.v[ico.f[f][1]];
    const Vec3& C = ico.v[ico.f[f][2]];
    for (int i = 1; i < m; ++i)
      for (int j = 1; i + j < m; ++j)
        dirs[grid_id(f, i, j)] =
            (A + (static_cast<double>(i) / m) * (B - A) + (static_cast<double>(j) / m) * (C - A))
                .normalized();
    for (int i = 0; i < m; ++i)
      for (int j = 0; i + j < m; ++j) {
        faces_.push_back({grid_id(f, i, j), grid_id(f, i + 1, j), grid_id(f, i, j + 1)});
        if (i + j + 2 <= m)
          faces_.push_back({grid_id(f, i + 1, j), grid_id(f, i + 1, j + 1), grid_id(f, i, j + 1)});
      }
  }

  positions_.resize(nv);
  normals_ = dirs;
  const ConvexBody& body = body_;
  parallel_map(nv, [&](std::size_t i) {
    positions_[i] = body.inverse_normal(dirs[i]);
    return 0.0;
  });
  const auto face_max = parallel_map(faces_.size(), [&](std::size_t k) {
    const auto& t = faces_[k];
    double best = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = t[i], b = t[(i + 1) % 3];
      if (a < b) best = std::max(best, metric_edge_length(body, positions_[a], positions_[b]));
    }
    return best;
  });
  max_edge_ = argmax(face_max).value;
  frequency_ = m;
}

void MetricMesh::build_graph(int rings) {
  if (dim() != 3) throw DomainError("the Dijkstra graph is built for d = 3 meshes");
  if (rings < 1) throw DomainError("link_rings must be >= 1");
  const std::size_t nv = num_vertices();
  std::vector<std::vector<int>> ring1(nv);
  for (const auto& t : faces_)
    for (int i = 0; i < 3; ++i) ring1[t[i]].push_back(t[(i + 1) % 3]);
  for (auto& r : ring1) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  adj_offsets_.assign(nv + 1, 0);
  std::vector<std::vector<int>> links(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<int> frontier{static_cast<int>(v)};
    std::unordered_set<int> seen{static_cast<int>(v)};
    for (int r = 0; r < rings; ++r) {
      std::vector<int> next;
      for (int u : frontier)
        for (int w : ring1[u])
          if (seen.insert(w).second) next.push_back(w);
      frontier = std::move(next);
    }
    seen.erase(static_cast<int>(v));
    links[v].assign(seen.begin(), seen.end());
    std::sort(links[v].begin(), links[v].end());
    adj_offsets_[v + 1] = adj_offsets_[v] + static_cast<int>(links[v].size());
  }
  adj_targets_.resize(adj_offsets_.back());
  adj_weights_.resize(adj_offsets_.back());
  const ConvexBody& body = body_;
  parallel_map(nv, [&](std::size_t v) {
    for (std::size_t k = 0; k < links[v].size(); ++k) {
      const int w = links[v][k];
      adj_targets_[adj_offsets_[v] + k] = w;
      adj_weights_[adj_offsets_[v] + k] = metric_edge_length(body, positions_[v], positions_[w]);
    }
    return 0.0;
  });
  vertex_tree_ = std::make_shared<const KdTree>(positions_);
}

double MetricMesh::total_volume() const {
  const ConvexBody& body = body_;
  if (dim() == 2) {
    double sum = 0.0;
    for (const auto& e : faces_) sum += chord_metric_length(body, positions_[e[0]], positions_[e[1]]);
    return sum;
  }
  const auto areas = parallel_map(faces_.size(), [&](std::size_t k) {
    const auto& t = faces_[k];
    return metric_triangle_area(body, positions_[t[0]], positions_[t[1]], positions_[t[2]]);
  });
  double sum = 0.0;
  for (double a : areas) sum += a;
  return sum;
}

double MetricMesh::arclength(const Vec3& x) const {
  if (dim() != 2) throw DomainError("arclength is defined for d = 2 meshes");
  const double theta = wrap_angle(std::atan2(x.y(), x.x()));
  if (body_.is_sphere()) return std::sqrt(body_.sphere_radius()) * theta;
  const auto it = std::upper_bound(angles_.begin(), angles_.end(), theta);
  const std::size_t k = static_cast<std::size_t>(it - angles_.begin()) - 1;
  return cumulative_[k] + arclength_between(body_, angles_[k], theta);
}

Vec3 MetricMesh::point_at_arclength(double s) const {
  if (dim() != 2) throw DomainError("arclength is defined for d = 2 meshes");
  const double total = total_length();
  s = std::fmod(s, total);
  if (s < 0.0) s += total;
  double theta;
  if (body_.is_sphere()) {
    theta = s / std::sqrt(body_.sphere_radius());
  } else {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, s);
    const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double hi = k + 1 < angles_.size() ? angles_[k + 1] : 2.0 * kPi;
    theta = solve_angle(body_, angles_[k], hi, cumulative_[k], s);
  }
  return body_.radial_point(Vec3(std::cos(theta), std::sin(theta), 0.0));
}

std::vector<double> MetricMesh::dijkstra(std::span<const std::pair<int, double>> sources) const {
  if (!has_graph()) throw DomainError("mesh was built without a Dijkstra graph");
  std::vector<double> dist(num_vertices(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto& [v, d0] : sources)
    if (d0 < dist[v]) {
      dist[v] = d0;
      heap.push({d0, v});
    }
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int k = adj_offsets_[v]; k < adj_offsets_[v + 1]; ++k) {
      const int w = adj_targets_[k];
      const double nd = d + adj_weights_[k];
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

double MetricMesh::graph_distance(int a, int b) const {
  const std::pair<int, double> source{a, 0.0};
  return dijkstra(std::span(&source, 1))[b];
}

int MetricMesh::nearest_vertex(const Vec3& x) const {
  if (!vertex_tree_) throw DomainError("mesh was built without a Dijkstra graph");
  return vertex_tree_->nearest(x).index;
}

MetricMesh build_metric_mesh(const ConvexBody& body, double resolution, const MeshOptions& options) {
  if (!(resolution > 0.0)) throw DomainError("mesh resolution must be positive");
  MetricMesh mesh(body);
  mesh.resolution_ = resolution;
  if (body.dim() == 2) {
    const double estimate = 2.0 * v_kappa(body).value / resolution;
    if (estimate > static_cast<double>(options.max_vertices))
      throw DomainError("mesh resolution too small for the memory budget");
    mesh.build_polygon(resolution);
    return mesh;
  }
  auto vertex_count = [](double m) { return 10.0 * m * m + 2.0; };
  constexpr int kProbe = 4;
  MetricMesh probe(body);
  probe.build_icosphere(kProbe);
  int m = std::max(1, static_cast<int>(std::ceil(kProbe * probe.max_edge_ / resolution * 1.02)));
  while (true) {
    if (vertex_count(m) > static_cast<double>(options.max_vertices))
      throw DomainError("mesh resolution too small for the memory budget (" +
                        std::to_string(options.max_vertices) + " vertices)");
    mesh.positions_.clear();
    mesh.normals_.clear();
    mesh.faces_.clear();
    mesh.build_icosphere(m);
    if (mesh.max_edge_ <= resolution) break;
    m = std::max(m + 1, static_cast<int>(std::ceil(m * mesh.max_edge_ / resolution * 1.01)));
  }
  if (options.build_graph) mesh.build_graph(options.link_rings);
  return mesh;
}

}  // namespace capcover
