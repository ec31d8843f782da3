#include "capcover/kdtree.hpp"
#include "capcover/kernels.hpp"
#include "capcover/metric.hpp"
#include "capcover/quadrature.hpp"

#include <Eigen/Cholesky>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace capcover {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Distance from boundary points to their nearest sample.
class NearestSample {
 public:
  NearestSample(const ConvexBody& body, const SampleSet& samples) : body_(body) {
    pos_.reserve(samples.size());
    nrm_.reserve(samples.size());
    for (const auto& p : samples.points) {
      pos_.push_back(p.ambient);
      nrm_.push_back(p.normal);
    }
    tree_ = KdTree(pos_);
    sphere_ = body.is_sphere();
    if (sphere_) radius_ = body.sphere_radius();
    // gamma-bar and gamma differ by O(gamma^3); the 0.9 absorbs that.
    far_cut_ = 0.9 * far_normal_distance_bound(body);
  }

  std::size_t size() const { return pos_.size(); }
  const Vec3& position(int i) const { return pos_[i]; }

  // Distance between a boundary point q (normal nq) and sample i: exact on
  // the sphere, near-sheet gamma-bar otherwise.
  std::optional<double> pair(const Vec3& q, const Vec3& nq, int i) const {
    if (sphere_) return geodesic_distance_exact_sphere(q, pos_[i], radius_);
    return near_sheet_distance(q, nq, pos_[i], nrm_[i]);
  }

  double euclidean_reach(double g) const { return gamma_bar_euclidean_reach(body_, g); }

  // Nearest-sample distance, or nullopt when a sample whose normal is far
  // from nq could be nearer.
  std::optional<double> query(const Vec3& q, const Vec3& nq) const {
    const auto hit = tree_.nearest(q);
    auto best = pair(q, nq, hit.index);
    if (!best) return std::nullopt;
    if (sphere_) {
      tree_.within(q, 2.0 * std::sin(0.5 * *best / std::sqrt(radius_)) * radius_ * (1.0 + 1e-9) + 1e-12,
                   [&](int i, double) { best = std::min(*best, *pair(q, nq, i)); });
      return best;
    }
    bool far_normal = false;
    tree_.within(q, euclidean_reach(*best), [&](int i, double) {
      if (i == hit.index) return;
      if (const auto g = pair(q, nq, i))
        best = std::min(*best, *g);
      else
        far_normal = true;
    });
    if (far_normal && *best >= far_cut_) return std::nullopt;
    return best;
  }

 private:
  const ConvexBody& body_;
  std::vector<Vec3> pos_, nrm_;
  KdTree tree_;
  double radius_ = 0.0, far_cut_ = 0.0;
  bool sphere_ = false;
};

struct Cell {
  Vec3 center;
  Vec3 normal;
  double half_width;  // in metric chart coordinates
  double g;
};

// Branch and bound for the maximum of the nearest-sample distance over the
// union of the given cells. g is 1-Lipschitz in gamma; the chart metric at a
// cell centre distorts lengths by O(w), covered by a 1.5 safety factor.
Cell refine_maximum(const ConvexBody& body, const NearestSample& oracle, std::vector<Cell> cells,
                    std::size_t cap) {
  constexpr double kSafety = 1.5;
  const double kSqrt2 = std::sqrt(2.0);
  Cell best = *std::max_element(cells.begin(), cells.end(),
                                [](const Cell& a, const Cell& b) { return a.g < b.g; });
  for (int level = 0; level < 40 && !cells.empty(); ++level) {
    const double w = cells.front().half_width;
    if (w < 1e-10 * std::max(1.0, best.g)) break;
    std::vector<Cell> children;
    children.reserve(cells.size() * 16);
    for (const Cell& c : cells) {
      const Frame fr = body.frame_for_normal(c.normal);
      const ChartVec zero = ChartVec::Zero(2);
      const ChartMat h0 = body.graph_jet(fr, c.center, zero).hessian;
      const Eigen::Matrix2d upper = Eigen::LLT<Eigen::Matrix2d>(Eigen::Matrix2d(h0)).matrixU();
      const Eigen::Matrix2d to_chart = upper.inverse();  // y = U^{-1} z, |z| metric length
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const Eigen::Vector2d z((2 * i - 3) * 0.25 * w, (2 * j - 3) * 0.25 * w);
          const ChartVec y = to_chart * z;
          Vec3 p;
          try {
            p = body.graph_jet(fr, c.center, y).surface_point;
          } catch (const ChartError&) {
            continue;
          }
          const Vec3 n = body.outward_normal(p);
          const auto g = oracle.query(p, n);
          if (!g) continue;
          children.push_back({p, n, 0.25 * w, *g});
          if (*g > best.g) best = children.back();
        }
    }
    const double slack = kSafety * kSqrt2 * 0.25 * w;
    std::erase_if(children, [&](const Cell& c) { return c.g + slack < best.g; });
    std::sort(children.begin(), children.end(), [](const Cell& a, const Cell& b) {
      if (a.g != b.g) return a.g > b.g;
      return std::lexicographical_compare(a.center.data(), a.center.data() + 3, b.center.data(),
                                          b.center.data() + 3);
    });
    if (children.size() > cap) children.resize(cap);
    cells = std::move(children);
  }
  return best;
}

void check_same_body(const SampleSet& points, const MetricMesh& mesh) {
  if (points.body.name() != mesh.body().name() || points.body.dim() != mesh.dim())
    throw DomainError("mesh and points belong to different bodies");
  if (points.size() == 0) throw DomainError("covering radius of an empty point set");
}

CoverageResult coverage_2d(const SampleSet& points, const MetricMesh& mesh) {
  std::vector<double> s;
  s.reserve(points.size());
  for (const auto& p : points.points) s.push_back(mesh.arclength(p.ambient));
  std::sort(s.begin(), s.end());
  const double total = mesh.total_length();
  double gap = s.front() + total - s.back();
  double start = s.back();
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i + 1] - s[i] > gap) {
      gap = s[i + 1] - s[i];
      start = s[i];
    }
  CoverageResult out;
  out.rho = 0.5 * gap;
  out.witness = points.body.make_point(mesh.point_at_arclength(start + 0.5 * gap));
  out.V = gap / total;
  out.spacing_center = out.witness;
  out.spacing_radius = out.rho;
  return out;
}

struct CoarsePass {
  std::vector<double> g;
  std::size_t fallbacks = 0;
};

CoarsePass coarse_pass(const MetricMesh& mesh, const NearestSample& oracle) {
  CoarsePass out;
  out.g = parallel_map(mesh.num_vertices(), [&](std::size_t v) {
    const auto g = oracle.query(mesh.position(v), mesh.normal(v));
    return g ? *g : kNaN;
  });
  for (double x : out.g)
    if (std::isnan(x)) ++out.fallbacks;
  if (out.fallbacks == 0) return out;
  if (!mesh.has_graph())
    throw ChartError("nearest samples lie beyond the chart; build the mesh with a Dijkstra graph");
  std::vector<std::pair<int, double>> sources;
  sources.reserve(oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const Vec3& x = oracle.position(static_cast<int>(i));
    const int v = mesh.nearest_vertex(x);
    const auto d = oracle.pair(mesh.position(v), mesh.normal(v), static_cast<int>(i));
    sources.emplace_back(v, d ? *d : 0.0);
  }
  const auto dist = mesh.dijkstra(sources);
  for (std::size_t v = 0; v < out.g.size(); ++v)
    if (std::isnan(out.g[v])) out.g[v] = dist[v];
  return out;
}

Cell covering_maximum(const MetricMesh& mesh, const NearestSample& oracle, const CoarsePass& pass) {
  const auto top = argmax(pass.g);
  std::vector<Cell> cells;
  const double w0 = mesh.max_edge();
  for (std::size_t v = 0; v < pass.g.size(); ++v)
    if (pass.g[v] + 1.5 * w0 >= top.value)
      cells.push_back({mesh.position(v), mesh.normal(v), w0, pass.g[v]});
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.g > b.g; });
  return refine_maximum(mesh.body(), oracle, std::move(cells), 1024);
}

CoverageResult coverage_3d(const SampleSet& points, const MetricMesh& mesh, const NearestSample& oracle,
                           const CoarsePass& pass) {
  const Cell best = covering_maximum(mesh, oracle, pass);
  CoverageResult out;
  out.rho = best.g;
  out.witness = points.body.make_point(best.center);
  out.graph_fallbacks = pass.fallbacks;
  return out;
}

}  // namespace

CoverageResult covering_radius(const SampleSet& points, const MetricMesh& mesh) {
  check_same_body(points, mesh);
  if (mesh.dim() == 2) return coverage_2d(points, mesh);
  const NearestSample oracle(points.body, points);
  return coverage_3d(points, mesh, oracle, coarse_pass(mesh, oracle));
}

CoverageResult max_spacing_statistic(const SampleSet& points, const MetricMesh& mesh, double v_k) {
  check_same_body(points, mesh);
  if (!(v_k > 0.0)) throw DomainError("v_k must be positive");
  if (mesh.dim() == 2) {
    CoverageResult out = coverage_2d(points, mesh);
    out.V = std::min(2.0 * out.rho, v_k) / v_k;
    return out;
  }
  const NearestSample oracle(points.body, points);
  const CoarsePass pass = coarse_pass(mesh, oracle);
  CoverageResult out = coverage_3d(points, mesh, oracle, pass);

  // Ball centres: the covering witness plus hill-climbed local maxima from
  // well-separated vertices with g >= 0.85 max g.
  const double gmax = argmax(pass.g).value;
  std::vector<std::size_t> order;
  for (std::size_t v = 0; v < pass.g.size(); ++v)
    if (pass.g[v] >= 0.85 * gmax) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pass.g[a] != pass.g[b] ? pass.g[a] > pass.g[b] : a < b;
  });
  std::vector<Cell> centres{{out.witness.ambient, out.witness.normal, 0.0, out.rho}};
  std::vector<std::size_t> seeds;
  const ConvexBody& body = points.body;
  for (std::size_t v : order) {
    if (seeds.size() >= 16) break;
    bool separate = true;
    for (std::size_t s : seeds) {
      const double e = (mesh.position(v) - mesh.position(s)).norm();
      if (e < oracle.euclidean_reach(0.5 * gmax)) {
        separate = false;
        break;
      }
    }
    if (!separate) continue;
    seeds.push_back(v);
    std::vector<Cell> start{{mesh.position(v), mesh.normal(v), mesh.max_edge(), pass.g[v]}};
    centres.push_back(refine_maximum(body, oracle, std::move(start), 64));
  }
  out.V = 0.0;
  for (const Cell& c : centres) {
    const BoundaryPoint x = body.make_point(c.center);
    double vol = 0.0;
    try {
      vol = geodesic_ball_volume(body, x, c.g, mesh);
    } catch (const DomainError&) {
      // Balls past the chart only occur at small n, where the mesh has a graph.
      if (!mesh.has_graph()) throw;
      vol = geodesic_ball_volume_mesh(body, x, c.g, mesh);
    }
    if (vol / v_k > out.V) {
      out.V = vol / v_k;
      out.spacing_center = x;
      out.spacing_radius = c.g;
    }
  }
  return out;
}

namespace {

double metric_distance(const ConvexBody& body, const Vec3& x, const Vec3& nx, const Vec3& y,
                       const Vec3& ny) {
  if (body.is_sphere()) return geodesic_distance_exact_sphere(x, y, body.sphere_radius());
  const auto g = near_sheet_distance(x, nx, y, ny);
  if (!g) throw DomainError("ball radius too large for the chart");
  return *g;
}

}  // namespace

double geodesic_ball_volume(const ConvexBody& body, const BoundaryPoint& x, double r,
                            const MetricMesh& mesh) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  if (body.dim() == 2) return std::min(2.0 * r, mesh.total_length());
  const Frame fr = body.frame(x);
  const double reach = gamma_bar_euclidean_reach(body, r);
  constexpr int kRays = 48;
  double vol = 0.0;
  for (int k = 0; k < kRays; ++k) {
    const double phi = 2.0 * kPi * k / kRays;
    ChartVec dir(2);
    dir << std::cos(phi), std::sin(phi);
    auto excess = [&](double t) {
      const Vec3 p = body.graph_jet_unchecked(fr, x.ambient, ChartVec(t * dir)).surface_point;
      return metric_distance(body, x.ambient, x.normal, p, body.outward_normal(p)) - r;
    };
    // Shrink the bracket until both charts reach; the ball must still fit.
    double hi = reach, f_hi = -r;
    for (int tries = 0; tries < 60; ++tries, hi *= 0.9) {
      try {
        f_hi = excess(hi);
        break;
      } catch (const Error&) {
      }
    }
    if (f_hi < 0.0) throw DomainError("ball radius too large for the near sheet");
    std::uintmax_t iters = 100;
    const auto root = boost::math::tools::toms748_solve(
        excess, 0.0, hi, -r, f_hi, boost::math::tools::eps_tolerance<double>(50), iters);
    const double t_star = 0.5 * (root.first + root.second);
    const double radial = gauss_legendre(
        [&](double t) {
          return metric_volume_density(body.graph_jet_unchecked(fr, x.ambient, ChartVec(t * dir))) * t;
        },
        0.0, t_star, 2);
    vol += radial;
  }
  return vol * 2.0 * kPi / kRays;
}

namespace {

// Area fraction of the triangle where the linear interpolant of (d0, d1, d2)
// is below r.
double clipped_fraction(double d0, double d1, double d2, double r) {
  const double d[3] = {d0, d1, d2};
  const Eigen::Vector2d corner[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  std::vector<Eigen::Vector2d> poly;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const bool in_i = d[i] < r, in_j = d[j] < r;
    if (in_i) poly.push_back(corner[i]);
    if (in_i != in_j) {
      const double t = (r - d[i]) / (d[j] - d[i]);
      poly.push_back(corner[i] + t * (corner[j] - corner[i]));
    }
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    area2 += a.x() * b.y() - a.y() * b.x();
  }
  return std::abs(area2);  // reference triangle has doubled area 1
}

}  // namespace

double geodesic_ball_volume_mesh(const ConvexBody& body, const BoundaryPoint& x, double r,
                                 const MetricMesh& mesh) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  if (body.dim() == 2) return std::min(2.0 * r, mesh.total_volume());
  const auto b = body.curvature_bounds();
  const double t = 1.5 * r * std::sqrt(2.0 / b.k_min);
  const double reach = t * std::sqrt(1.0 + b.k_max * b.k_max * t * t);
  const double inf = std::numeric_limits<double>::infinity();
  const bool graph = mesh.has_graph();
  auto dist = parallel_map(mesh.num_vertices(), [&](std::size_t v) {
    if (!graph && (mesh.position(v) - x.ambient).norm() > reach) return inf;
    try {
      return metric_distance(body, x.ambient, x.normal, mesh.position(v), mesh.normal(v));
    } catch (const DomainError&) {
      return inf;
    }
  });
  if (graph) {
    // Chart distances seed the graph, which carries them past the chart.
    std::vector<std::pair<int, double>> sources;
    for (std::size_t v = 0; v < dist.size(); ++v)
      if (std::isfinite(dist[v])) sources.emplace_back(static_cast<int>(v), dist[v]);
    if (sources.empty()) throw DomainError("no mesh vertex within the chart of the centre");
    dist = mesh.dijkstra(sources);
  }
  const auto& faces = mesh.faces();
  const auto part = parallel_map(faces.size(), [&](std::size_t k) {
    const auto& f = faces[k];
    // Vertices beyond the chart are far outside the ball; cap them for clipping.
    const double d0 = std::min(dist[f[0]], 4.0 * r), d1 = std::min(dist[f[1]], 4.0 * r),
                 d2 = std::min(dist[f[2]], 4.0 * r);
    if (std::min({d0, d1, d2}) >= r) return 0.0;
    const Vec3& a = mesh.position(f[0]);
    const Vec3& bb = mesh.position(f[1]);
    const Vec3& c = mesh.position(f[2]);
    const Vec3 base = body.radial_point((a + bb + c) / 3.0);
    const Frame fr = body.frame_for_normal(body.outward_normal(base));
    ChartVec ya(2), yb(2), yc(2);
    for (int i = 0; i < 2; ++i) {
      ya(i) = fr.tangent[i].dot(a - base);
      yb(i) = fr.tangent[i].dot(bb - base);
      yc(i) = fr.tangent[i].dot(c - base);
    }
    const ChartVec e1 = yb - ya, e2 = yc - ya;
    const double area = 0.5 * std::abs(e1(0) * e2(1) - e1(1) * e2(0)) *
                        metric_volume_density(body.graph_jet(fr, base, (ya + yb + yc) / 3.0));
    return area * clipped_fraction(d0, d1, d2, r);
  });
  double sum = 0.0;
  for (double p : part) sum += p;
  return sum;
}

}  // namespace capcover
