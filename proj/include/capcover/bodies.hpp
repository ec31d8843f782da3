#pragma once

// Smooth convex bodies with positive curvature in d = 2 or 3.
//
// Every body is described by a convex defining function F with F = 1 on the
// boundary and F(0) < 1 (the origin is interior). Built-in bodies override
// the generic Newton-based evaluators with closed forms.
//
// Local graph charts: for a boundary point p with outward normal n and
// tangent frame t_1..t_{d-1}, the boundary near p is
//     p + sum_i y_i t_i - f(y) n,
// where f >= 0 is the graph function over the supporting hyperplane.

#include "capcover/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace capcover {

enum class BodyKind { kBall, kEllipsoid, kGeneric };

struct CurvatureBounds {
  double k_min = 0.0;  // smallest principal curvature over the boundary
  double k_max = 0.0;  // largest principal curvature over the boundary
};

struct Frame {
  int dim = 3;
  Vec3 normal = Vec3::UnitZ();
  Vec3 tangent[2] = {Vec3::UnitX(), Vec3::UnitY()};
};

struct GraphJet {
  double value = 0.0;
  ChartVec gradient;
  ChartMat hessian;
  Vec3 surface_point = Vec3::Zero();
};

/// User-supplied closed-form defining function and its two derivatives.
struct DefiningFunction {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;
};

namespace detail {

class BodyModel {
 public:
  virtual ~BodyModel() = default;

  virtual int dim() const = 0;
  virtual BodyKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual double value(const Vec3& x) const = 0;
  virtual Vec3 gradient(const Vec3& x) const = 0;
  virtual Mat3 hessian(const Vec3& x) const = 0;
  /// R such that K is contained in the ball of radius R around the origin.
  virtual double radius_bound() const = 0;
  virtual std::unique_ptr<BodyModel> scaled(double t) const = 0;

  virtual Vec3 radial_point(const Vec3& direction) const;
  virtual Vec3 inverse_normal(const Vec3& u) const;
  virtual double support(const Vec3& u) const;
  virtual double curvature(const Vec3& x) const;
  /// Smallest s >= 0 with F(q - s n) = 1 for q on the supporting hyperplane.
  virtual double graph_height(const Vec3& q, const Vec3& n) const;
  virtual std::optional<CurvatureBounds> exact_curvature_bounds() const {
    return std::nullopt;
  }
};

}  // namespace detail

/// Immutable, cheap to copy, safe to share across threads.
class ConvexBody {
 public:
  int dim() const { return model_->dim(); }
  BodyKind kind() const { return model_->kind(); }
  std::string name() const { return model_->name(); }
  bool is_sphere() const { return kind() == BodyKind::kBall; }
  double sphere_radius() const;

  double defining_value(const Vec3& x) const { return model_->value(x); }
  Vec3 defining_gradient(const Vec3& x) const { return model_->gradient(x); }
  Mat3 defining_hessian(const Vec3& x) const { return model_->hessian(x); }

  /// Boundary point on the ray from the origin in direction w.
  Vec3 radial_point(const Vec3& w) const;
  Vec3 outward_normal(const Vec3& x) const;
  /// h_K(u) = max_{y in K} <u, y>; u need not be normalized.
  double support(const Vec3& u) const;
  /// Boundary point with outward unit normal u.
  Vec3 inverse_normal(const Vec3& u) const;
  double gaussian_curvature(const Vec3& x) const { return model_->curvature(x); }

  /// Surface measure dH^{d-1} per unit direction measure for the radial map.
  double area_jacobian(const Vec3& w) const;

  BoundaryPoint make_point(const Vec3& x) const;
  BoundaryPoint point_from_direction(const Vec3& w) const;
  BoundaryPoint point_from_normal(const Vec3& u) const;

  /// Distance-like residual |F(x) - 1| / |grad F(x)|.
  double boundary_residual(const Vec3& x) const;
  bool on_boundary(const Vec3& x) const { return boundary_residual(x) <= boundary_tolerance(); }
  double boundary_tolerance() const { return 1e-9 * diameter(); }

  Frame frame(const BoundaryPoint& p) const { return frame_for_normal(p.normal); }
  Frame frame_for_normal(const Vec3& n) const;

  /// f, grad f, Hess f of the graph function at p evaluated at chart point y.
  GraphJet graph_jet(const BoundaryPoint& p, const ChartVec& y) const;
  GraphJet graph_jet(const Frame& fr, const Vec3& base, const ChartVec& y) const;
  /// Same without the chart-radius check: valid wherever the near sheet is
  /// a graph over the tangent plane. Throws ChartError off its projection.
  GraphJet graph_jet_unchecked(const Frame& fr, const Vec3& base, const ChartVec& y) const;
  Vec3 chart_to_surface(const BoundaryPoint& p, const ChartVec& y) const;
  ChartVec surface_to_chart(const BoundaryPoint& p, const Vec3& x) const;

  /// Certified chart radius (the osculating sandwich with delta = 1 holds on
  /// it) and lambda = chart_radius / 4.
  double chart_radius() const { return chart_radius_; }
  double lambda() const { return chart_radius_ / 4.0; }

  CurvatureBounds curvature_bounds() const { return bounds_; }
  double c_K() const { return 0.5 * bounds_.k_min; }
  double C_K() const { return 0.5 * bounds_.k_max; }

  double diameter() const { return diameter_; }
  double radius_bound() const { return model_->radius_bound(); }

  /// Rejection envelopes (5% headroom over a dense scan).
  double area_envelope() const { return area_envelope_; }
  double sqrt_curvature_envelope() const { return sqrt_kappa_envelope_; }

  ConvexBody scaled(double t) const;

 private:
  friend ConvexBody make_body_from_model(std::shared_ptr<const detail::BodyModel> model);
  explicit ConvexBody(std::shared_ptr<const detail::BodyModel> model);

  void certify();

  std::shared_ptr<const detail::BodyModel> model_;
  double chart_radius_ = 0.0;
  CurvatureBounds bounds_;
  double diameter_ = 0.0;
  double area_envelope_ = 0.0;
  double sqrt_kappa_envelope_ = 0.0;
};

ConvexBody make_body_from_model(std::shared_ptr<const detail::BodyModel> model);

ConvexBody make_ball(int d, double radius);
ConvexBody make_ellipsoid(const std::vector<double>& semi_axes);
/// Generic body from a closed-form defining function. bounding_radius must
/// enclose K; the origin must be interior.
ConvexBody make_generic(int d, DefiningFunction f, std::string name, double bounding_radius);
/// |x|^2 + eps * sum x_i^4 <= 1: a non-quadric body with positive curvature.
ConvexBody make_quartic(int d, double eps);

/// Validated Gaussian curvature at a boundary point.
double gaussian_curvature(const ConvexBody& body, const BoundaryPoint& x);
/// Validated graph-function jet; throws ChartError beyond the chart radius.
GraphJet graph_function_derivatives(const ConvexBody& body, const BoundaryPoint& p,
                                    const ChartVec& y);

/// Osculating quadratic b_0(y) = 1/2 y^T Hess f(0) y.
double osculating_quadratic(const ConvexBody& body, const BoundaryPoint& p, const ChartVec& y);

/// Scan directions: Fibonacci points on S^2 or equispaced angles on S^1.
std::vector<Vec3> scan_directions(int d, int count);

}  // namespace capcover
