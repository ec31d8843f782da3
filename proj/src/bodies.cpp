#include "capcover/bodies.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace capcover {

namespace {

constexpr int kMaxNewton = 200;

ChartMat tangent_block(const Frame& fr, const Mat3& h) {
  const int m = fr.dim - 1;
  ChartMat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = fr.tangent[i].dot(h * fr.tangent[j]);
  return out;
}

Frame make_frame(int d, const Vec3& n) {
  Frame fr;
  fr.dim = d;
  fr.normal = n;
  if (d == 2) {
    fr.tangent[0] = Vec3(-n.y(), n.x(), 0.0);
    fr.tangent[1] = Vec3::Zero();
    return fr;
  }
  const Vec3 axis = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  fr.tangent[0] = (axis - axis.dot(n) * n).normalized();
  fr.tangent[1] = n.cross(fr.tangent[0]);
  return fr;
}

class EllipsoidModel final : public detail::BodyModel {
 public:
  EllipsoidModel(int d, Vec3 axes, bool ball) : d_(d), a_(axes), ball_(ball) {
    if (d == 2) a_.z() = 1.0;
    inv_a2_ = Vec3(1.0 / (a_.x() * a_.x()), 1.0 / (a_.y() * a_.y()),
                   d == 3 ? 1.0 / (a_.z() * a_.z()) : 0.0);
  }

  int dim() const override { return d_; }
  BodyKind kind() const override { return ball_ ? BodyKind::kBall : BodyKind::kEllipsoid; }
  std::string name() const override {
    std::ostringstream os;
    os.precision(17);
    if (ball_) {
      os << "ball:d=" << d_ << ",r=" << a_.x();
    } else {
      os << "ellipsoid:" << a_.x() << "," << a_.y();
      if (d_ == 3) os << "," << a_.z();
    }
    return os.str();
  }

  double value(const Vec3& x) const override { return x.cwiseProduct(x).dot(inv_a2_); }
  Vec3 gradient(const Vec3& x) const override { return 2.0 * x.cwiseProduct(inv_a2_); }
  Mat3 hessian(const Vec3&) const override { return (2.0 * inv_a2_).asDiagonal(); }
  double radius_bound() const override { return axes_max(); }

  std::unique_ptr<BodyModel> scaled(double t) const override {
    return std::make_unique<EllipsoidModel>(d_, a_ * t, ball_);
  }

  Vec3 radial_point(const Vec3& w) const override {
    return w / std::sqrt(value(w));
  }

  Vec3 inverse_normal(const Vec3& u) const override {
    const Vec3 au = axes().cwiseProduct(u);
    return axes().cwiseProduct(au) / au.norm();
  }

  double support(const Vec3& u) const override { return axes().cwiseProduct(u).norm(); }

  double curvature(const Vec3& x) const override {
    const Vec3 g = x.cwiseProduct(inv_a2_.cwiseProduct(inv_a2_));
    const double s = x.dot(g);  // sum x_i^2 / a_i^4
    if (d_ == 2) return 1.0 / (a_.x() * a_.x() * a_.y() * a_.y() * std::pow(s, 1.5));
    const double abc = a_.x() * a_.y() * a_.z();
    return 1.0 / (abc * abc * s * s);
  }

  double graph_height(const Vec3& q, const Vec3& n) const override {
    const double qa = n.cwiseProduct(n).dot(inv_a2_);
    const double qb = 2.0 * q.cwiseProduct(n).dot(inv_a2_);
    const double qc = std::max(0.0, value(q) - 1.0);
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0 || qb + std::sqrt(disc) <= 0.0)
      throw ChartError("chart line does not meet the boundary");
    return 2.0 * qc / (qb + std::sqrt(disc));
  }

  std::optional<CurvatureBounds> exact_curvature_bounds() const override {
    const double lo = axes_min();
    const double hi = axes_max();
    return CurvatureBounds{lo / (hi * hi), hi / (lo * lo)};
  }

 private:
  Vec3 axes() const { return d_ == 2 ? Vec3(a_.x(), a_.y(), 0.0) : a_; }
  double axes_max() const { return d_ == 2 ? std::max(a_.x(), a_.y()) : a_.maxCoeff(); }
  double axes_min() const { return d_ == 2 ? std::min(a_.x(), a_.y()) : a_.minCoeff(); }

  int d_;
  Vec3 a_;
  Vec3 inv_a2_;
  bool ball_;
};

class GenericModel final : public detail::BodyModel {
 public:
  GenericModel(int d, DefiningFunction f, std::string name, double bound)
      : d_(d), f_(std::move(f)), name_(std::move(name)), bound_(bound) {}

  int dim() const override { return d_; }
  BodyKind kind() const override { return BodyKind::kGeneric; }
  std::string name() const override { return name_; }
  double value(const Vec3& x) const override { return f_.value(x); }
  Vec3 gradient(const Vec3& x) const override {
    Vec3 g = f_.gradient(x);
    if (d_ == 2) g.z() = 0.0;
    return g;
  }
  Mat3 hessian(const Vec3& x) const override { return f_.hessian(x); }
  double radius_bound() const override { return bound_; }

  std::unique_ptr<BodyModel> scaled(double t) const override {
    DefiningFunction g;
    auto f = f_;
    g.value = [f, t](const Vec3& x) { return f.value(x / t); };
    g.gradient = [f, t](const Vec3& x) -> Vec3 { return f.gradient(x / t) / t; };
    g.hessian = [f, t](const Vec3& x) -> Mat3 { return f.hessian(x / t) / (t * t); };
    std::ostringstream os;
    os << name_ << "*" << t;
    return std::make_unique<GenericModel>(d_, std::move(g), os.str(), bound_ * t);
  }

 private:
  int d_;
  DefiningFunction f_;
  std::string name_;
  double bound_;
};

}  // namespace

namespace detail {

Vec3 BodyModel::radial_point(const Vec3& direction) const {
  const Vec3 w = direction.normalized();
  double t = radius_bound();
  for (int it = 0; it < kMaxNewton; ++it) {
    const Vec3 x = t * w;
    const double g = value(x) - 1.0;
    const double dg = gradient(x).dot(w);
    if (dg <= 0.0) throw NumericalError("radial Newton: nonpositive derivative");
    const double step = g / dg;
    t -= step;
    if (std::abs(step) <= 1e-15 * radius_bound()) return t * w;
  }
  throw NumericalError("radial Newton did not converge");
}

Vec3 BodyModel::inverse_normal(const Vec3& u_in) const {
  const Vec3 u = u_in.normalized();
  const int d = dim();
  Vec3 x = radial_point(u);
  auto residual = [&](const Vec3& p) {
    const Vec3 n = gradient(p).normalized();
    return (u - n).norm();
  };
  double res = residual(x);
  for (int it = 0; it < kMaxNewton && res > 1e-14; ++it) {
    const Vec3 g = gradient(x);
    const double gn = g.norm();
    const Vec3 n = g / gn;
    const Frame fr = make_frame(d, n);
    const ChartMat shape = tangent_block(fr, hessian(x)) / gn;
    ChartVec rhs(d - 1);
    for (int i = 0; i < d - 1; ++i) rhs(i) = fr.tangent[i].dot(u - n);
    const ChartVec delta = shape.ldlt().solve(rhs);
    Vec3 step = Vec3::Zero();
    for (int i = 0; i < d - 1; ++i) step += delta(i) * fr.tangent[i];
    double damping = 1.0;
    for (int k = 0; k < 40; ++k, damping *= 0.5) {
      const Vec3 cand = radial_point(x + damping * step);
      const double r = residual(cand);
      if (r < res) {
        x = cand;
        res = r;
        break;
      }
    }
    if (damping < 1e-12) break;
  }
  if (res > 1e-10) throw NumericalError("inverse normal map did not converge");
  return x;
}

double BodyModel::support(const Vec3& u) const {
  const double len = u.norm();
  return len * (u / len).dot(inverse_normal(u));
}

double BodyModel::curvature(const Vec3& x) const {
  const Vec3 g = gradient(x);
  const double gn = g.norm();
  const Frame fr = make_frame(dim(), g / gn);
  return tangent_block(fr, hessian(x)).determinant() / std::pow(gn, dim() - 1);
}

double BodyModel::graph_height(const Vec3& q, const Vec3& n) const {
  double s = 0.0;
  double phi = value(q) - 1.0;
  if (phi <= 0.0) return 0.0;
  for (int it = 0; it < kMaxNewton; ++it) {
    const double dphi = -gradient(q - s * n).dot(n);
    if (dphi >= 0.0) throw ChartError("chart line does not meet the boundary");
    const double step = phi / dphi;
    s -= step;
    phi = value(q - s * n) - 1.0;
    if (std::abs(step) <= 1e-15 * (radius_bound() + s)) return s;
  }
  throw NumericalError("graph height Newton did not converge");
}

}  // namespace detail

std::vector<Vec3> scan_directions(int d, int count) {
  std::vector<Vec3> out;
  out.reserve(count);
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * kPi * (i + 0.5) / count;
      out.emplace_back(std::cos(t), std::sin(t), 0.0);
    }
    return out;
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

ConvexBody::ConvexBody(std::shared_ptr<const detail::BodyModel> model) : model_(std::move(model)) {
  certify();
}

ConvexBody make_body_from_model(std::shared_ptr<const detail::BodyModel> model) {
  return ConvexBody(std::move(model));
}

double ConvexBody::sphere_radius() const {
  if (!is_sphere()) throw DomainError("body is not a ball");
  return model_->radius_bound();
}

Vec3 ConvexBody::radial_point(const Vec3& w) const { return model_->radial_point(w); }

Vec3 ConvexBody::outward_normal(const Vec3& x) const { return model_->gradient(x).normalized(); }

double ConvexBody::support(const Vec3& u) const { return model_->support(u); }

Vec3 ConvexBody::inverse_normal(const Vec3& u) const { return model_->inverse_normal(u); }

double ConvexBody::area_jacobian(const Vec3& w_in) const {
  const Vec3 w = w_in.normalized();
  const Vec3 x = radial_point(w);
  const Vec3 n = outward_normal(x);
  return std::pow(x.norm(), dim() - 1) / w.dot(n);
}

BoundaryPoint ConvexBody::make_point(const Vec3& x) const {
  if (boundary_residual(x) > boundary_tolerance())
    throw DomainError("point is not on the boundary");
  BoundaryPoint p;
  p.ambient = x;
  p.normal = outward_normal(x);
  p.curvature = gaussian_curvature(x);
  p.chart_id = 0;
  if (dim() == 2) {
    p.chart_coords.resize(1);
    p.chart_coords(0) = std::atan2(x.y(), x.x());
  } else {
    p.chart_coords.resize(2);
    p.chart_coords(0) = std::acos(std::clamp(x.z() / x.norm(), -1.0, 1.0));
    p.chart_coords(1) = std::atan2(x.y(), x.x());
  }
  return p;
}

BoundaryPoint ConvexBody::point_from_direction(const Vec3& w) const {
  return make_point(radial_point(w));
}

BoundaryPoint ConvexBody::point_from_normal(const Vec3& u) const {
  return make_point(inverse_normal(u));
}

double ConvexBody::boundary_residual(const Vec3& x) const {
  if (dim() == 2 && x.z() != 0.0) return std::abs(x.z()) + 1.0;
  return std::abs(model_->value(x) - 1.0) / model_->gradient(x).norm();
}

Frame ConvexBody::frame_for_normal(const Vec3& n) const { return make_frame(dim(), n); }

GraphJet ConvexBody::graph_jet_unchecked(const Frame& fr, const Vec3& base,
                                         const ChartVec& y) const {
  const int m = dim() - 1;
  Vec3 q = base;
  for (int i = 0; i < m; ++i) q += y(i) * fr.tangent[i];
  const double s = model_->graph_height(q, fr.normal);
  const Vec3 x = q - s * fr.normal;
  const Vec3 g = model_->gradient(x);
  const double gn = g.dot(fr.normal);
  if (gn <= 0.0) throw ChartError("graph function is not defined here");
  const Mat3 h = model_->hessian(x);
  GraphJet jet;
  jet.value = s;
  jet.surface_point = x;
  jet.gradient.resize(m);
  jet.hessian.resize(m, m);
  Vec3 e[2];
  for (int i = 0; i < m; ++i) {
    jet.gradient(i) = g.dot(fr.tangent[i]) / gn;
    e[i] = fr.tangent[i] - jet.gradient(i) * fr.normal;
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) jet.hessian(i, j) = e[i].dot(h * e[j]) / gn;
  return jet;
}

GraphJet ConvexBody::graph_jet(const Frame& fr, const Vec3& base, const ChartVec& y) const {
  if (y.size() != dim() - 1) throw DomainError("chart vector has wrong size");
  if (y.norm() > chart_radius_) throw ChartError("chart radius exceeded");
  return graph_jet_unchecked(fr, base, y);
}

GraphJet ConvexBody::graph_jet(const BoundaryPoint& p, const ChartVec& y) const {
  return graph_jet(frame(p), p.ambient, y);
}

Vec3 ConvexBody::chart_to_surface(const BoundaryPoint& p, const ChartVec& y) const {
  return graph_jet(p, y).surface_point;
}

ChartVec ConvexBody::surface_to_chart(const BoundaryPoint& p, const Vec3& x) const {
  const Frame fr = frame(p);
  ChartVec y(dim() - 1);
  for (int i = 0; i < dim() - 1; ++i) y(i) = fr.tangent[i].dot(x - p.ambient);
  return y;
}

ConvexBody ConvexBody::scaled(double t) const {
  if (!(t > 0.0)) throw DomainError("scale factor must be positive");
  return ConvexBody(std::shared_ptr<const detail::BodyModel>(model_->scaled(t)));
}

void ConvexBody::certify() {
  const int d = dim();
  const double bound = model_->radius_bound();

  // Envelopes, diameter and curvature range from a dense direction scan.
  const auto dense = scan_directions(d, d == 2 ? 8192 : 20000);
  double max_j = 0.0, max_sk = 0.0, max_r = 0.0;
  double kmin = 1e300, kmax = 0.0;
  for (const Vec3& w : dense) {
    const Vec3 x = model_->radial_point(w);
    const Vec3 g = model_->gradient(x);
    const Vec3 n = g.normalized();
    max_r = std::max(max_r, x.norm());
    max_j = std::max(max_j, std::pow(x.norm(), d - 1) / w.dot(n));
    max_sk = std::max(max_sk, std::sqrt(model_->curvature(x)));
    const Frame fr = make_frame(d, n);
    const ChartMat shape = tangent_block(fr, model_->hessian(x)) / g.norm();
    if (d == 2) {
      kmin = std::min(kmin, shape(0, 0));
      kmax = std::max(kmax, shape(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es{Eigen::Matrix2d(shape)};
      kmin = std::min(kmin, es.eigenvalues()(0));
      kmax = std::max(kmax, es.eigenvalues()(1));
    }
  }
  if (!(kmin > 0.0)) throw DomainError("body curvature is not positive everywhere");
  area_envelope_ = 1.05 * max_j;
  sqrt_kappa_envelope_ = 1.05 * max_sk;
  diameter_ = 2.0 * max_r;
  if (auto exact = model_->exact_curvature_bounds()) {
    bounds_ = *exact;
  } else {
    bounds_ = {0.95 * kmin, 1.05 * kmax};
  }

  // Largest radius on which (1/2) b0 <= f <= 2 b0 holds for every scanned
  // (base point, chart direction) pair.
  const int radial_steps = 64;
  const double step = bound / radial_steps;
  double certified = bound;
  const auto bases = scan_directions(d, 64);
  std::vector<ChartVec> chart_dirs;
  if (d == 2) {
    for (double s : {-1.0, 1.0}) {
      ChartVec v(1);
      v(0) = s;
      chart_dirs.push_back(v);
    }
  } else {
    for (int k = 0; k < 8; ++k) {
      ChartVec v(2);
      v << std::cos(kPi * k / 4.0), std::sin(kPi * k / 4.0);
      chart_dirs.push_back(v);
    }
  }
  for (const Vec3& w : bases) {
    const Vec3 p = model_->radial_point(w);
    const Frame fr = make_frame(d, model_->gradient(p).normalized());
    const ChartVec zero = ChartVec::Zero(d - 1);
    const ChartMat h0 = graph_jet_unchecked(fr, p, zero).hessian;
    for (const ChartVec& dir : chart_dirs) {
      double passed = 0.0;
      for (int k = 1; k < radial_steps; ++k) {
        const double r = k * step;
        if (r > certified) break;
        const ChartVec y = r * dir;
        bool ok = true;
        try {
          const double f = graph_jet_unchecked(fr, p, y).value;
          const double b0 = 0.5 * y.dot(h0 * y);
          ok = (0.5 * b0 <= f) && (f <= 2.0 * b0);
        } catch (const Error&) {
          ok = false;
        }
        if (!ok) break;
        passed = r;
      }
      certified = std::min(certified, passed);
    }
  }
  if (!(certified > 0.0)) throw NumericalError("could not certify a chart radius");
  chart_radius_ = 0.9 * certified;
}

ConvexBody make_ball(int d, double radius) {
  if (d != 2 && d != 3) throw DomainError("unsupported dimension (d must be 2 or 3)");
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  return make_body_from_model(
      std::make_shared<EllipsoidModel>(d, Vec3(radius, radius, radius), true));
}

ConvexBody make_ellipsoid(const std::vector<double>& semi_axes) {
  const int d = static_cast<int>(semi_axes.size());
  if (d != 2 && d != 3) throw DomainError("unsupported dimension (need 2 or 3 semi-axes)");
  for (double a : semi_axes)
    if (!(a > 0.0)) throw DomainError("semi-axes must be positive");
  const Vec3 axes(semi_axes[0], semi_axes[1], d == 3 ? semi_axes[2] : 1.0);
  return make_body_from_model(std::make_shared<EllipsoidModel>(d, axes, false));
}

ConvexBody make_generic(int d, DefiningFunction f, std::string name, double bounding_radius) {
  if (d != 2 && d != 3) throw DomainError("unsupported dimension (d must be 2 or 3)");
  if (!f.value || !f.gradient || !f.hessian)
    throw DomainError("generic body needs value, gradient and hessian");
  if (!(bounding_radius > 0.0)) throw DomainError("bounding radius must be positive");
  if (!(f.value(Vec3::Zero()) < 1.0)) throw DomainError("origin must be interior");
  return make_body_from_model(
      std::make_shared<GenericModel>(d, std::move(f), std::move(name), bounding_radius));
}

ConvexBody make_quartic(int d, double eps) {
  if (!(eps >= 0.0)) throw DomainError("quartic eps must be nonnegative");
  DefiningFunction f;
  f.value = [d, eps](const Vec3& x) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += x(i) * x(i) + eps * std::pow(x(i), 4);
    return s;
  };
  f.gradient = [d, eps](const Vec3& x) {
    Vec3 g = Vec3::Zero();
    for (int i = 0; i < d; ++i) g(i) = 2.0 * x(i) + 4.0 * eps * x(i) * x(i) * x(i);
    return g;
  };
  f.hessian = [d, eps](const Vec3& x) {
    Mat3 h = Mat3::Zero();
    for (int i = 0; i < d; ++i) h(i, i) = 2.0 + 12.0 * eps * x(i) * x(i);
    return h;
  };
  std::ostringstream os;
  os << "quartic:d=" << d << ",eps=" << eps;
  return make_generic(d, std::move(f), os.str(), 1.0);
}

double gaussian_curvature(const ConvexBody& body, const BoundaryPoint& x) {
  if (!body.on_boundary(x.ambient)) throw DomainError("point is not on the boundary");
  return body.gaussian_curvature(x.ambient);
}

GraphJet graph_function_derivatives(const ConvexBody& body, const BoundaryPoint& p,
                                    const ChartVec& y) {
  if (!body.on_boundary(p.ambient)) throw DomainError("base point is not on the boundary");
  return body.graph_jet(p, y);
}

double osculating_quadratic(const ConvexBody& body, const BoundaryPoint& p, const ChartVec& y) {
  const ChartMat h0 = body.graph_jet(p, ChartVec::Zero(body.dim() - 1)).hessian;
  return 0.5 * y.dot(h0 * y);
}

}  // namespace capcover
