#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace capcover {

// Ambient points always live in R^3. Planar bodies keep z == 0.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Chart coordinates on the tangent hyperplane: d-1 entries, no heap.
using ChartVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;
using ChartMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

inline constexpr double kPi = 3.14159265358979323846;

struct BoundaryPoint {
  Vec3 ambient = Vec3::Zero();
  int chart_id = 0;
  // Spherical angles of the ray from the body center: (theta) in d = 2,
  // (polar, azimuth) in d = 3.
  ChartVec chart_coords;
  Vec3 normal = Vec3::UnitX();
  double curvature = 1.0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: unsupported dimension, non-positive axis, n too small.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A chart was asked for a point outside its certified radius.
class ChartError : public Error {
 public:
  using Error::Error;
};

/// Iterations failed to converge, or a runtime bound was violated.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace capcover
