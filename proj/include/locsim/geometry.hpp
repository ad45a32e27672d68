#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "locsim/errors.hpp"

namespace locsim {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// One receiver with a uniform linear array.
struct SensingNode {
  Vec3 position = Vec3::Zero();     // meters; array height goes into z
  Vec3 axis = Vec3(1.0, 0.0, 0.0);  // unit vector along the antenna line
  int num_antennas = 1;
  double spacing_over_wavelength = 0.5;

  void validate() const;
};

/// Discretized search area: a line segment or an axis-aligned rectangle.
/// Rectangle points are stored row-major with x varying fastest.
struct SearchGrid {
  enum class Kind { line, rect };

  struct Descriptor {
    Kind kind = Kind::line;
    Vec3 start = Vec3::Zero();  // line
    Vec3 end = Vec3::Zero();    // line
    double x_min = 0.0, x_max = 0.0;  // rect
    double y_min = 0.0, y_max = 0.0;  // rect
    double z = 0.0;                   // rect plane height
    double step = 1.0;
    int nx = 0, ny = 0;  // rect point counts per axis
  };

  std::vector<Vec3> points;
  Descriptor descriptor;

  static SearchGrid line(const Vec3& start, const Vec3& end, double step);
  static SearchGrid rectangle(double x_min, double x_max, double y_min,
                              double y_max, double step, double z = 0.0);

  int size() const { return static_cast<int>(points.size()); }
  double step() const { return descriptor.step; }

  /// Grid-adjacent indices: 2 on a line, 4 on a rectangle (fewer at borders).
  void neighbors(int index, std::vector<int>& out) const;

  void validate() const;
};

/// Per-node steering vectors for every grid point, stored node-major:
/// per_node[l] is N_R x N_G with column i = a_l(p_i). Column i taken across
/// all nodes forms the block-diagonal steering matrix A_i of shape (N_R*L) x L.
struct SteeringSet {
  std::vector<Eigen::MatrixXcd> per_node;
  int num_antennas = 0;

  int num_nodes() const { return static_cast<int>(per_node.size()); }
  int num_points() const {
    return per_node.empty() ? 0 : static_cast<int>(per_node[0].cols());
  }
  auto a(int node, int point) const { return per_node[node].col(point); }
};

/// Unit vector from `point` towards `node_position`.
Vec3 direction_vector(const Vec3& node_position, const Vec3& point);

/// Array response of `node` towards `point`; entries have modulus
/// 1/sqrt(N_R) and the whole vector has unit norm.
Eigen::VectorXcd steering_vector(const SensingNode& node, const Vec3& point);

SteeringSet build_steering_set(const std::vector<SensingNode>& nodes,
                               const SearchGrid& grid);

}  // namespace locsim
