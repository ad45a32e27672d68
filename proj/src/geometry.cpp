#include "locsim/geometry.hpp"

#include <cmath>
#include <string>

namespace locsim {

namespace {
constexpr double kCoincidentTol = 1e-12;
}

void SensingNode::validate() const {
  if (num_antennas < 1) {
    throw ValidationError("sensing node needs at least one antenna");
  }
  if (!(spacing_over_wavelength > 0.0)) {
    throw ValidationError("antenna spacing over wavelength must be positive");
  }
  if (std::abs(axis.norm() - 1.0) > 1e-12) {
    throw ValidationError("array axis must be a unit vector (|axis| = " +
                          std::to_string(axis.norm()) + ")");
  }
}

SearchGrid SearchGrid::line(const Vec3& start, const Vec3& end, double step) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  const double length = (end - start).norm();
  if (length < kCoincidentTol) {
    throw ValidationError("line grid endpoints coincide");
  }
  const Vec3 dir = (end - start) / length;
  const int n = static_cast<int>(std::floor(length / step + 1e-9)) + 1;

  SearchGrid grid;
  grid.descriptor.kind = Kind::line;
  grid.descriptor.start = start;
  grid.descriptor.end = end;
  grid.descriptor.step = step;
  grid.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    grid.points.push_back(start + (i * step) * dir);
  }
  return grid;
}

SearchGrid SearchGrid::rectangle(double x_min, double x_max, double y_min,
                                 double y_max, double step, double z) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (!(x_max >= x_min) || !(y_max >= y_min)) {
    throw ValidationError("rectangle grid bounds are inverted");
  }
  const int nx = static_cast<int>(std::floor((x_max - x_min) / step + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((y_max - y_min) / step + 1e-9)) + 1;

  SearchGrid grid;
  grid.descriptor.kind = Kind::rect;
  grid.descriptor.x_min = x_min;
  grid.descriptor.x_max = x_max;
  grid.descriptor.y_min = y_min;
  grid.descriptor.y_max = y_max;
  grid.descriptor.z = z;
  grid.descriptor.step = step;
  grid.descriptor.nx = nx;
  grid.descriptor.ny = ny;
  grid.points.reserve(static_cast<size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      grid.points.emplace_back(x_min + ix * step, y_min + iy * step, z);
    }
  }
  return grid;
}

void SearchGrid::neighbors(int index, std::vector<int>& out) const {
  out.clear();
  if (descriptor.kind == Kind::line) {
    if (index > 0) out.push_back(index - 1);
    if (index + 1 < size()) out.push_back(index + 1);
    return;
  }
  const int nx = descriptor.nx;
  const int ix = index % nx;
  const int iy = index / nx;
  if (ix > 0) out.push_back(index - 1);
  if (ix + 1 < nx) out.push_back(index + 1);
  if (iy > 0) out.push_back(index - nx);
  if (iy + 1 < descriptor.ny) out.push_back(index + nx);
}

void SearchGrid::validate() const {
  if (points.empty()) throw ValidationError("search grid has no points");
  if (descriptor.kind == Kind::rect &&
      static_cast<size_t>(descriptor.nx) * descriptor.ny != points.size()) {
    throw ValidationError("rectangle grid descriptor does not match points");
  }
}

Vec3 direction_vector(const Vec3& node_position, const Vec3& point) {
  const Vec3 diff = node_position - point;
  const double norm = diff.norm();
  if (norm < kCoincidentTol) {
    throw DegenerateGeometryError(
        "direction vector undefined: node and point coincide");
  }
  return diff / norm;
}

Eigen::VectorXcd steering_vector(const SensingNode& node, const Vec3& point) {
  node.validate();
  const Vec3 k = direction_vector(node.position, point);
  const double phase_step =
      2.0 * M_PI * node.spacing_over_wavelength * k.dot(node.axis);
  const double scale = 1.0 / std::sqrt(static_cast<double>(node.num_antennas));

  Eigen::VectorXcd a(node.num_antennas);
  for (int m = 0; m < node.num_antennas; ++m) {
    a(m) = std::polar(scale, phase_step * m);
  }
  return a;
}

SteeringSet build_steering_set(const std::vector<SensingNode>& nodes,
                               const SearchGrid& grid) {
  if (nodes.empty()) throw ValidationError("steering set needs at least one node");
  grid.validate();
  const int n_r = nodes[0].num_antennas;
  for (const auto& node : nodes) {
    node.validate();
    if (node.num_antennas != n_r) {
      throw ValidationError("all nodes must share the same antenna count");
    }
  }
  const int n_g = grid.size();
  const int n_l = static_cast<int>(nodes.size());

  // Coincidence is checked up front so the fill loop below cannot throw.
  for (int i = 0; i < n_g; ++i) {
    for (int l = 0; l < n_l; ++l) {
      if ((nodes[l].position - grid.points[i]).norm() < kCoincidentTol) {
        throw DegenerateGeometryError(
            "grid point " + std::to_string(i) + " coincides with node " +
            std::to_string(l));
      }
    }
  }

  SteeringSet set;
  set.num_antennas = n_r;
  set.per_node.resize(n_l);
  for (int l = 0; l < n_l; ++l) {
    set.per_node[l].resize(n_r, n_g);
  }
  for (int l = 0; l < n_l; ++l) {
    Eigen::MatrixXcd& mat = set.per_node[l];
    const SensingNode& node = nodes[l];
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_g; ++i) {
      mat.col(i) = steering_vector(node, grid.points[i]);
    }
  }
  return set;
}

}  // namespace locsim
