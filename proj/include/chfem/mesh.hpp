#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace chfem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rect {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(Point p, double tol = 1e-12) const;
};

enum class Side { left, right, bottom, top };

struct BoundaryEdge {
  std::array<std::size_t, 2> vertices;
  Side side;
};

/// Uniform triangulation of a rectangle. Each cell is split along its
/// lower-left to upper-right diagonal; vertices are numbered row-major
/// (index = j * (nx + 1) + i). Immutable after construction.
class Mesh {
 public:
  /// Throws std::invalid_argument for non-positive cell counts or a
  /// degenerate rectangle.
  Mesh(Rect rect, long nx, long ny);

  const Rect& rect() const { return rect_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  /// Maximal triangle diameter (the cell diagonal).
  double h() const { return h_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<std::size_t, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  Point vertex(std::size_t i) const { return vertices_[i]; }
  std::array<Point, 3> triangle_points(std::size_t t) const;
  double signed_area(std::size_t t) const;

  /// Index of a triangle containing p, or nullopt when p lies outside the
  /// rectangle (tolerance 1e-12 relative to the cell size).
  std::optional<std::size_t> locate(Point p) const;

 private:
  Rect rect_;
  std::size_t nx_;
  std::size_t ny_;
  double h_;
  std::vector<Point> vertices_;
  std::vector<std::array<std::size_t, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
};

Mesh make_uniform_mesh(Rect rect, long nx, long ny);

/// Sorted indices of the vertices lying on the boundary of the rectangle.
std::vector<std::size_t> boundary_vertices(const Mesh& mesh);

Point outward_normal(Side side);

}  // namespace chfem
