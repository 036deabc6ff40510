#include "chfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chfem {

bool Rect::contains(Point p, double tol) const {
  return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
}

Mesh::Mesh(Rect rect, long nx, long ny) : rect_(rect) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("make_uniform_mesh: cell counts must be >= 1, got nx=" +
                                std::to_string(nx) + " ny=" + std::to_string(ny));
  }
  if (!(rect.xmin < rect.xmax) || !(rect.ymin < rect.ymax)) {
    throw std::invalid_argument("make_uniform_mesh: degenerate rectangle");
  }
  nx_ = static_cast<std::size_t>(nx);
  ny_ = static_cast<std::size_t>(ny);
  const double dx = rect.width() / static_cast<double>(nx_);
  const double dy = rect.height() / static_cast<double>(ny_);
  h_ = std::hypot(dx, dy);

  const std::size_t row = nx_ + 1;
  vertices_.reserve(row * (ny_ + 1));
  for (std::size_t j = 0; j <= ny_; ++j) {
    // Pin the last row/column to the exact rectangle bounds.
    const double y = j == ny_ ? rect.ymax : rect.ymin + static_cast<double>(j) * dy;
    for (std::size_t i = 0; i <= nx_; ++i) {
      const double x = i == nx_ ? rect.xmax : rect.xmin + static_cast<double>(i) * dx;
      vertices_.push_back({x, y});
    }
  }

  triangles_.reserve(2 * nx_ * ny_);
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t i = 0; i < nx_; ++i) {
      const std::size_t v0 = j * row + i;
      const std::size_t v1 = v0 + 1;
      const std::size_t v2 = v0 + row + 1;
      const std::size_t v3 = v0 + row;
      triangles_.push_back({v0, v1, v2});
      triangles_.push_back({v0, v2, v3});
    }
  }

  for (std::size_t i = 0; i < nx_; ++i) {
    boundary_edges_.push_back({{i, i + 1}, Side::bottom});
  }
  for (std::size_t j = 0; j < ny_; ++j) {
    boundary_edges_.push_back({{j * row + nx_, (j + 1) * row + nx_}, Side::right});
  }
  for (std::size_t i = nx_; i > 0; --i) {
    boundary_edges_.push_back({{ny_ * row + i, ny_ * row + i - 1}, Side::top});
  }
  for (std::size_t j = ny_; j > 0; --j) {
    boundary_edges_.push_back({{j * row, (j - 1) * row}, Side::left});
  }
}

std::array<Point, 3> Mesh::triangle_points(std::size_t t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Mesh::signed_area(std::size_t t) const {
  const auto [a, b, c] = triangle_points(t);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::optional<std::size_t> Mesh::locate(Point p) const {
  const double dx = rect_.width() / static_cast<double>(nx_);
  const double dy = rect_.height() / static_cast<double>(ny_);
  const double tol = 1e-12 * std::max(dx, dy);
  if (!rect_.contains(p, tol)) {
    return std::nullopt;
  }
  const double sx = (p.x - rect_.xmin) / dx;
  const double sy = (p.y - rect_.ymin) / dy;
  const auto clamp_cell = [](double s, std::size_t n) {
    const auto c = static_cast<long>(std::floor(s));
    return static_cast<std::size_t>(std::clamp(c, 0L, static_cast<long>(n) - 1));
  };
  const std::size_t i = clamp_cell(sx, nx_);
  const std::size_t j = clamp_cell(sy, ny_);
  const double lx = sx - static_cast<double>(i);
  const double ly = sy - static_cast<double>(j);
  const std::size_t cell = j * nx_ + i;
  // Lower triangle (v0, v1, v2) lies below the diagonal ly <= lx.
  return ly <= lx ? 2 * cell : 2 * cell + 1;
}

Mesh make_uniform_mesh(Rect rect, long nx, long ny) { return Mesh(rect, nx, ny); }

std::vector<std::size_t> boundary_vertices(const Mesh& mesh) {
  std::vector<std::size_t> out;
  for (const auto& e : mesh.boundary_edges()) {
    out.push_back(e.vertices[0]);
    out.push_back(e.vertices[1]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Point outward_normal(Side side) {
  switch (side) {
    case Side::left:
      return {-1.0, 0.0};
    case Side::right:
      return {1.0, 0.0};
    case Side::bottom:
      return {0.0, -1.0};
    case Side::top:
      return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

}  // namespace chfem
