#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "morrey/geometry.hpp"

namespace morrey {

/// Conforming triangulation of a domain. Triangles are CCW. Boundary
/// vertices carry a flag and lie on the sampled boundary polyline; interior
/// vertices are strictly inside. If a pole was requested it is stored as a
/// vertex with exactly the requested coordinates.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::uint8_t> boundary;  // per vertex
    int pole_vertex{-1};
    double h{0.0};  // target edge length

    double area() const;
    double max_edge() const;
    int interior_count() const;
    double triangle_area(int t) const;
};

/// Constrained triangulation of spec at target edge length h, optionally
/// pinning an interior pole vertex. The mesh is graded near the pole (edge
/// length decreasing to h/32 inside radius 8h) to resolve the potential cusp.
///
/// Throws PoleTooCloseToBoundary if dist(pole, boundary) < 2h, and
/// MeshResolutionError if the region degenerates at resolution h (unresolved
/// bow-tie/dumbbell neck, disconnected mesh, oversized edges, too few
/// interior vertices).
Mesh triangulate(const DomainSpec& spec, double h, std::optional<Vec2> pole = std::nullopt);

/// Point location accelerator (uniform bucket grid over triangle bboxes).
class MeshLocator {
  public:
    explicit MeshLocator(const Mesh& mesh);
    /// Triangle index containing p (barycentric tolerance), or -1.
    int locate(const Vec2& p) const;
    /// Piecewise-linear interpolation of nodal values at p. Points that fall
    /// marginally outside (polygonization mismatch under symmetry maps) are
    /// evaluated on the nearest triangle.
    double interpolate(const std::vector<double>& values, const Vec2& p) const;

  private:
    const Mesh& mesh_;
    Vec2 lo_;
    double cell_{1.0};
    int nx_{0}, ny_{0};
    std::vector<std::vector<int>> buckets_;
};

}  // namespace morrey
