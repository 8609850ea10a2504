#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morrey/vec.hpp"

namespace morrey {

// ---------------------------------------------------------------------------
// Domain specifications
// ---------------------------------------------------------------------------

enum class DomainKind { Disk, Annulus, Polygon, Bowtie, Dumbbell, PolarCurve, RectUnion };

enum class Symmetry { ReflectX1, ReflectX2, Rotation };

struct Rect {
    Vec2 lo, hi;
    bool contains(const Vec2& p) const {
        return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
    }
};

/// Declarative description of a planar region. Build through the factory
/// functions, which validate parameters and fill in the convexity flag and
/// the default symmetry declarations.
struct DomainSpec {
    DomainKind kind{DomainKind::Disk};

    Vec2 center;                     // disk
    double radius{0.0};              // disk
    double r1{0.0}, r2{0.0};         // annulus (centered at origin)
    std::vector<Vec2> vertices;      // polygon, CCW
    double epsilon{0.0};             // bowtie
    double delta{0.0};               // dumbbell
    double r0{0.0};                  // polar curve constant term
    std::vector<double> cos_coef;    // polar curve, index k-1 <-> cos(k theta)
    std::vector<double> sin_coef;    // polar curve, index k-1 <-> sin(k theta)
    std::vector<Rect> rects;         // rect union

    bool convex{false};
    std::vector<Symmetry> symmetries;

    static DomainSpec disk(Vec2 center, double radius);
    static DomainSpec annulus(double r1, double r2);
    static DomainSpec polygon(std::vector<Vec2> vertices);
    static DomainSpec bowtie(double epsilon);
    static DomainSpec dumbbell(double delta);
    static DomainSpec polar_curve(double r0, std::vector<double> cos_coef,
                                  std::vector<double> sin_coef = {});
    static DomainSpec rect_union(std::vector<Rect> rects);

    bool has_symmetry(Symmetry s) const;
    std::string kind_name() const;
};

/// True iff x lies in the open region described by spec.
bool contains(const DomainSpec& spec, const Vec2& x);

Rect bounding_box(const DomainSpec& spec);

/// r(theta) for polar-curve specs.
double polar_radius(const DomainSpec& spec, double theta);

/// A concrete symmetry transform of the plane (rotations carry an angle).
struct SymmetryOp {
    enum Kind { ReflX1, ReflX2, Rot } kind{ReflX1};
    double angle{0.0};
    Vec2 apply(const Vec2& p) const;
    std::string name() const;
};

/// Sample transforms generating the declared group; rotation symmetry is
/// sampled at multiples of pi/4 (these preserve the structured meshes).
std::vector<SymmetryOp> sample_symmetry_ops(const DomainSpec& spec);

/// Closed boundary polylines sampled at spacing <= h. Outer loops are CCW,
/// holes CW. Each loop stores consecutive vertices without repeating the
/// first point at the end.
std::vector<std::vector<Vec2>> boundary_loops(const DomainSpec& spec, double h);

/// Point-in-region test against the polygonalized boundary (winding number
/// over all loops). Used by the mesher so vertex classification matches the
/// meshed polygonal domain exactly.
bool loops_contain(const std::vector<std::vector<Vec2>>& loops, const Vec2& p);

/// Distance from p to the nearest polyline segment of any loop.
double loops_distance(const std::vector<std::vector<Vec2>>& loops, const Vec2& p);

// ---------------------------------------------------------------------------
// Convex polygon operations
// ---------------------------------------------------------------------------

using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);
bool polygon_is_ccw(const Polygon& poly);
bool polygon_is_convex_ccw(const Polygon& poly);
bool polygon_is_simple(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Vec2& p);

/// h_P(xi) = max over vertices of x . xi. Throws ZeroDirection on xi = 0,
/// NotConvex if P is not convex CCW.
double support_function_polygon(const Polygon& poly, const Vec2& xi);

/// (1-rho) P + rho Q by the merged-edge-normal rotating sweep. Both inputs
/// must be convex CCW; the result is convex CCW. rho in [0,1].
Polygon minkowski_combine_polygons(const Polygon& P, const Polygon& Q, double rho);

// ---------------------------------------------------------------------------
// Pixel masks and set-level Steiner symmetrization
// ---------------------------------------------------------------------------

enum class Axis { X1, X2 };

/// Boolean occupancy grid. Cell (i,j) covers the square with corner
/// origin + (i,j)*cell and center origin + (i+1/2, j+1/2)*cell.
struct PixelMask {
    Vec2 origin;
    double cell{1.0};
    int nx{0}, ny{0};
    std::vector<std::uint8_t> cells;  // row-major, j*nx + i

    bool at(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
        return cells[static_cast<std::size_t>(j) * nx + i] != 0;
    }
    void set(int i, int j, bool v) {
        cells[static_cast<std::size_t>(j) * nx + i] = v ? 1 : 0;
    }
    Vec2 center(int i, int j) const {
        return {origin.x + (i + 0.5) * cell, origin.y + (j + 0.5) * cell};
    }
    long count() const;
};

/// Rasterize a domain. cell = 0 picks the default (bounding-box diagonal /
/// 256). The grid is aligned so that the coordinate axes fall on cell
/// boundaries, which makes symmetric domains rasterize symmetrically.
PixelMask rasterize(const DomainSpec& spec, double cell = 0.0);

PixelMask rasterize_polygon(const Polygon& poly, double cell, double pad = 0.0);

/// Steiner symmetrization with respect to the given axis: for Axis::X1 each
/// vertical section (fixed i column) is replaced by a run of equal cell count
/// centered on the x1-axis. Cell counts per section are preserved exactly.
PixelMask steiner_symmetrize_mask(const PixelMask& mask, Axis axis);

bool mask_equal(const PixelMask& a, const PixelMask& b);

/// Raster convexity test: no unoccupied cell center may lie deeper than
/// slack_cells * cell inside the convex hull of the occupied cell centers.
bool mask_is_convex(const PixelMask& mask, double slack_cells = 1.0);

}  // namespace morrey
