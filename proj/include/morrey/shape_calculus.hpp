#pragma once

#include <iosfwd>

#include "morrey/extremal.hpp"
#include "morrey/geometry.hpp"

namespace morrey {

/// Scalar field sampled at the cell centers of a uniform rectangular grid
/// (the same lattice convention as PixelMask, so superlevel sets are masks).
struct GridFunction {
    Vec2 origin;
    double cell{1.0};
    int nx{0}, ny{0};
    std::vector<double> values;  // row-major, j*nx + i

    double at(int i, int j) const { return values[(std::size_t)j * nx + i]; }
    double& at(int i, int j) { return values[(std::size_t)j * nx + i]; }
    Vec2 center(int i, int j) const {
        return {origin.x + (i + 0.5) * cell, origin.y + (j + 0.5) * cell};
    }
    double max_value() const;
    /// Center of the cell holding the maximum (first in row-major order).
    Vec2 argmax_center() const;

    void to_csv(std::ostream& os) const;
    static GridFunction from_csv(std::istream& is);
};

/// Cells where u > t (strict, matching the level-set identity convention).
PixelMask superlevel_mask(const GridFunction& u, double t);

/// Every ladder superlevel set convex up to raster slack.
bool is_quasiconcave(const GridFunction& u, int levels = 16, double slack_cells = 1.0);

/// Minkowski combination u_rho(z) = sup { min(u0(x), u1(y)) : z = (1-rho)x + rho y },
/// computed level-by-level over a uniform ladder of `levels` values in (0,1):
/// each superlevel mask of the result is the exact lattice Minkowski
/// combination of the input masks. rho must be rational a/q with q <= 64 so
/// the lattice pairs are exact. Throws NotQuasiconcave on invalid inputs.
GridFunction minkowski_combination(const GridFunction& u0, const GridFunction& u1, double rho,
                                   int levels = 64);

struct AffinityReport {
    bool passed{false};
    Vec2 expected, found;
    double max_value{0.0};
};

/// Checks that the maximizer of the combination sits within one cell of
/// (1-rho) x0 + rho x1 and that the max value is 1 within ladder tolerance.
AffinityReport maximizer_affinity_check(const GridFunction& u0, const GridFunction& u1,
                                        double rho, const Vec2& x0, const Vec2& x1,
                                        int levels = 64);

/// Support function h(xi_k, t_j) of the superlevel sets over K uniform
/// directions and J interior levels t_j = (j + 1/2)/J.
struct SupportProfile {
    std::vector<double> thetas;
    std::vector<double> levels;
    std::vector<double> values;  // K x J, row-major in k
    double at(int k, int j) const { return values[(std::size_t)k * levels.size() + j]; }
    void to_csv(std::ostream& os) const;
};

SupportProfile support_profile(const GridFunction& u, int directions, int levels);

/// Residual of the radial reduction of the support-function PDE for level-set
/// radius R(t) = r (1-t)^{(p-1)/(p-n)}:
///   R'(t)^2 (n-1)/R(t) - (p-1) R''(t),
/// which vanishes identically for the ball extremal profile.
double radial_support_ode_residual(double p, int n, double t, double r);

/// Same residual with R(t) = r (1-t)^beta for an arbitrary exponent beta
/// (negative control: perturbed exponents do not satisfy the equation).
double radial_support_ode_residual_with_exponent(double p, int n, double t, double r,
                                                 double beta);

/// Steiner rearrangement of u with respect to the axis: each section's value
/// multiset is redistributed symmetric-decreasing about the axis (largest
/// value nearest the axis line). Exactly measure preserving per section.
GridFunction steiner_rearrange(const GridFunction& u, Axis axis);

struct PolyaSzegoResult {
    double energy_before{0.0};
    double energy_after{0.0};
    bool passed{false};
};

/// p-Dirichlet energy via bilinear-cell 2x2 Gauss quadrature.
double grid_p_energy(const GridFunction& u, double p);

/// Energy comparison under Steiner rearrangement; passes when the energy does
/// not increase beyond slack_rel * energy_before. Requires u to vanish on the
/// outermost cells.
PolyaSzegoResult polya_szego_check(const GridFunction& u, double p, Axis axis,
                                   double slack_rel = 0.01);

struct SteinerArgmaxReport {
    bool steiner_symmetric{false};
    bool passed{false};
    Vec2 x0;
    double lambda_p{0.0};
};

/// Verifies the domain equals its Steiner symmetrization about both axes
/// (mask fixed point), runs find_extremal, and checks |x0| <= h.
SteinerArgmaxReport steiner_argmax_check(const DomainSpec& spec, const SolverConfig& config,
                                         const FindOptions& opts);

// --- test-field builders ----------------------------------------------------

/// Grid sample of the ball extremal a (r^alpha - |x-c|^alpha), a = r^-alpha
/// so the max value is 1.
GridFunction make_talenti_grid(Vec2 origin, double cell, int nx, int ny, Vec2 center,
                               double radius, double p, int n = 2);

/// Deterministic quasiconcave bump: u = (1 - gauge(x - c))_+^beta with the
/// gauge of a seeded random convex polygon. Vanishes near the grid edge.
GridFunction make_random_quasiconcave_grid(std::uint32_t seed, int nx, int ny,
                                           double cell = 1.0);

}  // namespace morrey
