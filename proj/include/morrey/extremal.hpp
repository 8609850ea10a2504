#pragma once

#include <functional>
#include <optional>
#include <string>

#include "morrey/fem.hpp"

namespace morrey {

/// Sharp constant of the sup-norm embedding on the ball B_r in R^n:
/// ((p-n)/(p-1))^{p-1} r^{n-p} n omega_n. Throws InvalidRegime for p <= n.
double ball_lambda(int n, double p, double r);

/// The explicit ball extremal a (r^alpha - |x-x0|^alpha), alpha = (p-n)/(p-1),
/// extended by zero outside B_r(x0).
double ball_extremal_value(int n, double p, double r, double a, const Vec2& x, const Vec2& x0);

/// Holder cusp exponent alpha = (p-n)/(p-1).
double holder_exponent(int n, double p);

/// Lebesgue measure of the unit ball in R^n.
double unit_ball_volume(int n);

/// Sharp constant of the whole-space inequality
/// ||u||_inf^p <= C(n,p) |supp u|^{p/n-1} Int |Du|^p,
/// derived from the ball constant; r-independent by construction.
double whole_space_constant(int n, double p);

// ---------------------------------------------------------------------------
// Pole-energy landscape
// ---------------------------------------------------------------------------

struct PoleSweepEntry {
    Vec2 pole;
    double lambda{0.0};
    SolveReport report;
    bool ok{false};
    std::string error;
};

struct PoleSweepResult {
    std::vector<PoleSweepEntry> entries;
    int argmin{-1};
    double g{0.0};  // sweep grid spacing
    double h{0.0};  // mesh size used per solve

    double min_lambda() const;
    const PoleSweepEntry& best() const;
    bool all_ok() const;
};

struct SweepOptions {
    double h{0.05};
    double g{0.2};
    int jobs{1};
    /// Restrict poles to the closed first quadrant when the spec declares
    /// both axis reflections (orbit representatives; the omitted poles are
    /// symmetry copies).
    bool fundamental_domain_only{false};
};

/// lambda(y) over interior grid poles with boundary clearance >= 2h; one
/// potential solve per pole. Failed solves are kept as failure markers.
PoleSweepResult pole_sweep(const DomainSpec& spec, const SolverConfig& config,
                           const SweepOptions& opts);

// ---------------------------------------------------------------------------
// Extremals
// ---------------------------------------------------------------------------

struct AsymptoticFit {
    double exponent{0.0};
    double coefficient{0.0};
    int samples{0};
};

/// Least-squares fit of log(1-u) against log|x-x0| over the node annulus
/// 2h <= |x-x0| <= 10h. Requires u normalized to max value 1 at x0.
AsymptoticFit asymptotic_fit(const FieldFunction& u, const Vec2& x0, double p);

struct SandwichReport {
    bool passed{false};
    int worst_node{-1};
    double worst_violation{0.0};
    double slack{0.0};
};

/// Two-sided Holder bound at every node:
/// (M/R^a)|x-x0|^a <= M - u <= (M/r^a)|x-x0|^a within the given slack,
/// for B_r(x0) inside the domain inside B_R(x0) (verified geometrically).
SandwichReport holder_sandwich_check(const FieldFunction& u, const Vec2& x0, double r,
                                     double R, double p, double slack = 2e-2);

struct ExtremalSolution {
    std::shared_ptr<const Mesh> mesh;
    FieldFunction u;       // max value 1, attained at the pole vertex
    Vec2 x0;               // refined maximizer
    double lambda_p{0.0};
    double rayleigh{0.0};  // energy / max^p; equals lambda_p
    AsymptoticFit fit;
    SolveReport report;
    PoleSweepResult sweep;
};

struct FindOptions {
    double h{0.05};
    double sweep_g{0.0};     // 0 = default 4h
    double sweep_h{0.0};     // 0 = same as h
    int jobs{1};
    bool fundamental_domain_only{false};
    double pole_tol{0.0};    // 0 = default h/4
    int max_refine_evals{60};
};

/// Coarse pole sweep followed by Nelder-Mead refinement of y -> lambda(y),
/// re-meshing with the pole pinned at every evaluation, until the simplex
/// diameter drops below pole_tol. Infeasible trial poles (clearance < 2h)
/// are rejected, which clamps the refinement to the interior.
ExtremalSolution find_extremal(const DomainSpec& spec, const SolverConfig& config,
                               const FindOptions& opts);

struct UniquenessReport {
    bool symmetry_consistent{false};
    double max_field_asymmetry{0.0};  // max over declared ops of ||u o g - u||_inf
    int orbit_size{0};                // distinct images of x0 (0 = continuum orbit)
    std::string count_estimate;
    double orbit_lambda_spread_rel{0.0};  // noise floor over the x0 orbit
    Vec2 x0;
    double lambda_p{0.0};
};

/// Symmetry/uniqueness consequence probe: resamples u along every declared
/// symmetry and reports the orbit structure of the maximizer. Convex domains
/// are expected symmetry-consistent with a singleton orbit; annuli report a
/// continuum orbit; bow ties a reflection pair.
UniquenessReport uniqueness_probe(const DomainSpec& spec, const SolverConfig& config,
                                  const FindOptions& opts);

}  // namespace morrey
