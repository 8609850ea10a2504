#pragma once

#include <memory>
#include <span>
#include <vector>

#include "morrey/mesh.hpp"

namespace morrey {

/// Piecewise-linear scalar field given by one value per mesh vertex.
struct FieldFunction {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values;

    double max_value() const;
    double min_value() const;
};

/// Parameters of the regularized p-Dirichlet minimization. The energy is
/// continued through the eps_schedule (each stage warm-starts the next) so
/// damped Newton stays well conditioned where the p-Laplacian degenerates.
struct SolverConfig {
    double p{3.0};                        // exponent, must exceed n = 2
    std::vector<double> eps_schedule{1e-2, 1e-4, 1e-6, 1e-8};
    double grad_tol{1e-8};                // KKT residual tolerance (inf norm)
    int max_iter{200};                    // Newton iterations per stage
    double armijo_c1{1e-4};
    double armijo_shrink{0.5};
    int max_backtracks{48};

    void validate() const;
};

struct SolveReport {
    double energy{0.0};     // unregularized p-Dirichlet energy of the result
    double kkt{0.0};        // final projected gradient norm (inf)
    int iters{0};           // Newton iterations, all stages
    double eps_floor{0.0};  // last regularization level reached
    double seconds{0.0};
    bool converged{false};
};

/// Integral of |Du|^p over the mesh (per-triangle constant gradients).
double p_energy(const Mesh& mesh, std::span<const double> values, double p);
double p_energy(const FieldFunction& u, double p);

/// The solver objective sum_T area (|Du|^2 + eps)^{p/2}; energy_gradient is
/// its exact nodal gradient.
double p_energy_regularized(const Mesh& mesh, std::span<const double> values, double p,
                            double eps_reg);

/// Nodal gradient of the regularized energy sum_T area * (|Du|^2 + eps)^{p/2};
/// component i is the partial derivative with respect to the value at vertex i.
std::vector<double> energy_gradient(const Mesh& mesh, std::span<const double> values,
                                    double p, double eps_reg);

struct PotentialSolution {
    FieldFunction w;      // w = 0 on the boundary, w(pole) = 1, 0 <= w <= 1
    double lambda{0.0};   // p-Dirichlet energy of w
    SolveReport report;
};

/// Minimize the p-Dirichlet energy over fields with zero boundary values and
/// value 1 at the pole vertex. The pole constraint is eliminated (DOF pinned),
/// so the converged multiplier shows up in the residual at the pole row.
/// A warm start, when given, skips the continuation and solves at the floor.
///
/// Throws NoPole if the mesh has no pole vertex, ConvergenceError (carrying
/// the best iterate) on stagnation, and Error if the discrete maximum
/// principle fails beyond 1e-10 (treated as a solver bug, never clamped).
PotentialSolution solve_potential(std::shared_ptr<const Mesh> mesh, const SolverConfig& config,
                                  const std::vector<double>* warm_start = nullptr);

struct GreenFunction {
    FieldFunction g;     // G(. , y) with y the mesh pole
    double diag{0.0};    // G(y, y)
};

/// Green's function of the p-Laplacian with pole at the mesh's pole vertex,
/// scaled from the potential by (p-1)-homogeneity.
GreenFunction green_function(std::shared_ptr<const Mesh> mesh, const SolverConfig& config);

/// Rescale an arbitrary-amplitude potential (value a at the pole, energy mu)
/// to the Green's function: G = (mu/a)^{-1/(p-1)} * w. Exposed for the
/// homogeneity checks.
GreenFunction green_from_potential(const FieldFunction& w, double energy, double p);

}  // namespace morrey
