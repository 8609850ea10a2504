#include "morrey/fem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "morrey/errors.hpp"

namespace morrey {

namespace {

// Per-triangle geometry cache: basis gradients and area.
struct TriGeom {
    Vec2 g[3];
    double area;
};

std::vector<TriGeom> build_geometry(const Mesh& mesh) {
    std::vector<TriGeom> geo(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
        const double twoA = orient2d(a, b, c);
        if (!(twoA > 0)) throw MeshError("degenerate triangle in energy assembly");
        geo[t].area = 0.5 * twoA;
        geo[t].g[0] = perp(c - b) * (1.0 / twoA);
        geo[t].g[1] = perp(a - c) * (1.0 / twoA);
        geo[t].g[2] = perp(b - a) * (1.0 / twoA);
    }
    return geo;
}

Vec2 tri_gradient(const TriGeom& g, const std::array<int, 3>& tr, std::span<const double> u) {
    Vec2 s{0, 0};
    for (int k = 0; k < 3; ++k) s += g.g[k] * u[tr[k]];
    return s;
}

double regularized_energy(const Mesh& mesh, const std::vector<TriGeom>& geo,
                          std::span<const double> u, double p, double eps) {
    double E = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Vec2 du = tri_gradient(geo[t], mesh.triangles[t], u);
        E += geo[t].area * std::pow(norm2(du) + eps, 0.5 * p);
    }
    return E;
}

// Newton minimization of the regularized energy over the free DOFs.
// Returns total iterations; updates u in place.
int newton_stage(const Mesh& mesh, const std::vector<TriGeom>& geo,
                 const std::vector<int>& free_index,  // vertex -> free dof or -1
                 const std::vector<int>& free_verts, std::vector<double>& u,
                 double p, double eps, const SolverConfig& cfg,
                 Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& ldlt, bool& analyzed) {
    const int nf = (int)free_verts.size();
    Eigen::VectorXd grad(nf);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.triangles.size() * 9);

    double E = regularized_energy(mesh, geo, u, p, eps);
    int iters = 0;

    for (; iters < cfg.max_iter; ++iters) {
        // assemble gradient and Hessian of the regularized energy
        grad.setZero();
        trips.clear();
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tr = mesh.triangles[t];
            const TriGeom& g = geo[t];
            const Vec2 du = tri_gradient(g, tr, u);
            const double s = norm2(du) + eps;
            const double w1 = p * std::pow(s, 0.5 * p - 1.0);          // gradient weight
            const double w2 = p * (p - 2.0) * std::pow(s, 0.5 * p - 2.0);  // curvature weight
            double gk[3];
            for (int k = 0; k < 3; ++k) gk[k] = dot(du, g.g[k]);
            for (int k = 0; k < 3; ++k) {
                const int fk = free_index[tr[k]];
                if (fk < 0) continue;
                grad[fk] += g.area * w1 * gk[k];
                for (int l = 0; l < 3; ++l) {
                    const int fl = free_index[tr[l]];
                    if (fl < 0) continue;
                    const double hkl = g.area * (w1 * dot(g.g[k], g.g[l]) + w2 * gk[k] * gk[l]);
                    trips.emplace_back(fk, fl, hkl);
                }
            }
        }
        const double gnorm = grad.lpNorm<Eigen::Infinity>();
        if (gnorm <= cfg.grad_tol) break;

        Eigen::SparseMatrix<double> H(nf, nf);
        H.setFromTriplets(trips.begin(), trips.end());
        if (!analyzed) { ldlt.analyzePattern(H); analyzed = true; }
        ldlt.factorize(H);
        if (ldlt.info() != Eigen::Success)
            throw ConvergenceError("Hessian factorization failed", u, E);
        Eigen::VectorXd d = ldlt.solve(-grad);

        double slope = grad.dot(d);
        if (!(slope < 0)) {
            d = -grad;  // fallback; cannot happen for an SPD solve, kept as a guard
            slope = grad.dot(d);
        }

        // Armijo backtracking
        double alpha = 1.0;
        bool accepted = false;
        std::vector<double> trial = u;
        for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
            for (int i = 0; i < nf; ++i) trial[free_verts[i]] = u[free_verts[i]] + alpha * d[i];
            const double Et = regularized_energy(mesh, geo, trial, p, eps);
            if (Et <= E + cfg.armijo_c1 * alpha * slope) {
                if (Et > E + std::abs(E) * 1e-14)
                    throw Error("line search accepted an energy increase");
                u = trial;
                E = Et;
                accepted = true;
                break;
            }
            alpha *= cfg.armijo_shrink;
        }
        if (!accepted) {
            // only reachable at machine-precision stagnation
            break;
        }
    }
    return iters;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(p > 2.0)) throw ConfigError("solver: p must exceed n = 2");
    if (!(grad_tol > 0)) throw ConfigError("solver: grad_tol must be positive");
    if (eps_schedule.empty()) throw ConfigError("solver: empty eps schedule");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] > eps_schedule[i + 1]))
            throw ConfigError("solver: eps schedule must decrease strictly");
    if (!(eps_schedule.back() >= 0)) throw ConfigError("solver: eps floor must be >= 0");
}

double FieldFunction::max_value() const {
    return *std::max_element(values.begin(), values.end());
}
double FieldFunction::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

double p_energy(const Mesh& mesh, std::span<const double> values, double p) {
    if (values.size() != mesh.vertices.size())
        throw MeshError("p_energy: value count mismatch");
    const auto geo = build_geometry(mesh);
    double E = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Vec2 du = tri_gradient(geo[t], mesh.triangles[t], values);
        E += geo[t].area * std::pow(norm2(du), 0.5 * p);
    }
    return E;
}

double p_energy(const FieldFunction& u, double p) {
    return p_energy(*u.mesh, u.values, p);
}

double p_energy_regularized(const Mesh& mesh, std::span<const double> values, double p,
                            double eps_reg) {
    if (values.size() != mesh.vertices.size())
        throw MeshError("p_energy_regularized: value count mismatch");
    const auto geo = build_geometry(mesh);
    return regularized_energy(mesh, geo, values, p, eps_reg);
}

std::vector<double> energy_gradient(const Mesh& mesh, std::span<const double> values,
                                    double p, double eps_reg) {
    if (values.size() != mesh.vertices.size())
        throw MeshError("energy_gradient: value count mismatch");
    const auto geo = build_geometry(mesh);
    std::vector<double> grad(mesh.vertices.size(), 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 du = tri_gradient(geo[t], tr, values);
        const double w = p * std::pow(norm2(du) + eps_reg, 0.5 * p - 1.0);
        for (int k = 0; k < 3; ++k)
            grad[tr[k]] += geo[t].area * w * dot(du, geo[t].g[k]);
    }
    return grad;
}

PotentialSolution solve_potential(std::shared_ptr<const Mesh> mesh, const SolverConfig& config,
                                  const std::vector<double>* warm_start) {
    config.validate();
    if (!mesh || mesh->pole_vertex < 0) throw NoPole("solve_potential: mesh has no pole vertex");
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh& m = *mesh;
    const auto geo = build_geometry(m);

    std::vector<int> free_index(m.vertices.size(), -1);
    std::vector<int> free_verts;
    for (int v = 0; v < (int)m.vertices.size(); ++v) {
        if (m.boundary[v] || v == m.pole_vertex) continue;
        free_index[v] = (int)free_verts.size();
        free_verts.push_back(v);
    }

    std::vector<double> u(m.vertices.size(), 0.0);
    u[m.pole_vertex] = 1.0;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;
    int iters = 0;

    if (warm_start) {
        if (warm_start->size() != u.size())
            throw MeshError("solve_potential: warm start size mismatch");
        u = *warm_start;
        u[m.pole_vertex] = 1.0;
        for (int v = 0; v < (int)m.vertices.size(); ++v)
            if (m.boundary[v]) u[v] = 0.0;
    } else {
        // initial iterate: the p = 2 (linear) solution with the same pins
        SolverConfig lin = config;
        lin.max_iter = 3;
        iters += newton_stage(m, geo, free_index, free_verts, u, 2.0, 0.0, lin, ldlt, analyzed);
    }

    const double p = config.p;
    std::vector<double> schedule =
        warm_start ? std::vector<double>{config.eps_schedule.back()} : config.eps_schedule;

    for (double eps : schedule)
        iters += newton_stage(m, geo, free_index, free_verts, u, p, eps, config, ldlt, analyzed);

    // final KKT residual at the floor
    const double eps_floor = config.eps_schedule.back();
    const auto grad = energy_gradient(m, u, p, eps_floor);
    double kkt = 0.0;
    for (int v : free_verts) kkt = std::max(kkt, std::abs(grad[v]));
    if (kkt > config.grad_tol) {
        throw ConvergenceError("solve_potential: residual above tolerance", u,
                               p_energy(m, u, p));
    }

    // discrete maximum principle, asserted not assumed
    for (double v : u) {
        if (v < -1e-10 || v > 1.0 + 1e-10)
            throw Error("maximum principle violated at a node: value " + std::to_string(v));
    }

    PotentialSolution out;
    out.w.mesh = mesh;
    out.w.values = std::move(u);
    out.lambda = p_energy(m, out.w.values, p);
    out.report.energy = out.lambda;
    out.report.kkt = kkt;
    out.report.iters = iters;
    out.report.eps_floor = eps_floor;
    out.report.converged = true;
    out.report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

GreenFunction green_function(std::shared_ptr<const Mesh> mesh, const SolverConfig& config) {
    auto sol = solve_potential(mesh, config);
    return green_from_potential(sol.w, sol.lambda, config.p);
}

GreenFunction green_from_potential(const FieldFunction& w, double energy, double p) {
    if (!w.mesh || w.mesh->pole_vertex < 0) throw NoPole("green: field has no pole");
    const double a = w.values[w.mesh->pole_vertex];
    if (!(a != 0.0)) throw Error("green: zero pole value");
    const double scale = std::pow(energy / a, -1.0 / (p - 1.0));
    GreenFunction g;
    g.g.mesh = w.mesh;
    g.g.values.resize(w.values.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) g.g.values[i] = scale * w.values[i];
    g.diag = g.g.values[w.mesh->pole_vertex];
    return g;
}

}  // namespace morrey
