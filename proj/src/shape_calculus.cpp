#include "morrey/shape_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "morrey/errors.hpp"

namespace morrey {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// GridFunction basics
// ---------------------------------------------------------------------------

double GridFunction::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

Vec2 GridFunction::argmax_center() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return center((int)(best % nx), (int)(best / nx));
}

void GridFunction::to_csv(std::ostream& os) const {
    os << "origin_x,origin_y,cell,nx,ny\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << num(origin.x) << ',' << num(origin.y) << ',' << num(cell) << ',' << nx << ',' << ny
       << '\n';
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (i) os << ',';
            os << num(at(i, j));
        }
        os << '\n';
    }
}

GridFunction from_csv_impl(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("origin_x", 0) != 0)
        throw ConfigError("grid csv: missing header");
    if (!std::getline(is, line)) throw ConfigError("grid csv: missing geometry row");
    GridFunction g;
    {
        std::istringstream ss(line);
        std::string tok;
        double vals[5];
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(ss, tok, ',')) throw ConfigError("grid csv: short geometry row");
            vals[k] = std::stod(tok);
        }
        g.origin = {vals[0], vals[1]};
        g.cell = vals[2];
        g.nx = (int)vals[3];
        g.ny = (int)vals[4];
    }
    if (g.nx <= 0 || g.ny <= 0 || !(g.cell > 0)) throw ConfigError("grid csv: bad geometry");
    g.values.reserve((std::size_t)g.nx * g.ny);
    for (int j = 0; j < g.ny; ++j) {
        if (!std::getline(is, line)) throw ConfigError("grid csv: short file");
        std::istringstream ss(line);
        std::string tok;
        for (int i = 0; i < g.nx; ++i) {
            if (!std::getline(ss, tok, ',')) throw ConfigError("grid csv: short row");
            g.values.push_back(std::stod(tok));
        }
    }
    return g;
}

GridFunction GridFunction::from_csv(std::istream& is) { return from_csv_impl(is); }

PixelMask superlevel_mask(const GridFunction& u, double t) {
    PixelMask m;
    m.origin = u.origin;
    m.cell = u.cell;
    m.nx = u.nx;
    m.ny = u.ny;
    m.cells.assign(u.values.size(), 0);
    for (std::size_t i = 0; i < u.values.size(); ++i) m.cells[i] = u.values[i] > t ? 1 : 0;
    return m;
}

bool is_quasiconcave(const GridFunction& u, int levels, double slack_cells) {
    for (int j = 0; j < levels; ++j) {
        const double t = (j + 0.5) / levels;
        if (!mask_is_convex(superlevel_mask(u, t), slack_cells)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Minkowski combination via the level-set identity
// ---------------------------------------------------------------------------

namespace {

struct RationalRho {
    long a, q;  // rho = a/q
};

RationalRho rationalize_rho(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw Error("minkowski combination: rho must be in [0,1]");
    for (long q = 1; q <= 64; ++q) {
        const double aq = rho * q;
        const long a = std::lround(aq);
        if (std::abs(aq - a) < 1e-9) return {a, q};
    }
    throw Error("minkowski combination: rho must be rational a/q with q <= 64");
}

void require_same_lattice(const GridFunction& u0, const GridFunction& u1) {
    if (u0.nx != u1.nx || u0.ny != u1.ny || u0.cell != u1.cell ||
        !(u0.origin == u1.origin))
        throw Error("minkowski combination: grids must share the lattice");
}

}  // namespace

GridFunction minkowski_combination(const GridFunction& u0, const GridFunction& u1, double rho,
                                   int levels) {
    require_same_lattice(u0, u1);
    const auto [a, q] = rationalize_rho(rho);
    const long b = q - a;  // weight of u0 in index space

    GridFunction out;
    out.origin = u0.origin;
    out.cell = u0.cell;
    out.nx = u0.nx;
    out.ny = u0.ny;
    out.values.assign(u0.values.size(), 0.0);

    std::vector<int> counts(u0.values.size(), 0);
    std::vector<std::pair<int, int>> A, B;
    for (int j = 0; j < levels; ++j) {
        const double t = (double)j / levels;
        A.clear();
        B.clear();
        for (int jy = 0; jy < u0.ny; ++jy)
            for (int ix = 0; ix < u0.nx; ++ix) {
                if (u0.at(ix, jy) > t) A.emplace_back(ix, jy);
                if (u1.at(ix, jy) > t) B.emplace_back(ix, jy);
            }
        // quasiconcavity is a precondition of the level-set identity
        if (!mask_is_convex(superlevel_mask(u0, t), 1.0) ||
            !mask_is_convex(superlevel_mask(u1, t), 1.0))
            throw NotQuasiconcave("minkowski combination: superlevel set not convex");
        if (A.empty() || B.empty()) continue;
        for (const auto& [x0, y0] : A) {
            const long sx0 = b * x0, sy0 = b * y0;
            for (const auto& [x1, y1] : B) {
                const long sx = sx0 + a * x1, sy = sy0 + a * y1;
                if (sx % q || sy % q) continue;
                const long zx = sx / q, zy = sy / q;
                if (zx < 0 || zy < 0 || zx >= out.nx || zy >= out.ny) continue;
                ++counts[(std::size_t)zy * out.nx + zx];
            }
        }
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > 0) out.values[i] += 1.0 / levels;
            counts[i] = 0;
        }
    }
    return out;
}

AffinityReport maximizer_affinity_check(const GridFunction& u0, const GridFunction& u1,
                                        double rho, const Vec2& x0, const Vec2& x1,
                                        int levels) {
    const GridFunction u = minkowski_combination(u0, u1, rho, levels);
    AffinityReport rep;
    rep.expected = x0 * (1.0 - rho) + x1 * rho;
    rep.found = u.argmax_center();
    rep.max_value = u.max_value();
    const double cell_tol = u.cell * (1.0 + 1e-9);
    rep.passed = dist(rep.found, rep.expected) <= cell_tol &&
                 std::abs(rep.max_value - 1.0) <= 1.0 / levels + 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// Support profiles
// ---------------------------------------------------------------------------

void SupportProfile::to_csv(std::ostream& os) const {
    os << "theta,t,h\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t k = 0; k < thetas.size(); ++k)
        for (std::size_t j = 0; j < levels.size(); ++j)
            os << num(thetas[k]) << ',' << num(levels[j]) << ','
               << num(values[k * levels.size() + j]) << '\n';
}

SupportProfile support_profile(const GridFunction& u, int directions, int levels) {
    SupportProfile sp;
    sp.thetas.resize(directions);
    sp.levels.resize(levels);
    sp.values.assign((std::size_t)directions * levels, std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < directions; ++k) sp.thetas[k] = 2.0 * kPi * k / directions;
    for (int j = 0; j < levels; ++j) sp.levels[j] = (j + 0.5) / levels;
    for (int j = 0; j < levels; ++j) {
        const double t = sp.levels[j];
        std::vector<Vec2> pts;
        for (int jy = 0; jy < u.ny; ++jy)
            for (int ix = 0; ix < u.nx; ++ix)
                if (u.at(ix, jy) > t) pts.push_back(u.center(ix, jy));
        if (pts.empty()) continue;
        for (int k = 0; k < directions; ++k) {
            const Vec2 xi{std::cos(sp.thetas[k]), std::sin(sp.thetas[k])};
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& p : pts) best = std::max(best, dot(p, xi));
            sp.values[(std::size_t)k * levels + j] = best;
        }
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Radial support ODE
// ---------------------------------------------------------------------------

double radial_support_ode_residual_with_exponent(double p, int n, double t, double r,
                                                 double beta) {
    if (!(t > 0.0 && t < 1.0)) throw OutOfRange("radial ODE residual: t must be in (0,1)");
    if (!(p > n)) throw InvalidRegime("radial ODE residual: need p > n");
    const double R = r * std::pow(1.0 - t, beta);
    const double Rp = -r * beta * std::pow(1.0 - t, beta - 1.0);
    const double Rpp = r * beta * (beta - 1.0) * std::pow(1.0 - t, beta - 2.0);
    return Rp * Rp * (n - 1) / R - (p - 1.0) * Rpp;
}

double radial_support_ode_residual(double p, int n, double t, double r) {
    const double beta = (p - 1.0) / (p - n);
    return radial_support_ode_residual_with_exponent(p, n, t, r, beta);
}

// ---------------------------------------------------------------------------
// Steiner rearrangement of grid functions
// ---------------------------------------------------------------------------

GridFunction steiner_rearrange(const GridFunction& u, Axis axis) {
    GridFunction out = u;
    const bool col = (axis == Axis::X1);
    const int nsec = col ? u.nx : u.ny;
    const int nlen = col ? u.ny : u.nx;
    const double sec_origin = col ? u.origin.y : u.origin.x;
    const double axis_pos = (0.0 - sec_origin) / u.cell - 0.5;  // index of the axis line

    // placement order: positions nearest the axis first, ties to lower index
    std::vector<int> order(nlen);
    for (int k = 0; k < nlen; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(a - axis_pos) < std::abs(b - axis_pos);
    });

    std::vector<double> sec(nlen);
    for (int s = 0; s < nsec; ++s) {
        for (int k = 0; k < nlen; ++k) sec[k] = col ? u.at(s, k) : u.at(k, s);
        std::sort(sec.begin(), sec.end(), std::greater<double>());
        for (int k = 0; k < nlen; ++k) {
            const int pos = order[k];
            if (col) out.at(s, pos) = sec[k];
            else out.at(pos, s) = sec[k];
        }
    }
    return out;
}

double grid_p_energy(const GridFunction& u, double p) {
    // bilinear interpolation between cell centers, 2x2 Gauss per quad
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    double E = 0.0;
    for (int j = 0; j + 1 < u.ny; ++j) {
        for (int i = 0; i + 1 < u.nx; ++i) {
            const double u00 = u.at(i, j), u10 = u.at(i + 1, j);
            const double u01 = u.at(i, j + 1), u11 = u.at(i + 1, j + 1);
            for (double gx : gp) {
                for (double gy : gp) {
                    const double dx = ((u10 - u00) * (1.0 - gy) + (u11 - u01) * gy) / u.cell;
                    const double dy = ((u01 - u00) * (1.0 - gx) + (u11 - u10) * gx) / u.cell;
                    E += 0.25 * u.cell * u.cell * std::pow(dx * dx + dy * dy, 0.5 * p);
                }
            }
        }
    }
    return E;
}

PolyaSzegoResult polya_szego_check(const GridFunction& u, double p, Axis axis,
                                   double slack_rel) {
    for (int i = 0; i < u.nx; ++i)
        if (u.at(i, 0) != 0.0 || u.at(i, u.ny - 1) != 0.0)
            throw Error("polya-szego: field must vanish on the grid boundary");
    for (int j = 0; j < u.ny; ++j)
        if (u.at(0, j) != 0.0 || u.at(u.nx - 1, j) != 0.0)
            throw Error("polya-szego: field must vanish on the grid boundary");
    PolyaSzegoResult res;
    res.energy_before = grid_p_energy(u, p);
    res.energy_after = grid_p_energy(steiner_rearrange(u, axis), p);
    res.passed = res.energy_after <= res.energy_before * (1.0 + slack_rel) + 1e-14;
    return res;
}

GridFunction make_talenti_grid(Vec2 origin, double cell, int nx, int ny, Vec2 center,
                               double radius, double p, int n) {
    GridFunction g;
    g.origin = origin;
    g.cell = cell;
    g.nx = nx;
    g.ny = ny;
    g.values.resize((std::size_t)nx * ny);
    const double a = std::pow(radius, -holder_exponent(n, p));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            g.at(i, j) = ball_extremal_value(n, p, radius, a, g.center(i, j), center);
    return g;
}

GridFunction make_random_quasiconcave_grid(std::uint32_t seed, int nx, int ny, double cell) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // random convex polygon around the grid center, radii in [0.45, 1] of the
    // largest inscribed extent so the field vanishes before the boundary
    const Vec2 origin{0.0, 0.0};
    GridFunction g;
    g.origin = origin;
    g.cell = cell;
    g.nx = nx;
    g.ny = ny;
    g.values.assign((std::size_t)nx * ny, 0.0);
    const Vec2 c = {origin.x + 0.5 * nx * cell + (unit(rng) - 0.5) * 0.2 * nx * cell,
                    origin.y + 0.5 * ny * cell + (unit(rng) - 0.5) * 0.2 * ny * cell};
    // support must die out strictly before the grid edge
    const double rmax = std::min(std::min(c.x - origin.x, origin.x + nx * cell - c.x),
                                 std::min(c.y - origin.y, origin.y + ny * cell - c.y)) -
                        2.5 * cell;
    const int K = 8;
    std::array<Vec2, K> verts;
    for (int k = 0; k < K; ++k) {
        const double r = rmax * (0.45 + 0.55 * unit(rng));
        const double t = 2.0 * kPi * (k + 0.3 * unit(rng)) / K;
        verts[k] = {r * std::cos(t), r * std::sin(t)};
    }
    // convex hull gauge via support of the hull's vertex fan:
    // gauge(x) = min { s > 0 : x/s in hull }; evaluated by ray casting
    Polygon hull(verts.begin(), verts.end());
    {
        std::sort(hull.begin(), hull.end(), [](const Vec2& a, const Vec2& b) {
            return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
        });
        // drop reflex vertices until convex
        bool changed = true;
        while (changed && hull.size() > 3) {
            changed = false;
            for (std::size_t i = 0; i < hull.size(); ++i) {
                const Vec2 a = hull[(i + hull.size() - 1) % hull.size()];
                const Vec2 b = hull[i];
                const Vec2 d = hull[(i + 1) % hull.size()];
                if (orient2d(a, b, d) <= 0) {
                    hull.erase(hull.begin() + i);
                    changed = true;
                    break;
                }
            }
        }
    }
    const double beta = 0.5 + 1.5 * unit(rng);
    auto gauge = [&](const Vec2& x) {
        // max over edges of the scaled support inequality
        double best = 0.0;
        for (std::size_t e = 0; e < hull.size(); ++e) {
            const Vec2 a = hull[e], b = hull[(e + 1) % hull.size()];
            const Vec2 nrm = perp(b - a);  // inward for CCW
            const double denom = dot(nrm, a);
            if (denom == 0) continue;
            best = std::max(best, dot(nrm, x) / denom);
        }
        return best;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double q = gauge(g.center(i, j) - c);
            if (q < 1.0) g.at(i, j) = std::pow(1.0 - q, beta);
        }
    return g;
}

SteinerArgmaxReport steiner_argmax_check(const DomainSpec& spec, const SolverConfig& config,
                                         const FindOptions& opts) {
    SteinerArgmaxReport rep;
    const PixelMask mask = rasterize(spec);
    const PixelMask sym1 = steiner_symmetrize_mask(mask, Axis::X1);
    const PixelMask sym12 = steiner_symmetrize_mask(sym1, Axis::X2);
    rep.steiner_symmetric = mask_equal(mask, sym1) && mask_equal(mask, sym12);
    if (!rep.steiner_symmetric) return rep;

    auto sol = find_extremal(spec, config, opts);
    rep.x0 = sol.x0;
    rep.lambda_p = sol.lambda_p;
    rep.passed = norm(sol.x0) <= opts.h;
    return rep;
}

}  // namespace morrey
