#include "morrey/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "morrey/errors.hpp"

namespace morrey {

namespace {
constexpr double kPi = std::numbers::pi;
}

double unit_ball_volume(int n) {
    if (n < 1) throw InvalidRegime("dimension must be >= 1");
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double holder_exponent(int n, double p) {
    if (!(p > n)) throw InvalidRegime("need p > n");
    return (p - n) / (p - 1.0);
}

double ball_lambda(int n, double p, double r) {
    if (!(p > n)) throw InvalidRegime("ball_lambda: need p > n");
    if (!(r > 0)) throw InvalidRegime("ball_lambda: need r > 0");
    const double alpha = (p - n) / (p - 1.0);
    return std::pow(alpha, p - 1.0) * std::pow(r, (double)n - p) * n * unit_ball_volume(n);
}

double ball_extremal_value(int n, double p, double r, double a, const Vec2& x, const Vec2& x0) {
    const double alpha = holder_exponent(n, p);
    const double d = dist(x, x0);
    if (d >= r) return 0.0;
    return a * (std::pow(r, alpha) - std::pow(d, alpha));
}

double whole_space_constant(int n, double p) {
    if (!(p > n)) throw InvalidRegime("whole_space_constant: need p > n");
    // 1 / (lambda_ball(r) |B_r|^{p/n - 1}); the r factors cancel exactly
    const double alpha = (p - n) / (p - 1.0);
    return std::pow(alpha, -(p - 1.0)) / ((double)n * std::pow(unit_ball_volume(n), p / n));
}

// ---------------------------------------------------------------------------
// Pole sweep
// ---------------------------------------------------------------------------

double PoleSweepResult::min_lambda() const { return best().lambda; }

const PoleSweepEntry& PoleSweepResult::best() const {
    if (argmin < 0) throw Error("pole sweep: no converged entry");
    return entries[argmin];
}

bool PoleSweepResult::all_ok() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const PoleSweepEntry& e) { return e.ok; });
}

namespace {

PoleSweepEntry solve_at_pole(const DomainSpec& spec, const SolverConfig& config, double h,
                             const Vec2& pole) {
    PoleSweepEntry e;
    e.pole = pole;
    try {
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, h, pole));
        auto sol = solve_potential(mesh, config);
        e.lambda = sol.lambda;
        e.report = sol.report;
        e.ok = true;
    } catch (const Error& err) {
        e.ok = false;
        e.error = err.what();
        e.lambda = std::numeric_limits<double>::quiet_NaN();
    }
    return e;
}

void pick_argmin(PoleSweepResult& r) {
    r.argmin = -1;
    for (int i = 0; i < (int)r.entries.size(); ++i) {
        const auto& e = r.entries[i];
        if (!e.ok) continue;
        if (r.argmin < 0) { r.argmin = i; continue; }
        const auto& b = r.entries[r.argmin];
        if (e.lambda < b.lambda ||
            (e.lambda == b.lambda &&
             (e.pole.x < b.pole.x || (e.pole.x == b.pole.x && e.pole.y < b.pole.y))))
            r.argmin = i;
    }
}

}  // namespace

PoleSweepResult pole_sweep(const DomainSpec& spec, const SolverConfig& config,
                           const SweepOptions& opts) {
    config.validate();
    if (!(opts.g > 0) || !(opts.h > 0)) throw ConfigError("pole_sweep: need g, h > 0");

    const auto loops = boundary_loops(spec, opts.h);
    const Rect bb = bounding_box(spec);
    const bool quadrant = opts.fundamental_domain_only &&
                          spec.has_symmetry(Symmetry::ReflectX1) &&
                          spec.has_symmetry(Symmetry::ReflectX2);

    std::vector<Vec2> poles;
    const long i0 = (long)std::floor(bb.lo.x / opts.g) - 1;
    const long i1 = (long)std::ceil(bb.hi.x / opts.g) + 1;
    const long j0 = (long)std::floor(bb.lo.y / opts.g) - 1;
    const long j1 = (long)std::ceil(bb.hi.y / opts.g) + 1;
    for (long j = j0; j <= j1; ++j) {
        for (long i = i0; i <= i1; ++i) {
            const Vec2 y{i * opts.g, j * opts.g};
            if (quadrant && (y.x < -1e-12 || y.y < -1e-12)) continue;
            if (!contains(spec, y) || !loops_contain(loops, y)) continue;
            if (loops_distance(loops, y) < 2.0 * opts.h) continue;
            poles.push_back(y);
        }
    }
    // deterministic order: lexicographic in (y1, y2)
    std::sort(poles.begin(), poles.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });

    PoleSweepResult result;
    result.g = opts.g;
    result.h = opts.h;
    result.entries.resize(poles.size());

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || poles.size() <= 1) {
        for (std::size_t i = 0; i < poles.size(); ++i)
            result.entries[i] = solve_at_pole(spec, config, opts.h, poles[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= poles.size()) return;
                result.entries[i] = solve_at_pole(spec, config, opts.h, poles[i]);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    pick_argmin(result);
    return result;
}

// ---------------------------------------------------------------------------
// Asymptotics and sandwich
// ---------------------------------------------------------------------------

AsymptoticFit asymptotic_fit(const FieldFunction& u, const Vec2& x0, double p) {
    if (!u.mesh) throw Error("asymptotic_fit: empty field");
    const Mesh& m = *u.mesh;
    const double h = m.h;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int v = 0; v < (int)m.vertices.size(); ++v) {
        const double d = dist(m.vertices[v], x0);
        if (d < 2.0 * h || d > 10.0 * h) continue;
        const double one_minus = 1.0 - u.values[v];
        if (one_minus <= 1e-14) continue;
        const double lx = std::log(d), ly = std::log(one_minus);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 8) throw InsufficientSamples("asymptotic_fit: fewer than 8 nodes in [2h,10h]");
    const double denom = n * sxx - sx * sx;
    AsymptoticFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.coefficient = std::exp((sy - fit.exponent * sx) / n);
    fit.samples = n;
    (void)p;
    return fit;
}

SandwichReport holder_sandwich_check(const FieldFunction& u, const Vec2& x0, double r,
                                     double R, double p, double slack) {
    if (!u.mesh) throw Error("sandwich: empty field");
    const Mesh& m = *u.mesh;
    const double alpha = holder_exponent(2, p);

    // geometric verification of B_r(x0) subset Omega subset B_R(x0)
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (int v = 0; v < (int)m.vertices.size(); ++v) {
        if (!m.boundary[v]) continue;
        const double d = dist(m.vertices[v], x0);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    const double geom_tol = 1e-9 + 0.25 * m.h * m.h;  // polygonization sagitta budget
    if (r > dmin + geom_tol) throw Error("sandwich: B_r(x0) is not inside the domain");
    if (R < dmax - geom_tol) throw Error("sandwich: domain is not inside B_R(x0)");

    const double M = u.max_value();
    SandwichReport rep;
    rep.slack = slack;
    rep.passed = true;
    for (int v = 0; v < (int)m.vertices.size(); ++v) {
        const double d = dist(m.vertices[v], x0);
        const double drop = M - u.values[v];
        const double lower = (M / std::pow(R, alpha)) * std::pow(d, alpha);
        const double upper = (M / std::pow(r, alpha)) * std::pow(d, alpha);
        const double viol = std::max(lower - drop, drop - upper);
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.worst_node = v;
        }
        if (viol > slack) rep.passed = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// find_extremal: sweep + Nelder-Mead refinement
// ---------------------------------------------------------------------------

namespace {

struct LandscapeEval {
    const DomainSpec& spec;
    const SolverConfig& config;
    double h;
    std::vector<std::vector<Vec2>> loops;
    std::map<std::pair<long long, long long>, PoleSweepEntry> cache;

    static std::pair<long long, long long> key(const Vec2& y) {
        return {(long long)std::llround(y.x * 1e12), (long long)std::llround(y.y * 1e12)};
    }

    const PoleSweepEntry& eval(const Vec2& y) {
        const auto k = key(y);
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
        PoleSweepEntry e;
        e.pole = y;
        if (!contains(spec, y) || !loops_contain(loops, y) ||
            loops_distance(loops, y) < 2.0 * h) {
            e.ok = false;
            e.error = "infeasible pole";
            e.lambda = std::numeric_limits<double>::infinity();
        } else {
            e = solve_at_pole(spec, config, h, y);
            if (!e.ok) e.lambda = std::numeric_limits<double>::infinity();
        }
        return cache.emplace(k, std::move(e)).first->second;
    }
};

}  // namespace

ExtremalSolution find_extremal(const DomainSpec& spec, const SolverConfig& config,
                               const FindOptions& opts) {
    config.validate();
    if (!(opts.h > 0)) throw ConfigError("find_extremal: need h > 0");
    SweepOptions sw;
    sw.h = opts.sweep_h > 0 ? opts.sweep_h : opts.h;
    sw.g = opts.sweep_g > 0 ? opts.sweep_g : 4.0 * opts.h;
    sw.jobs = opts.jobs;
    sw.fundamental_domain_only = opts.fundamental_domain_only;

    PoleSweepResult sweep = pole_sweep(spec, config, sw);
    if (sweep.argmin < 0)
        throw Error("find_extremal: every sweep pole failed to converge");

    LandscapeEval land{spec, config, opts.h, boundary_loops(spec, opts.h), {}};

    const double tol = opts.pole_tol > 0 ? opts.pole_tol : opts.h / 4.0;
    Vec2 best_y = sweep.best().pole;

    auto feasible = [&](const Vec2& y) {
        return contains(spec, y) && loops_contain(land.loops, y) &&
               loops_distance(land.loops, y) >= 2.0 * opts.h;
    };
    // initial simplex: prefer feasible offsets, shrinking if cornered
    double step = 0.5 * sweep.g;
    Vec2 d1{step, 0}, d2{0, step};
    for (int tries = 0; tries < 6; ++tries) {
        if (!feasible(best_y + d1)) d1 = -1.0 * d1;
        if (!feasible(best_y + d2)) d2 = -1.0 * d2;
        if (feasible(best_y + d1) && feasible(best_y + d2)) break;
        step *= 0.5;
        d1 = {step, 0};
        d2 = {0, step};
    }

    // Nelder-Mead on y -> lambda(y)
    struct SP { Vec2 y; double f; };
    auto F = [&](const Vec2& y) { return land.eval(y).lambda; };
    std::array<SP, 3> s{SP{best_y, F(best_y)},
                        SP{best_y + d1, 0},
                        SP{best_y + d2, 0}};
    s[1].f = F(s[1].y);
    s[2].f = F(s[2].y);
    int evals = 3;
    while (evals < opts.max_refine_evals) {
        std::sort(s.begin(), s.end(), [](const SP& a, const SP& b) { return a.f < b.f; });
        const double diam = std::max(dist(s[0].y, s[1].y),
                                     std::max(dist(s[0].y, s[2].y), dist(s[1].y, s[2].y)));
        if (diam < tol) break;
        const Vec2 centroid = (s[0].y + s[1].y) * 0.5;
        const Vec2 xr = centroid + (centroid - s[2].y);
        const double fr = F(xr); ++evals;
        if (fr < s[0].f) {
            const Vec2 xe = centroid + (centroid - s[2].y) * 2.0;
            const double fe = F(xe); ++evals;
            s[2] = fe < fr ? SP{xe, fe} : SP{xr, fr};
        } else if (fr < s[1].f) {
            s[2] = {xr, fr};
        } else {
            const Vec2 xc = centroid + (s[2].y - centroid) * 0.5;
            const double fc = F(xc); ++evals;
            if (fc < s[2].f) {
                s[2] = {xc, fc};
            } else {
                // shrink toward the best vertex
                s[1].y = s[0].y + (s[1].y - s[0].y) * 0.5;
                s[2].y = s[0].y + (s[2].y - s[0].y) * 0.5;
                s[1].f = F(s[1].y); ++evals;
                s[2].f = F(s[2].y); ++evals;
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const SP& a, const SP& b) { return a.f < b.f; });
    best_y = s[0].y;

    const PoleSweepEntry& final_entry = land.eval(best_y);
    if (!final_entry.ok) throw Error("find_extremal: refined pole solve failed");

    // rebuild the solution at the final pole
    auto mesh = std::make_shared<const Mesh>(triangulate(spec, opts.h, best_y));
    auto sol = solve_potential(mesh, config);

    ExtremalSolution out;
    out.mesh = mesh;
    out.u = std::move(sol.w);
    out.x0 = best_y;
    out.lambda_p = sol.lambda;
    const double umax = out.u.max_value();
    out.rayleigh = sol.lambda / std::pow(umax, config.p);
    out.report = sol.report;
    out.sweep = std::move(sweep);
    try {
        out.fit = asymptotic_fit(out.u, out.x0, config.p);
    } catch (const InsufficientSamples&) {
        out.fit = {};
    }
    return out;
}

// ---------------------------------------------------------------------------
// uniqueness probe
// ---------------------------------------------------------------------------

UniquenessReport uniqueness_probe(const DomainSpec& spec, const SolverConfig& config,
                                  const FindOptions& opts) {
    auto sol = find_extremal(spec, config, opts);
    const Mesh& m = *sol.mesh;
    MeshLocator locator(m);

    UniquenessReport rep;
    rep.x0 = sol.x0;
    rep.lambda_p = sol.lambda_p;

    const auto ops = sample_symmetry_ops(spec);
    double asym = 0.0;
    for (const auto& op : ops) {
        double worst = 0.0;
        for (int v = 0; v < (int)m.vertices.size(); ++v) {
            const double resampled = locator.interpolate(sol.u.values, op.apply(m.vertices[v]));
            worst = std::max(worst, std::abs(resampled - sol.u.values[v]));
        }
        asym = std::max(asym, worst);
    }
    rep.max_field_asymmetry = asym;
    rep.symmetry_consistent = asym <= 2e-2;

    // orbit of x0 under the declared group
    const bool rotational = spec.has_symmetry(Symmetry::Rotation);
    if (rotational && norm(sol.x0) > m.h) {
        rep.orbit_size = 0;
        rep.count_estimate = "continuum (rotational orbit)";
    } else {
        std::vector<Vec2> orbit{sol.x0};
        auto add = [&](const Vec2& q) {
            for (const auto& o : orbit)
                if (dist(o, q) < 0.5 * m.h) return;
            orbit.push_back(q);
        };
        // close under reflections (and pi/2 rotations when declared)
        for (int pass = 0; pass < 3; ++pass) {
            std::vector<Vec2> cur = orbit;
            for (const auto& q : cur)
                for (const auto& op : ops) add(op.apply(q));
        }
        rep.orbit_size = (int)orbit.size();
        rep.count_estimate = std::to_string(orbit.size());

        // noise floor: lambda spread over the orbit
        if (orbit.size() > 1) {
            double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
            for (const auto& q : orbit) {
                const auto e = solve_at_pole(spec, config, opts.h, q);
                if (!e.ok) continue;
                lmin = std::min(lmin, e.lambda);
                lmax = std::max(lmax, e.lambda);
            }
            if (std::isfinite(lmin))
                rep.orbit_lambda_spread_rel = (lmax - lmin) / lmin;
        }
    }
    return rep;
}

}  // namespace morrey
