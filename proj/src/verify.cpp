#include "morrey/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "morrey/errors.hpp"
#include "morrey/extremal.hpp"
#include "morrey/shape_calculus.hpp"

namespace morrey {

namespace {

constexpr double kPi = std::numbers::pi;

struct Ctx {
    BatteryOptions opts;

    double tol(double t) const { return t * opts.slack_scale; }
    double floor_tol(double t) const {
        return opts.slack_scale > 0 ? t / opts.slack_scale
                                    : std::numeric_limits<double>::infinity();
    }

    SolverConfig solver(double p) const {
        SolverConfig c;
        c.p = p;
        return c;
    }

    // caches shared between checks in a single run
    std::map<std::string, PotentialSolution> potentials;
    std::map<std::string, ExtremalSolution> extremals;

    const PotentialSolution& disk_center(double p, double h) {
        std::ostringstream key;
        key << "disk:" << p << ':' << h;
        auto it = potentials.find(key.str());
        if (it != potentials.end()) return it->second;
        auto spec = DomainSpec::disk({0, 0}, 1.0);
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, h, Vec2{0, 0}));
        auto sol = solve_potential(mesh, solver(p));
        return potentials.emplace(key.str(), std::move(sol)).first->second;
    }

    const ExtremalSolution& square_extremal() {
        auto it = extremals.find("square");
        if (it != extremals.end()) return it->second;
        auto spec = DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
        FindOptions fo;
        fo.h = 0.05;
        fo.jobs = opts.jobs;
        fo.fundamental_domain_only = true;
        auto sol = find_extremal(spec, solver(4.0), fo);
        return extremals.emplace("square", std::move(sol)).first->second;
    }
};

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

bool require(bool cond, std::string& detail, const std::string& msg) {
    if (!cond) {
        if (!detail.empty()) detail += "; ";
        detail += "FAIL: " + msg;
    }
    return cond;
}

double max_symmetry_asymmetry(const DomainSpec& spec, const FieldFunction& u) {
    const Mesh& m = *u.mesh;
    MeshLocator locator(m);
    double asym = 0.0;
    for (const auto& op : sample_symmetry_ops(spec)) {
        for (int v = 0; v < (int)m.vertices.size(); ++v) {
            const double r = locator.interpolate(u.values, op.apply(m.vertices[v]));
            asym = std::max(asym, std::abs(r - u.values[v]));
        }
    }
    return asym;
}

// --------------------------------------------------------------------------
// criteria
// --------------------------------------------------------------------------

CheckResult check_ball_p3(Ctx& ctx) {
    CheckResult r{"ball-constant-p3", true, "", 0};
    const double exact = kPi / 2.0;
    const double hs[3] = {0.08, 0.04, 0.02};
    double errs[3];
    for (int i = 0; i < 3; ++i) {
        const auto& sol = ctx.disk_center(3.0, hs[i]);
        errs[i] = std::abs(sol.lambda - exact);
        r.passed &= require(sol.report.seconds <= 60.0, r.detail,
                            "solve at h=" + num(hs[i]) + " took " + num(sol.report.seconds) + "s");
    }
    r.passed &= require(errs[0] > errs[1] && errs[1] > errs[2], r.detail,
                        "error not monotone: " + num(errs[0]) + " -> " + num(errs[1]) + " -> " +
                            num(errs[2]));
    r.passed &= require(errs[2] <= ctx.tol(0.05) * exact, r.detail,
                        "lambda error " + num(errs[2] / exact * 100) + "% at h=0.02");
    r.detail += " lambda(h=0.02)=" + num(ctx.disk_center(3.0, 0.02).lambda) +
                " target=" + num(exact) + " errs=[" + num(errs[0]) + "," + num(errs[1]) + "," +
                num(errs[2]) + "]";
    return r;
}

CheckResult check_ball_p4(Ctx& ctx) {
    CheckResult r{"ball-constant-p4", true, "", 0};
    const double exact = 16.0 * kPi / 27.0;
    const auto& sol = ctx.disk_center(4.0, 0.02);
    r.passed &= require(std::abs(sol.lambda - exact) <= ctx.tol(0.05) * exact, r.detail,
                        "lambda " + num(sol.lambda) + " vs " + num(exact));
    const Mesh& m = *sol.w.mesh;
    double linf = 0.0;
    for (int v = 0; v < (int)m.vertices.size(); ++v) {
        const double ref = ball_extremal_value(2, 4.0, 1.0, 1.0, m.vertices[v], {0, 0});
        linf = std::max(linf, std::abs(sol.w.values[v] - ref));
    }
    r.passed &= require(linf <= ctx.tol(2e-2), r.detail, "Linf distance " + num(linf));
    r.detail += " lambda=" + num(sol.lambda) + " linf=" + num(linf);
    return r;
}

CheckResult check_green_duality(Ctx& ctx) {
    CheckResult r{"green-duality", true, "", 0};
    const double p = 3.0;
    auto spec = DomainSpec::disk({0, 0}, 1.0);
    SweepOptions sw;
    sw.h = 0.08;
    sw.g = 0.25;
    sw.jobs = ctx.opts.jobs;
    auto sweep = pole_sweep(spec, ctx.solver(p), sw);
    r.passed &= require(sweep.all_ok(), r.detail, "sweep had failed poles");
    // definitional duality: G(y,y) = lambda(y)^{-1/(p-1)}
    int argmaxG = -1;
    double maxG = -1.0;
    for (int i = 0; i < (int)sweep.entries.size(); ++i) {
        if (!sweep.entries[i].ok) continue;
        const double G = std::pow(sweep.entries[i].lambda, -1.0 / (p - 1.0));
        if (G > maxG) { maxG = G; argmaxG = i; }
    }
    r.passed &= require(argmaxG == sweep.argmin, r.detail, "argmax G != argmin lambda");
    const double viaMin = std::pow(sweep.min_lambda(), -1.0 / (p - 1.0));
    r.passed &= require(std::abs(maxG - viaMin) <= ctx.tol(1e-12), r.detail,
                        "duality identity off by " + num(std::abs(maxG - viaMin)));
    // direct Green solves agree with the lambda route to machine precision
    for (int pick = 0; pick < 2; ++pick) {
        const auto& e = sweep.entries[pick == 0 ? sweep.argmin : 0];
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, sw.h, e.pole));
        auto green = green_function(mesh, ctx.solver(p));
        const double viaLambda = std::pow(e.lambda, -1.0 / (p - 1.0));
        r.passed &= require(std::abs(green.diag - viaLambda) <= ctx.tol(1e-12), r.detail,
                            "direct Green mismatch " + num(std::abs(green.diag - viaLambda)));
    }
    // sharp value at the center
    const auto& center = ctx.disk_center(p, 0.02);
    const double Gc = std::pow(center.lambda, -1.0 / (p - 1.0));
    const double exact = std::pow(kPi / 2.0, -0.5);
    r.passed &= require(std::abs(Gc - exact) <= ctx.tol(0.03) * exact, r.detail,
                        "G(0,0) " + num(Gc) + " vs " + num(exact));
    r.detail += " G(0,0)=" + num(Gc) + " argmin pole=(" + num(sweep.best().pole.x) + "," +
                num(sweep.best().pole.y) + ")";
    return r;
}

CheckResult check_asymptotic_rate(Ctx& ctx) {
    CheckResult r{"asymptotic-rate", true, "", 0};
    struct Case {
        const char* name;
        double p;
        double alpha_ref;
        double coef_ref;
        AsymptoticFit fit;
    };
    const auto& d3 = ctx.disk_center(3.0, 0.02);
    const auto& d4 = ctx.disk_center(4.0, 0.02);
    const auto& sq = ctx.square_extremal();
    auto fit_of = [](const FieldFunction& u, const Vec2& x0, double p) {
        return asymptotic_fit(u, x0, p);
    };
    const double coef_sq =
        ((4.0 - 1.0) / (4.0 - 2.0)) * std::pow(sq.lambda_p / (2.0 * kPi), 1.0 / 3.0);
    Case cases[] = {
        {"disk p=3", 3.0, 0.5, 1.0, fit_of(d3.w, {0, 0}, 3.0)},
        {"disk p=4", 4.0, 2.0 / 3.0, 1.0, fit_of(d4.w, {0, 0}, 4.0)},
        {"square p=4", 4.0, 2.0 / 3.0, coef_sq, fit_of(sq.u, sq.x0, 4.0)},
    };
    for (const auto& c : cases) {
        r.passed &= require(std::abs(c.fit.exponent - c.alpha_ref) <= ctx.tol(0.05) * c.alpha_ref,
                            r.detail,
                            std::string(c.name) + " exponent " + num(c.fit.exponent) + " vs " +
                                num(c.alpha_ref));
        r.passed &= require(
            std::abs(c.fit.coefficient - c.coef_ref) <= ctx.tol(0.10) * c.coef_ref, r.detail,
            std::string(c.name) + " coefficient " + num(c.fit.coefficient) + " vs " +
                num(c.coef_ref));
        r.detail += std::string(" ") + c.name + ": alpha=" + num(c.fit.exponent) +
                    " c=" + num(c.fit.coefficient);
    }
    return r;
}

CheckResult check_holder_sandwich(Ctx& ctx) {
    CheckResult r{"holder-sandwich", true, "", 0};
    const auto& d3 = ctx.disk_center(3.0, 0.02);
    auto rep = holder_sandwich_check(d3.w, {0, 0}, 1.0, 1.0, 3.0, ctx.tol(2e-2));
    r.passed &= require(rep.passed, r.detail, "disk sandwich violation " + num(rep.worst_violation));

    const auto& sq = ctx.square_extremal();
    double rin = std::numeric_limits<double>::infinity(), rout = 0.0;
    const Mesh& m = *sq.mesh;
    for (int v = 0; v < (int)m.vertices.size(); ++v) {
        if (!m.boundary[v]) continue;
        const double d = dist(m.vertices[v], sq.x0);
        rin = std::min(rin, d);
        rout = std::max(rout, d);
    }
    auto rep2 = holder_sandwich_check(sq.u, sq.x0, rin, rout, 4.0, ctx.tol(2e-2));
    r.passed &=
        require(rep2.passed, r.detail, "square sandwich violation " + num(rep2.worst_violation));

    // negative control: one interior node forced to the max must be caught
    FieldFunction bad = d3.w;
    int corrupt = -1;
    for (int v = 0; v < (int)bad.mesh->vertices.size(); ++v) {
        if (bad.mesh->boundary[v]) continue;
        if (dist(bad.mesh->vertices[v], {0.5, 0.0}) < 0.05) { corrupt = v; break; }
    }
    bad.values[corrupt] = 1.0;
    auto rep3 = holder_sandwich_check(bad, {0, 0}, 1.0, 1.0, 3.0, ctx.tol(2e-2));
    r.passed &= require(!rep3.passed, r.detail, "corrupted field not detected");
    r.passed &= require(rep3.worst_node == corrupt, r.detail, "wrong node reported");
    r.detail += " disk worst=" + num(rep.worst_violation) +
                " square worst=" + num(rep2.worst_violation) + " control node=" +
                std::to_string(rep3.worst_node);
    return r;
}

CheckResult check_convex_symmetry(Ctx& ctx) {
    CheckResult r{"convex-symmetry", true, "", 0};
    // disk
    {
        auto spec = DomainSpec::disk({0, 0}, 1.0);
        FindOptions fo;
        fo.h = 0.05;
        fo.jobs = ctx.opts.jobs;
        fo.fundamental_domain_only = true;
        auto sol = find_extremal(spec, ctx.solver(3.0), fo);
        const double asym = max_symmetry_asymmetry(spec, sol.u);
        r.passed &= require(asym <= ctx.tol(2e-2), r.detail, "disk asymmetry " + num(asym));
        r.passed &= require(norm(sol.x0) <= fo.h, r.detail,
                            "disk x0 off center: |x0|=" + num(norm(sol.x0)));
        r.detail += " disk: asym=" + num(asym) + " |x0|=" + num(norm(sol.x0));
    }
    // square
    {
        auto spec = DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
        const auto& sol = ctx.square_extremal();
        const double asym = max_symmetry_asymmetry(spec, sol.u);
        r.passed &= require(asym <= ctx.tol(2e-2), r.detail, "square asymmetry " + num(asym));
        r.passed &= require(norm(sol.x0) <= 0.05, r.detail,
                            "square x0 off center: |x0|=" + num(norm(sol.x0)));
        r.detail += " square: asym=" + num(asym) + " |x0|=" + num(norm(sol.x0));
    }
    return r;
}

CheckResult check_annulus_orbit(Ctx& ctx) {
    CheckResult r{"annulus-orbit", true, "", 0};
    auto spec = DomainSpec::annulus(1.0, 2.0);
    SweepOptions sw;
    sw.h = 0.08;
    sw.g = 0.25;
    sw.jobs = ctx.opts.jobs;
    auto sweep = pole_sweep(spec, ctx.solver(3.0), sw);
    r.passed &= require(sweep.argmin >= 0, r.detail, "sweep produced no converged pole");
    const Vec2 y = sweep.best().pole;
    const double rho = norm(y);
    r.passed &= require(rho > 1.0 + 2.0 * sw.h && rho < 2.0 - 2.0 * sw.h, r.detail,
                        "argmin radius " + num(rho) + " not strictly interior");
    // lambda along the rotational orbit of the argmin
    double lmin = sweep.best().lambda, lmax = sweep.best().lambda;
    for (int k = 1; k < 8; ++k) {
        const Vec2 yk = rotate(y, kPi * k / 4.0);
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, sw.h, yk));
        auto sol = solve_potential(mesh, ctx.solver(3.0));
        lmin = std::min(lmin, sol.lambda);
        lmax = std::max(lmax, sol.lambda);
    }
    const double spread = (lmax - lmin) / lmin;
    r.passed &= require(spread <= ctx.tol(1e-3), r.detail, "orbit spread " + num(spread));
    r.detail += " rho*=" + num(rho) + " lambda*=" + num(sweep.min_lambda()) +
                " orbit spread=" + num(spread);
    return r;
}

CheckResult check_bowtie(Ctx& ctx) {
    CheckResult r{"bowtie-bifurcation", true, "", 0};
    auto run_eps = [&](double eps, double g) {
        auto spec = DomainSpec::bowtie(eps);
        SweepOptions sw;
        sw.h = eps / 3.0;
        sw.g = g;
        sw.jobs = ctx.opts.jobs;
        sw.fundamental_domain_only = true;
        return std::make_pair(pole_sweep(spec, ctx.solver(3.0), sw), sw);
    };

    // small eps: symmetry breaking
    {
        const double eps = 0.05;
        auto [sweep, sw] = run_eps(eps, 0.1);
        r.passed &= require(sweep.argmin >= 0, r.detail, "eps=0.05 sweep failed");
        const Vec2 y = sweep.best().pole;
        // lambda at the origin pole
        double l00 = std::numeric_limits<double>::quiet_NaN();
        for (const auto& e : sweep.entries)
            if (e.ok && std::abs(e.pole.x) < 1e-12 && std::abs(e.pole.y) < 1e-12) l00 = e.lambda;
        r.passed &= require(std::isfinite(l00), r.detail, "origin pole missing from sweep");
        // orbit noise floor from the reflection copies of the argmin
        auto spec = DomainSpec::bowtie(eps);
        double lmin = sweep.best().lambda, lmax = sweep.best().lambda;
        for (const Vec2 q : {Vec2{-y.x, y.y}, Vec2{y.x, -y.y}, Vec2{-y.x, -y.y}}) {
            if (dist(q, y) < 1e-12) continue;
            auto mesh = std::make_shared<const Mesh>(triangulate(spec, sw.h, q));
            auto sol = solve_potential(mesh, ctx.solver(3.0));
            lmin = std::min(lmin, sol.lambda);
            lmax = std::max(lmax, sol.lambda);
        }
        const double floor_abs = std::max(lmax - lmin, 1e-12);
        const double gap = l00 - sweep.min_lambda();
        r.passed &= require(gap > ctx.floor_tol(5.0) * floor_abs, r.detail,
                            "gap " + num(gap) + " below 5x noise floor " + num(floor_abs));
        r.passed &= require(norm(y) > 2.0 * sw.g, r.detail,
                            "argmin not clearly off origin: |y|=" + num(norm(y)));
        r.passed &= require(std::abs(y.y) < sw.g, r.detail,
                            "argmin off the x1 axis: y2=" + num(y.y));
        r.detail += " eps=0.05: argmin=(" + num(y.x) + "," + num(y.y) + ") gap=" + num(gap) +
                    " floor=" + num(floor_abs);
    }

    // large eps: the criterion pins the maximizer at the origin for eps=0.5.
    // A landscape-resolving sweep (g = 0.1) shows a genuine split basin at
    // (+-0.3, 0) for eps=0.5 at every tested resolution; the check states the
    // measured argmin either way.
    {
        auto [sweep, sw] = run_eps(0.5, 0.1);
        r.passed &= require(sweep.argmin >= 0, r.detail, "eps=0.5 sweep failed");
        const Vec2 y = sweep.best().pole;
        r.passed &= require(std::abs(y.x) < 1e-12 && std::abs(y.y) < 1e-12, r.detail,
                            "eps=0.5 argmin not at the origin node: (" + num(y.x) + "," +
                                num(y.y) + ")");
        r.detail += " eps=0.5: argmin=(" + num(y.x) + "," + num(y.y) + ")";
    }

    // crossover scan, recorded but not asserted (the theory fixes no epsilon)
    {
        std::string scan = " scan:";
        double last_broken = 0.05, first_pinned = 10.0;
        for (double eps : {0.1, 0.2, 0.3, 0.5, 1.0}) {
            auto [sweep, sw] = run_eps(eps, eps >= 0.5 ? 0.1 : std::max(0.1, 4.0 * eps / 3.0));
            if (sweep.argmin < 0) continue;
            const Vec2 y = sweep.best().pole;
            const bool at_origin = norm(y) < 0.5 * sw.g;
            if (at_origin) first_pinned = std::min(first_pinned, eps);
            else last_broken = std::max(last_broken, eps);
            scan += " eps=" + num(eps) + (at_origin ? ":origin" : ":split");
        }
        r.detail += scan + " crossover in (" + num(last_broken) + "," + num(first_pinned) + "]";
    }
    return r;
}

CheckResult check_minkowski(Ctx& ctx) {
    CheckResult r{"minkowski-levelset", true, "", 0};
    const int levels = 64;
    int checked = 0;
    for (std::uint32_t seed = 1; seed <= 50 && r.passed; ++seed) {
        const GridFunction u0 = make_random_quasiconcave_grid(seed * 2, 9, 9);
        const GridFunction u1 = make_random_quasiconcave_grid(seed * 2 + 1, 9, 9);
        for (double rho : {0.25, 0.5}) {
            GridFunction comb;
            try {
                comb = minkowski_combination(u0, u1, rho, levels);
            } catch (const NotQuasiconcave&) {
                continue;  // generator degeneracies are skipped, not asserted
            }
            // brute-force sup-min over all exact lattice pairs
            const long qq = rho == 0.25 ? 4 : 2;
            const long aa = 1;
            GridFunction brute = u0;
            std::fill(brute.values.begin(), brute.values.end(), 0.0);
            for (int y0 = 0; y0 < 9; ++y0)
                for (int x0 = 0; x0 < 9; ++x0) {
                    if (u0.at(x0, y0) <= 0) continue;
                    for (int y1 = 0; y1 < 9; ++y1)
                        for (int x1 = 0; x1 < 9; ++x1) {
                            if (u1.at(x1, y1) <= 0) continue;
                            const long sx = (qq - aa) * x0 + aa * x1;
                            const long sy = (qq - aa) * y0 + aa * y1;
                            if (sx % qq || sy % qq) continue;
                            const double v = std::min(u0.at(x0, y0), u1.at(x1, y1));
                            double& cell = brute.at((int)(sx / qq), (int)(sy / qq));
                            cell = std::max(cell, v);
                        }
                }
            // cell-exact level masks at every ladder level
            for (int j = 0; j < levels && r.passed; ++j) {
                const double t = (double)j / levels;
                const PixelMask a = superlevel_mask(comb, t);
                const PixelMask b = superlevel_mask(brute, t);
                r.passed &= require(a.cells == b.cells, r.detail,
                                    "level mask mismatch at seed " + std::to_string(seed) +
                                        " rho=" + num(rho) + " t=" + num(t));
            }
            // support additivity within 2 cells
            const SupportProfile h0 = support_profile(u0, 16, 8);
            const SupportProfile h1 = support_profile(u1, 16, 8);
            const SupportProfile hc = support_profile(comb, 16, 8);
            for (int k = 0; k < 16 && r.passed; ++k)
                for (int j = 0; j < 8 && r.passed; ++j) {
                    const double sum = (1.0 - rho) * h0.at(k, j) + rho * h1.at(k, j);
                    const double got = hc.at(k, j);
                    if (!std::isfinite(sum) || !std::isfinite(got)) continue;
                    r.passed &= require(std::abs(got - sum) <= ctx.tol(2.0) * u0.cell, r.detail,
                                        "support additivity off by " + num(std::abs(got - sum)) +
                                            " cells at seed " + std::to_string(seed));
                }
            ++checked;
        }
    }
    r.passed &= require(checked >= 100, r.detail,
                        "only " + std::to_string(checked) + " (pair,rho) cases were checkable");
    r.detail += " (pair,rho) cases checked=" + std::to_string(checked);
    return r;
}

CheckResult check_radial_ode(Ctx& ctx) {
    CheckResult r{"radial-ode", true, "", 0};
    double worst = 0.0;
    for (double p : {3.5, 4.0, 4.5, 5.0, 6.0})
        for (int n : {1, 2, 3})
            for (int it = 1; it <= 9; ++it) {
                const double t = it / 10.0;
                const double res = std::abs(radial_support_ode_residual(p, n, t, 1.0));
                worst = std::max(worst, res);
            }
    r.passed &= require(worst < ctx.tol(1e-12), r.detail, "max residual " + num(worst));
    const double beta = (3.0 - 1.0) / (3.0 - 2.0);
    const double control =
        std::abs(radial_support_ode_residual_with_exponent(3.0, 2, 0.5, 1.0, beta + 0.1));
    r.passed &= require(control > ctx.floor_tol(1e-2), r.detail,
                        "perturbed-exponent control too small: " + num(control));
    r.detail += " max residual=" + num(worst) + " control=" + num(control);
    return r;
}

CheckResult check_steiner(Ctx& ctx) {
    CheckResult r{"steiner-suite", true, "", 0};
    std::mt19937 rng(7u);

    // equimeasurability + idempotence + sup preservation on random fields
    for (int trial = 0; trial < 10 && r.passed; ++trial) {
        GridFunction u = make_random_quasiconcave_grid(100 + trial, 24, 24);
        // also exercise non-quasiconcave inputs: rearrangement is defined for any u >= 0
        if (trial % 3 == 2) {
            std::uniform_real_distribution<double> d(0.0, 1.0);
            for (auto& v : u.values) v = d(rng);
        }
        const GridFunction s1 = steiner_rearrange(u, Axis::X1);
        // per-column multisets preserved exactly
        for (int i = 0; i < u.nx && r.passed; ++i) {
            std::vector<double> a, b;
            for (int j = 0; j < u.ny; ++j) {
                a.push_back(u.at(i, j));
                b.push_back(s1.at(i, j));
            }
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            r.passed &= require(a == b, r.detail, "column multiset changed");
        }
        const GridFunction s2 = steiner_rearrange(s1, Axis::X1);
        r.passed &= require(s1.values == s2.values, r.detail, "rearrangement not idempotent");
        r.passed &= require(s1.max_value() == u.max_value(), r.detail, "sup not preserved");
        // equimeasurability of ladder superlevel sets per column
        for (int lj = 1; lj < 8 && r.passed; ++lj) {
            const double t = lj / 8.0;
            for (int i = 0; i < u.nx && r.passed; ++i) {
                int ca = 0, cb = 0;
                for (int j = 0; j < u.ny; ++j) {
                    ca += u.at(i, j) > t ? 1 : 0;
                    cb += s1.at(i, j) > t ? 1 : 0;
                }
                r.passed &= require(ca == cb, r.detail, "superlevel column count changed");
            }
        }
    }

    // Polya-Szego non-increase on 50 random quasiconcave fields
    int worst_trial = -1;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 50 && r.passed; ++trial) {
        const GridFunction u = make_random_quasiconcave_grid(500 + trial, 48, 48);
        const double p = (trial % 2) ? 4.0 : 3.0;
        const Axis axis = (trial % 4 < 2) ? Axis::X1 : Axis::X2;
        const auto res = polya_szego_check(u, p, axis, ctx.tol(0.01));
        const double ratio = res.energy_after / res.energy_before;
        if (ratio > worst_ratio) { worst_ratio = ratio; worst_trial = trial; }
        r.passed &= require(res.passed, r.detail,
                            "energy increased at trial " + std::to_string(trial) + ": " +
                                num(res.energy_before) + " -> " + num(res.energy_after));
    }
    r.detail += " worst energy ratio=" + num(worst_ratio) + " (trial " +
                std::to_string(worst_trial) + ")";

    // symmetric domains: maximizer at the origin
    struct DomainCase {
        const char* name;
        DomainSpec spec;
        double h;
    };
    const DomainCase cases[] = {
        {"cross",
         DomainSpec::rect_union({{{-3, -1}, {3, 1}}, {{-1, -3}, {1, 3}}}), 0.1},
        {"starfish",
         DomainSpec::polygon({{0.5, 0}, {1.0 / 3, 1.0 / 3}, {0, 0.5}, {-1.0 / 3, 1.0 / 3},
                              {-0.5, 0}, {-1.0 / 3, -1.0 / 3}, {0, -0.5}, {1.0 / 3, -1.0 / 3}}),
         0.02},
        {"polar-curve",
         DomainSpec::polar_curve(10.0, {0, 0, 0, 0, 0, 0, 0, 0.65}), 0.3},
    };
    for (const auto& c : cases) {
        FindOptions fo;
        fo.h = c.h;
        fo.jobs = ctx.opts.jobs;
        fo.fundamental_domain_only = true;
        const auto rep = steiner_argmax_check(c.spec, ctx.solver(3.0), fo);
        r.passed &= require(rep.steiner_symmetric, r.detail,
                            std::string(c.name) + " is not a Steiner fixed point");
        r.passed &= require(rep.passed, r.detail,
                            std::string(c.name) + " maximizer off origin: |x0|=" +
                                num(norm(rep.x0)));
        r.detail += std::string(" ") + c.name + ": |x0|=" + num(norm(rep.x0)) +
                    " lambda=" + num(rep.lambda_p);
    }
    return r;
}

CheckResult check_whole_space(Ctx& ctx) {
    CheckResult r{"whole-space-constant", true, "", 0};
    // r-independence of the derivation oracle
    for (auto [n, p] : {std::pair{2, 4.0}, {2, 3.0}, {3, 4.0}}) {
        const double ref = whole_space_constant(n, p);
        for (double rad : {0.5, 1.0, 2.0}) {
            const double vol = unit_ball_volume(n) * std::pow(rad, n);
            const double oracle =
                1.0 / (ball_lambda(n, p, rad) * std::pow(vol, p / n - 1.0));
            r.passed &= require(std::abs(oracle - ref) <= ctx.tol(1e-12) * ref, r.detail,
                                "r-dependence at n=" + std::to_string(n) + " p=" + num(p) +
                                    " r=" + num(rad));
        }
    }
    r.passed &= require(std::abs(whole_space_constant(2, 4) - 27.0 / (16.0 * kPi * kPi)) <
                            ctx.tol(1e-12),
                        r.detail, "closed form mismatch at (2,4)");

    // equality case of the whole-space inequality for the ball extremal
    struct Triple { int n; double p, rad, a; };
    for (const Triple c : {Triple{2, 3.0, 1.0, 1.0}, {2, 4.0, 0.7, 2.0}, {3, 5.0, 1.3, 0.5}}) {
        const double alpha = holder_exponent(c.n, c.p);
        const double supnorm = c.a * std::pow(c.rad, alpha);
        const double grad_int = std::pow(c.a, c.p) * std::pow(alpha, c.p - 1.0) * c.n *
                                unit_ball_volume(c.n) * std::pow(c.rad, alpha);
        const double vol = unit_ball_volume(c.n) * std::pow(c.rad, c.n);
        const double rhs = whole_space_constant(c.n, c.p) *
                           std::pow(vol, c.p / c.n - 1.0) * grad_int;
        const double ratio = std::pow(supnorm, c.p) / rhs;
        r.passed &= require(std::abs(ratio - 1.0) <= ctx.tol(1e-12), r.detail,
                            "equality case ratio " + num(ratio));
    }

    // quadrature cross-check of the closed-form gradient integral (n=2, p=3)
    {
        const int n = 2;
        const double p = 3.0, rad = 1.0, a = 1.0;
        const double alpha = holder_exponent(n, p);
        // substitute s = q^{p-1}: the integrand becomes polynomial in q
        const double m = p - 1.0;
        auto integrand = [&](double qv) {
            const double s = std::pow(qv, m);
            const double du = a * alpha * std::pow(s, alpha - 1.0);
            return std::pow(du, p) * n * unit_ball_volume(n) * std::pow(s, n - 1.0) * m *
                   std::pow(qv, m - 1.0);
        };
        const int N = 2000;
        const double q_lo = 1e-10;  // the substituted integrand is finite but 0^negative traps
        const double dq = (std::pow(rad, 1.0 / m) - q_lo) / N;
        double sum = 0.0;
        for (int i = 0; i < N; ++i) {
            const double q0 = q_lo + i * dq, q1 = q_lo + (i + 1) * dq;
            sum += dq / 6.0 * (integrand(q0) + 4.0 * integrand(0.5 * (q0 + q1)) + integrand(q1));
        }
        const double closed = std::pow(a, p) * std::pow(alpha, p - 1.0) * n *
                              unit_ball_volume(n) * std::pow(rad, alpha);
        r.passed &= require(std::abs(sum - closed) <= ctx.tol(1e-9) * closed, r.detail,
                            "quadrature " + num(sum) + " vs closed form " + num(closed));
        r.detail += " grad-integral quadrature rel err=" + num(std::abs(sum - closed) / closed);
    }
    r.detail += " C(2,4)=" + num(whole_space_constant(2, 4));
    return r;
}

CheckResult check_hygiene(Ctx& ctx) {
    CheckResult r{"numerics-hygiene", true, "", 0};
    auto spec = DomainSpec::disk({0, 0}, 1.0);

    // gradient vs central finite differences on a small seeded mesh
    {
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, 0.42));
        std::mt19937 rng(42u);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        std::vector<double> u(mesh->vertices.size());
        for (auto& v : u) v = d(rng);
        const double p = 3.5, eps = 1e-6;
        const auto grad = energy_gradient(*mesh, u, p, eps);
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        double worst = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double step = 1e-6 * std::max(1.0, std::abs(u[i]));
            std::vector<double> up = u, um = u;
            up[i] += step;
            um[i] -= step;
            const double fd = (p_energy_regularized(*mesh, up, p, eps) - p_energy_regularized(*mesh, um, p, eps)) /
                              (2.0 * step);
            worst = std::max(worst, std::abs(grad[i] - fd) / std::max(std::abs(fd), 1e-8 * gmax));
        }
        r.passed &= require(worst < ctx.tol(1e-5), r.detail,
                            "gradient FD deviation " + num(worst));
        r.detail += " nodes=" + std::to_string(mesh->vertices.size()) + " fd dev=" + num(worst);
    }

    // bounds of a converged potential
    {
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, 0.1, Vec2{0, 0}));
        auto sol = solve_potential(mesh, ctx.solver(3.0));
        const double lo = sol.w.min_value(), hi = sol.w.max_value();
        r.passed &= require(lo >= -ctx.tol(1e-10) && hi <= 1.0 + ctx.tol(1e-10), r.detail,
                            "bounds [" + num(lo) + "," + num(hi) + "]");
        r.detail += " bounds=[" + num(lo) + "," + num(hi) + "]";
    }

    // bit-identical reproduction
    {
        auto once = [&]() {
            auto mesh = std::make_shared<const Mesh>(triangulate(spec, 0.1, Vec2{0.2, 0}));
            return solve_potential(mesh, ctx.solver(3.0));
        };
        const auto a = once();
        const auto b = once();
        r.passed &= require(a.lambda == b.lambda, r.detail, "lambda differs between reruns");
        r.passed &= require(a.w.values.size() == b.w.values.size() &&
                                std::memcmp(a.w.values.data(), b.w.values.data(),
                                            a.w.values.size() * sizeof(double)) == 0,
                            r.detail, "nodal values differ between reruns");
    }
    {
        SweepOptions sw;
        sw.h = 0.1;
        sw.g = 0.35;
        sw.jobs = 1;
        auto s1 = pole_sweep(spec, ctx.solver(3.0), sw);
        sw.jobs = 2;
        auto s2 = pole_sweep(spec, ctx.solver(3.0), sw);
        bool same = s1.entries.size() == s2.entries.size() && s1.argmin == s2.argmin;
        for (std::size_t i = 0; same && i < s1.entries.size(); ++i)
            same = s1.entries[i].lambda == s2.entries[i].lambda &&
                   s1.entries[i].pole == s2.entries[i].pole;
        r.passed &= require(same, r.detail, "sweep results depend on the job count");
    }
    return r;
}

}  // namespace

std::vector<std::string> battery_check_names() {
    return {"ball-constant-p3", "ball-constant-p4", "green-duality", "asymptotic-rate",
            "holder-sandwich", "convex-symmetry", "annulus-orbit", "bowtie-bifurcation",
            "minkowski-levelset", "radial-ode", "steiner-suite", "whole-space-constant",
            "numerics-hygiene"};
}

std::vector<CheckResult> run_battery(const BatteryOptions& opts) {
    Ctx ctx{opts, {}, {}};
    using Fn = CheckResult (*)(Ctx&);
    const std::vector<std::pair<std::string, Fn>> checks = {
        {"ball-constant-p3", check_ball_p3},
        {"ball-constant-p4", check_ball_p4},
        {"green-duality", check_green_duality},
        {"asymptotic-rate", check_asymptotic_rate},
        {"holder-sandwich", check_holder_sandwich},
        {"convex-symmetry", check_convex_symmetry},
        {"annulus-orbit", check_annulus_orbit},
        {"bowtie-bifurcation", check_bowtie},
        {"minkowski-levelset", check_minkowski},
        {"radial-ode", check_radial_ode},
        {"steiner-suite", check_steiner},
        {"whole-space-constant", check_whole_space},
        {"numerics-hygiene", check_hygiene},
    };
    std::vector<CheckResult> out;
    for (const auto& [name, fn] : checks) {
        if (!opts.only.empty() &&
            std::find(opts.only.begin(), opts.only.end(), name) == opts.only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult res;
        try {
            res = fn(ctx);
        } catch (const std::exception& e) {
            res.name = name;
            res.passed = false;
            res.detail = std::string("exception: ") + e.what();
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace morrey
