#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <numbers>

#include "morrey/errors.hpp"
#include "morrey/extremal.hpp"

using namespace morrey;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ball_lambda closed forms") {
    CHECK(ball_lambda(2, 3.0, 1.0) == doctest::Approx(kPi / 2.0).epsilon(1e-14));
    CHECK(ball_lambda(2, 4.0, 1.0) == doctest::Approx(16.0 * kPi / 27.0).epsilon(1e-14));
    CHECK(ball_lambda(3, 4.0, 1.0) == doctest::Approx(4.0 * kPi / 27.0).epsilon(1e-14));
    CHECK(ball_lambda(2, 3.0, 1.0) == doctest::Approx(1.570796).epsilon(1e-6));
    CHECK(ball_lambda(2, 4.0, 1.0) == doctest::Approx(1.861684).epsilon(1e-6));
    CHECK(ball_lambda(3, 4.0, 1.0) == doctest::Approx(0.465421).epsilon(1e-5));

    // scaling in r
    for (auto [n, p] : {std::pair{2, 3.0}, {2, 4.5}, {3, 5.0}}) {
        const double ratio = ball_lambda(n, p, 2.0) / ball_lambda(n, p, 1.0);
        CHECK(ratio == doctest::Approx(std::pow(2.0, n - p)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ball_lambda(2, 2.0, 1.0), InvalidRegime);
    CHECK_THROWS_AS(ball_lambda(3, 2.5, 1.0), InvalidRegime);
    CHECK_THROWS_AS(ball_lambda(2, 3.0, 0.0), InvalidRegime);
}

TEST_CASE("ball extremal values") {
    CHECK(ball_extremal_value(2, 4.0, 1.0, 1.0, {0.5, 0.0}, {0, 0}) ==
          doctest::Approx(1.0 - std::pow(0.5, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(ball_extremal_value(2, 4.0, 1.0, 1.0, {0.5, 0.0}, {0, 0}) ==
          doctest::Approx(0.370039).epsilon(1e-5));
    CHECK(ball_extremal_value(2, 3.0, 1.0, 1.0, {0.25, 0.0}, {0, 0}) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ball_extremal_value(2, 3.0, 1.0, 1.0, {1.0, 0.0}, {0, 0}) == 0.0);
    CHECK(ball_extremal_value(2, 3.0, 1.0, 1.0, {2.0, 0.0}, {0, 0}) == 0.0);
}

TEST_CASE("whole-space constant") {
    CHECK(whole_space_constant(2, 4.0) == doctest::Approx(27.0 / (16.0 * kPi * kPi)).epsilon(1e-14));
    CHECK(whole_space_constant(2, 4.0) == doctest::Approx(0.170972).epsilon(1e-5));
    // r-independence oracle
    for (double r : {0.5, 1.0, 3.0}) {
        const double vol = unit_ball_volume(2) * r * r;
        const double oracle = 1.0 / (ball_lambda(2, 4.0, r) * std::pow(vol, 1.0));
        CHECK(oracle == doctest::Approx(whole_space_constant(2, 4.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(whole_space_constant(2, 1.5), InvalidRegime);
}

TEST_CASE("asymptotic fit recovers the exact cusp") {
    const auto mesh = std::make_shared<const Mesh>(
        triangulate(DomainSpec::disk({0, 0}, 1.0), 0.04, Vec2{0, 0}));
    FieldFunction u;
    u.mesh = mesh;
    u.values.resize(mesh->vertices.size());
    for (std::size_t v = 0; v < u.values.size(); ++v)
        u.values[v] = 1.0 - std::sqrt(norm(mesh->vertices[v]));
    const auto fit = asymptotic_fit(u, {0, 0}, 3.0);
    CHECK(std::abs(fit.exponent - 0.5) <= 1e-3);
    CHECK(std::abs(fit.coefficient - 1.0) <= 1e-3);
    CHECK(fit.samples >= 8);
}

TEST_CASE("asymptotic fit needs samples") {
    Mesh tiny;
    tiny.vertices = {{0, 0}, {1, 0}, {0, 1}};
    tiny.triangles = {{0, 1, 2}};
    tiny.boundary = {0, 1, 1};
    tiny.pole_vertex = 0;
    tiny.h = 1.0;
    FieldFunction u;
    u.mesh = std::make_shared<const Mesh>(tiny);
    u.values = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(asymptotic_fit(u, {0, 0}, 3.0), InsufficientSamples);
}

TEST_CASE("holder sandwich on the exact ball extremal") {
    const auto mesh = std::make_shared<const Mesh>(
        triangulate(DomainSpec::disk({0, 0}, 1.0), 0.05, Vec2{0, 0}));
    FieldFunction u;
    u.mesh = mesh;
    u.values.resize(mesh->vertices.size());
    for (std::size_t v = 0; v < u.values.size(); ++v)
        u.values[v] = 1.0 - std::sqrt(norm(mesh->vertices[v]));
    const auto rep = holder_sandwich_check(u, {0, 0}, 1.0, 1.0, 3.0, 1e-9);
    CHECK(rep.passed);  // equality case, any slack suffices

    // corrupted interior node is caught and reported
    FieldFunction bad = u;
    int node = -1;
    for (std::size_t v = 0; v < bad.values.size(); ++v)
        if (!mesh->boundary[v] && norm(mesh->vertices[v]) > 0.4) { node = (int)v; break; }
    bad.values[node] = 1.0;
    const auto rep2 = holder_sandwich_check(bad, {0, 0}, 1.0, 1.0, 3.0, 2e-2);
    CHECK_FALSE(rep2.passed);
    CHECK(rep2.worst_node == node);

    // impossible enclosing radii are rejected
    CHECK_THROWS_AS(holder_sandwich_check(u, {0, 0}, 1.5, 2.0, 3.0, 1e-2), Error);
    CHECK_THROWS_AS(holder_sandwich_check(u, {0, 0}, 0.5, 0.9, 3.0, 1e-2), Error);
}

TEST_CASE("pole sweep on a small disk") {
    SolverConfig cfg;
    cfg.p = 3.0;
    SweepOptions sw;
    sw.h = 0.1;
    sw.g = 0.3;
    sw.jobs = 2;
    const auto sweep = pole_sweep(DomainSpec::disk({0, 0}, 1.0), cfg, sw);
    REQUIRE(sweep.argmin >= 0);
    CHECK(sweep.all_ok());
    CHECK(norm(sweep.best().pole) < 1e-12);  // node nearest the center

    // lambda(y) is a function of |y| on symmetry orbits
    std::map<long, std::pair<double, double>> by_radius;
    for (const auto& e : sweep.entries) {
        const long key = (long)std::llround(norm2(e.pole) * 1e9);
        auto it = by_radius.find(key);
        if (it == by_radius.end()) by_radius[key] = {e.lambda, e.lambda};
        else {
            it->second.first = std::min(it->second.first, e.lambda);
            it->second.second = std::max(it->second.second, e.lambda);
        }
    }
    for (const auto& [key, mm] : by_radius)
        CHECK((mm.second - mm.first) / mm.first <= 1e-3);

    // argmin does not depend on the initial-iterate amplitude (homogeneity):
    // warm starts scaled by 3 land on the same minimizer energy
    auto mesh = std::make_shared<const Mesh>(
        triangulate(DomainSpec::disk({0, 0}, 1.0), sw.h, sweep.best().pole));
    auto base = solve_potential(mesh, cfg);
    auto scaled = base.w.values;
    for (auto& v : scaled) v *= 3.0;
    auto re = solve_potential(mesh, cfg, &scaled);
    CHECK(re.lambda == doctest::Approx(base.lambda).epsilon(1e-9));
}

TEST_CASE("find_extremal on the square brackets the ball constants") {
    SolverConfig cfg;
    cfg.p = 4.0;
    FindOptions fo;
    fo.h = 0.1;
    fo.jobs = 2;
    fo.fundamental_domain_only = true;
    const auto spec = DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
    const auto sol = find_extremal(spec, cfg, fo);
    CHECK(norm(sol.x0) <= fo.h);
    // domain monotonicity of the infimum: B_1 inside the square inside B_sqrt2
    CHECK(sol.lambda_p <= ball_lambda(2, 4.0, 1.0));
    CHECK(sol.lambda_p >= ball_lambda(2, 4.0, std::sqrt(2.0)));
    CHECK(sol.rayleigh == doctest::Approx(sol.lambda_p).epsilon(1e-12));
    CHECK(sol.u.max_value() == 1.0);
}

TEST_CASE("scale covariance of the computed constant") {
    SolverConfig cfg;
    cfg.p = 3.0;
    auto solve_disk = [&](double radius, double h) {
        auto mesh = std::make_shared<const Mesh>(
            triangulate(DomainSpec::disk({0, 0}, radius), h, Vec2{0, 0}));
        return solve_potential(mesh, cfg).lambda;
    };
    const double l1 = solve_disk(1.0, 0.1);
    const double l2 = solve_disk(2.0, 0.2);
    CHECK(l2 / l1 == doctest::Approx(std::pow(2.0, 2.0 - 3.0)).epsilon(0.01));
}

TEST_CASE("uniqueness probe: square consistent, annulus continuum") {
    SolverConfig cfg;
    cfg.p = 3.0;
    {
        FindOptions fo;
        fo.h = 0.1;
        fo.jobs = 2;
        fo.fundamental_domain_only = true;
        const auto rep = uniqueness_probe(
            DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}), cfg, fo);
        CHECK(rep.symmetry_consistent);
        CHECK(rep.orbit_size == 1);
        CHECK(rep.count_estimate == "1");
    }
    {
        FindOptions fo;
        fo.h = 0.12;
        fo.sweep_g = 0.35;
        fo.jobs = 2;
        const auto rep = uniqueness_probe(DomainSpec::annulus(1, 2), cfg, fo);
        CHECK_FALSE(rep.symmetry_consistent);  // rotations move the extremal
        CHECK(rep.orbit_size == 0);
        CHECK(rep.count_estimate == "continuum (rotational orbit)");
    }
}

TEST_CASE("uniqueness probe: bow tie and dumbbell report reflection pairs") {
    SolverConfig cfg;
    cfg.p = 3.0;
    {
        FindOptions fo;
        fo.h = 0.1;
        fo.sweep_g = 0.2;
        fo.jobs = 2;
        fo.fundamental_domain_only = true;
        const auto rep = uniqueness_probe(DomainSpec::bowtie(0.3), cfg, fo);
        CHECK_FALSE(rep.symmetry_consistent);
        CHECK(rep.orbit_size == 2);            // (+-x0, 0)
        CHECK(rep.x0.x > 2.0 * fo.h);          // off the origin
        CHECK(std::abs(rep.x0.y) < fo.h);      // on the x1 axis
        CHECK(rep.orbit_lambda_spread_rel < 1e-3);
    }
    {
        FindOptions fo;
        fo.h = 1.0 / 6;
        fo.jobs = 2;
        fo.fundamental_domain_only = true;
        const auto rep = uniqueness_probe(DomainSpec::dumbbell(0.5), cfg, fo);
        CHECK_FALSE(rep.symmetry_consistent);
        CHECK(rep.orbit_size == 2);            // one extremal per lobe
        CHECK(std::abs(rep.x0.x) > 3.0);       // deep inside a lobe
        CHECK(std::abs(rep.x0.y) < fo.h);
    }
}

TEST_CASE("discrete embedding inequality holds for random admissible fields") {
    SolverConfig cfg;
    cfg.p = 3.0;
    auto mesh = std::make_shared<const Mesh>(
        triangulate(DomainSpec::disk({0, 0}, 1.0), 0.1, Vec2{0, 0}));
    const double lambda = solve_potential(mesh, cfg).lambda;
    std::mt19937 rng(31u);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(mesh->vertices.size());
        double vmax = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = mesh->boundary[i] ? 0.0 : d(rng);
            vmax = std::max(vmax, std::abs(v[i]));
        }
        CHECK(p_energy(*mesh, v, cfg.p) >= lambda * std::pow(vmax, cfg.p) - 1e-9);
    }
}
