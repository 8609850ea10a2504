#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "morrey/errors.hpp"
#include "morrey/mesh.hpp"

using namespace morrey;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("triangulate pins the pole exactly") {
    const auto mesh = triangulate(DomainSpec::disk({0, 0}, 1.0), 0.2, Vec2{0.0, 0.0});
    REQUIRE(mesh.pole_vertex >= 0);
    CHECK(mesh.vertices[mesh.pole_vertex].x == 0.0);
    CHECK(mesh.vertices[mesh.pole_vertex].y == 0.0);
    CHECK_FALSE(mesh.boundary[mesh.pole_vertex]);

    // the coarse limit: pole at distance exactly 2h still pins
    const auto coarse = triangulate(DomainSpec::disk({0, 0}, 1.0), 0.5, Vec2{0.0, 0.0});
    CHECK(coarse.vertices[coarse.pole_vertex] == Vec2{0.0, 0.0});

    const auto mesh2 = triangulate(DomainSpec::disk({0, 0}, 1.0), 0.1, Vec2{0.3, -0.2});
    CHECK(mesh2.vertices[mesh2.pole_vertex].x == 0.3);
    CHECK(mesh2.vertices[mesh2.pole_vertex].y == -0.2);
}

TEST_CASE("unresolved necks raise MeshResolutionError") {
    CHECK_THROWS_AS(triangulate(DomainSpec::bowtie(0.1), 0.5), MeshResolutionError);
    CHECK_THROWS_AS(triangulate(DomainSpec::dumbbell(0.2), 0.5), MeshResolutionError);
}

TEST_CASE("pole clearance enforced") {
    CHECK_THROWS_AS(triangulate(DomainSpec::disk({0, 0}, 1.0), 0.1, Vec2{0.95, 0.0}),
                    PoleTooCloseToBoundary);
    CHECK_THROWS_AS(triangulate(DomainSpec::disk({0, 0}, 1.0), 0.1, Vec2{1.5, 0.0}),
                    PoleTooCloseToBoundary);
}

TEST_CASE("square boundary vertices sit on the boundary exactly") {
    const auto spec = DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
    const auto mesh = triangulate(spec, 0.1);
    int boundary_count = 0;
    for (int v = 0; v < (int)mesh.vertices.size(); ++v) {
        if (!mesh.boundary[v]) continue;
        ++boundary_count;
        const double m = std::max(std::abs(mesh.vertices[v].x), std::abs(mesh.vertices[v].y));
        CHECK(std::abs(m - 1.0) <= 1e-12);
    }
    CHECK(boundary_count >= 4 * 20);
}

TEST_CASE("mesh invariants") {
    for (const DomainSpec& spec :
         {DomainSpec::disk({0, 0}, 1.0), DomainSpec::annulus(1, 2), DomainSpec::bowtie(0.3),
          DomainSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})}) {
        const double h = 0.1;
        const auto mesh = spec.kind == DomainKind::Annulus
                              ? triangulate(spec, h, Vec2{1.5, 0.0})
                              : triangulate(spec, h, Vec2{0.0, 0.0});
        CHECK(mesh.interior_count() >= 3);
        CHECK(mesh.max_edge() <= 2.0 * h + 1e-12);
        for (int t = 0; t < (int)mesh.triangles.size(); ++t) CHECK(mesh.triangle_area(t) > 0.0);
        const auto loops = boundary_loops(spec, h);
        for (int v = 0; v < (int)mesh.vertices.size(); ++v) {
            if (mesh.boundary[v]) {
                CHECK(loops_distance(loops, mesh.vertices[v]) <= 1e-9);
            } else {
                CHECK(contains(spec, mesh.vertices[v]));
            }
        }
    }
}

TEST_CASE("disk mesh area converges to pi monotonically") {
    double prev = 1e300;
    for (double h : {0.2, 0.1, 0.05}) {
        const auto mesh = triangulate(DomainSpec::disk({0, 0}, 1.0), h);
        const double err = std::abs(mesh.area() - kPi);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 5e-3);
}

TEST_CASE("triangulation is deterministic") {
    const auto a = triangulate(DomainSpec::bowtie(0.3), 0.1, Vec2{0.5, 0.0});
    const auto b = triangulate(DomainSpec::bowtie(0.3), 0.1, Vec2{0.5, 0.0});
    REQUIRE(a.vertices.size() == b.vertices.size());
    REQUIRE(a.triangles.size() == b.triangles.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
    for (std::size_t t = 0; t < a.triangles.size(); ++t) CHECK(a.triangles[t] == b.triangles[t]);
}

TEST_CASE("interpolation reproduces affine fields") {
    const auto mesh = triangulate(DomainSpec::disk({0, 0}, 1.0), 0.15, Vec2{0.0, 0.0});
    std::vector<double> vals(mesh.vertices.size());
    for (std::size_t v = 0; v < vals.size(); ++v)
        vals[v] = 2.0 * mesh.vertices[v].x + 3.0 * mesh.vertices[v].y + 0.7;
    MeshLocator loc(mesh);
    for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{-0.5, 0.3}, Vec2{0.0, 0.0}, Vec2{0.6, -0.6}}) {
        CHECK(loc.interpolate(vals, p) == doctest::Approx(2.0 * p.x + 3.0 * p.y + 0.7).epsilon(1e-12));
    }
}

TEST_CASE("annulus mesh respects the hole") {
    const auto mesh = triangulate(DomainSpec::annulus(1, 2), 0.1);
    for (const auto& v : mesh.vertices) {
        CHECK(norm(v) >= 1.0 - 1e-9);
        CHECK(norm(v) <= 2.0 + 1e-9);
    }
    // triangle centroids stay out of the hole
    for (const auto& tr : mesh.triangles) {
        const Vec2 c = (mesh.vertices[tr[0]] + mesh.vertices[tr[1]] + mesh.vertices[tr[2]]) *
                       (1.0 / 3.0);
        CHECK(norm(c) > 1.0 - 1e-9);
    }
    CHECK(mesh.area() == doctest::Approx(3.0 * kPi).epsilon(0.01));
}
