#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "morrey/errors.hpp"
#include "morrey/io.hpp"

using namespace morrey;

TEST_CASE("domain json parsing") {
    const auto disk = domain_from_json_text(
        R"({"kind":"disk","params":{"center":[0,0],"radius":1.5}})");
    CHECK(disk.kind == DomainKind::Disk);
    CHECK(disk.radius == 1.5);
    CHECK(contains(disk, {1.0, 0.0}));

    const auto bt = domain_from_json_text(
        R"({"kind":"bowtie","params":{"epsilon":0.25},"symmetries":["reflect-x1","reflect-x2"]})");
    CHECK(bt.epsilon == 0.25);
    CHECK(bt.has_symmetry(Symmetry::ReflectX1));

    SUBCASE("missing keys are named") {
        try {
            domain_from_json_text(R"({"kind":"disk","params":{"center":[0,0]}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("radius") != std::string::npos);
        }
        try {
            domain_from_json_text(R"({"params":{}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("kind") != std::string::npos);
        }
    }
    SUBCASE("invalid JSON rejected") {
        CHECK_THROWS_AS(domain_from_json_text("{nope"), ConfigError);
        CHECK_THROWS_AS(domain_from_json_text(R"({"kind":"heptagon"})"), ConfigError);
    }
    SUBCASE("false symmetry declarations rejected") {
        // a square is not invariant under pi/4 rotations
        CHECK_THROWS_AS(domain_from_json_text(
                            R"({"kind":"polygon","params":{"vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]},
                                "symmetries":["rotation"]})"),
                        ConfigError);
    }
}

TEST_CASE("domain json round trip") {
    for (const char* text : {
             R"({"kind":"annulus","params":{"r1":1.0,"r2":2.0}})",
             R"({"kind":"bowtie","params":{"epsilon":0.1}})",
             R"({"kind":"polar_curve","params":{"r0":10.0,"cos":[0,0,0,0,0,0,0,0.65]}})",
             R"({"kind":"rect_union","params":{"rects":[[-3,-1,3,1],[-1,-3,1,3]]}})",
         }) {
        const auto spec = domain_from_json_text(text);
        const auto spec2 = domain_from_json_text(domain_to_json_text(spec));
        CHECK(spec2.kind == spec.kind);
        const Rect bb = bounding_box(spec);
        for (int i = 0; i < 200; ++i) {
            const Vec2 p{bb.lo.x + (bb.hi.x - bb.lo.x) * (i % 17) / 16.0,
                         bb.lo.y + (bb.hi.y - bb.lo.y) * (i % 13) / 12.0};
            CHECK(contains(spec, p) == contains(spec2, p));
        }
    }
}

TEST_CASE("vtk round trip is bit exact") {
    const auto mesh = triangulate(DomainSpec::disk({0, 0}, 1.0), 0.25, Vec2{0.1, 0.0});
    std::vector<double> field(mesh.vertices.size());
    for (std::size_t v = 0; v < field.size(); ++v)
        field[v] = std::sin(7.0 * mesh.vertices[v].x) * 0.3 + mesh.vertices[v].y / 3.0;

    std::stringstream ss;
    write_vtk(ss, mesh, {{"u", &field}});
    const auto back = read_vtk(ss);

    REQUIRE(back.mesh.vertices.size() == mesh.vertices.size());
    REQUIRE(back.mesh.triangles.size() == mesh.triangles.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        CHECK(back.mesh.vertices[v] == mesh.vertices[v]);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        CHECK(back.mesh.triangles[t] == mesh.triangles[t]);
    REQUIRE(back.fields.size() == 1);
    CHECK(back.fields[0].first == "u");
    CHECK(back.fields[0].second == field);
}

TEST_CASE("sweep csv shape") {
    PoleSweepResult sweep;
    sweep.g = 0.5;
    sweep.h = 0.1;
    for (int i = 0; i < 3; ++i) {
        PoleSweepEntry e;
        e.pole = {0.1 * i, 0.0};
        e.lambda = 2.0 + i;
        e.report.kkt = 1e-9;
        e.report.iters = 7;
        e.ok = true;
        sweep.entries.push_back(e);
    }
    std::stringstream ss;
    write_sweep_csv(ss, sweep);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "y1,y2,lambda,kkt,iters");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("report json carries the contract keys") {
    SolveReport rep;
    rep.energy = 1.5;
    rep.kkt = 1e-9;
    rep.iters = 12;
    rep.eps_floor = 1e-8;
    rep.seconds = 0.25;
    const std::string text = report_to_json_text(rep);
    for (const char* key : {"energy", "kkt", "iters", "eps_floor", "seconds"})
        CHECK(text.find(std::string("\"") + key + "\"") != std::string::npos);
}

TEST_CASE("atomic write") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "morreylab_test_io";
    fs::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    atomic_write_file(path, "payload");
    CHECK(read_file(path) == "payload");
    CHECK_FALSE(fs::exists(path + ".tmp"));
    atomic_write_file(path, "payload2");
    CHECK(read_file(path) == "payload2");
    fs::remove_all(dir);
}
