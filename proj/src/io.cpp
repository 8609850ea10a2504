#include "morrey/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "morrey/errors.hpp"

namespace morrey {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Symmetry symmetry_from_name(const std::string& name) {
    if (name == "reflect-x1") return Symmetry::ReflectX1;
    if (name == "reflect-x2") return Symmetry::ReflectX2;
    if (name == "rotation") return Symmetry::Rotation;
    throw ConfigError("unknown symmetry name: " + name);
}

std::string symmetry_name(Symmetry s) {
    switch (s) {
        case Symmetry::ReflectX1: return "reflect-x1";
        case Symmetry::ReflectX2: return "reflect-x2";
        case Symmetry::Rotation: return "rotation";
    }
    return "?";
}

const json& need(const json& obj, const char* key, const char* ctx) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError(std::string("domain spec: missing key \"") + key + "\" in " + ctx);
    return *it;
}

}  // namespace

DomainSpec domain_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("domain spec: invalid JSON: ") + e.what());
    }
    const std::string kind = need(root, "kind", "root").get<std::string>();
    const json params = root.value("params", json::object());

    DomainSpec spec;
    if (kind == "disk") {
        const auto c = need(params, "center", "disk params");
        spec = DomainSpec::disk({c.at(0).get<double>(), c.at(1).get<double>()},
                                need(params, "radius", "disk params").get<double>());
    } else if (kind == "annulus") {
        spec = DomainSpec::annulus(need(params, "r1", "annulus params").get<double>(),
                                   need(params, "r2", "annulus params").get<double>());
    } else if (kind == "polygon") {
        std::vector<Vec2> verts;
        for (const auto& v : need(params, "vertices", "polygon params"))
            verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        spec = DomainSpec::polygon(std::move(verts));
    } else if (kind == "bowtie") {
        spec = DomainSpec::bowtie(need(params, "epsilon", "bowtie params").get<double>());
    } else if (kind == "dumbbell") {
        spec = DomainSpec::dumbbell(need(params, "delta", "dumbbell params").get<double>());
    } else if (kind == "polar_curve") {
        std::vector<double> cc, sc;
        if (params.contains("cos")) cc = params["cos"].get<std::vector<double>>();
        if (params.contains("sin")) sc = params["sin"].get<std::vector<double>>();
        spec = DomainSpec::polar_curve(need(params, "r0", "polar params").get<double>(),
                                       std::move(cc), std::move(sc));
    } else if (kind == "rect_union") {
        std::vector<Rect> rects;
        for (const auto& r : need(params, "rects", "rect_union params")) {
            rects.push_back({{r.at(0).get<double>(), r.at(1).get<double>()},
                             {r.at(2).get<double>(), r.at(3).get<double>()}});
        }
        spec = DomainSpec::rect_union(std::move(rects));
    } else {
        throw ConfigError("domain spec: unknown kind \"" + kind + "\"");
    }

    if (root.contains("symmetries")) {
        spec.symmetries.clear();
        for (const auto& s : root["symmetries"])
            spec.symmetries.push_back(symmetry_from_name(s.get<std::string>()));
        // declared symmetries must hold on a sample (offsets keep the points
        // off rational boundary lines)
        const auto ops = sample_symmetry_ops(spec);
        const Rect bb = bounding_box(spec);
        for (int j = 0; j < 40; ++j)
            for (int i = 0; i < 40; ++i) {
                const Vec2 p{bb.lo.x + (bb.hi.x - bb.lo.x) * (i + 0.3819660112501051) / 40.0,
                             bb.lo.y + (bb.hi.y - bb.lo.y) * (j + 0.6180339887498949) / 40.0};
                for (const auto& op : ops)
                    if (contains(spec, p) != contains(spec, op.apply(p)))
                        throw ConfigError("domain spec: declared symmetry \"" + op.name() +
                                          "\" does not hold");
            }
    }
    return spec;
}

DomainSpec domain_from_json_file(const std::string& path) {
    return domain_from_json_text(read_file(path));
}

std::string domain_to_json_text(const DomainSpec& spec) {
    json root;
    root["kind"] = spec.kind_name();
    json params = json::object();
    switch (spec.kind) {
        case DomainKind::Disk:
            params["center"] = {spec.center.x, spec.center.y};
            params["radius"] = spec.radius;
            break;
        case DomainKind::Annulus:
            params["r1"] = spec.r1;
            params["r2"] = spec.r2;
            break;
        case DomainKind::Polygon: {
            json verts = json::array();
            for (const auto& v : spec.vertices) verts.push_back({v.x, v.y});
            params["vertices"] = verts;
            break;
        }
        case DomainKind::Bowtie: params["epsilon"] = spec.epsilon; break;
        case DomainKind::Dumbbell: params["delta"] = spec.delta; break;
        case DomainKind::PolarCurve:
            params["r0"] = spec.r0;
            params["cos"] = spec.cos_coef;
            params["sin"] = spec.sin_coef;
            break;
        case DomainKind::RectUnion: {
            json rects = json::array();
            for (const auto& r : spec.rects) rects.push_back({r.lo.x, r.lo.y, r.hi.x, r.hi.y});
            params["rects"] = rects;
            break;
        }
    }
    root["params"] = params;
    json syms = json::array();
    for (auto s : spec.symmetries) syms.push_back(symmetry_name(s));
    root["symmetries"] = syms;
    return root.dump(2);
}

// ---------------------------------------------------------------------------
// VTK
// ---------------------------------------------------------------------------

void write_vtk(std::ostream& os, const Mesh& mesh,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& fields) {
    os << "# vtk DataFile Version 3.0\n";
    os << "morreylab field export\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.vertices.size() << " double\n";
    for (const auto& v : mesh.vertices) os << fmt(v.x) << ' ' << fmt(v.y) << " 0\n";
    os << "CELLS " << mesh.triangles.size() << ' ' << mesh.triangles.size() * 4 << '\n';
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << mesh.triangles.size() << '\n';
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) os << "5\n";
    if (!fields.empty()) {
        os << "POINT_DATA " << mesh.vertices.size() << '\n';
        for (const auto& [name, vals] : fields) {
            os << "SCALARS " << name << " double 1\n";
            os << "LOOKUP_TABLE default\n";
            for (double v : *vals) os << fmt(v) << '\n';
        }
    }
}

VtkData read_vtk(std::istream& is) {
    VtkData out;
    std::string tok;
    auto expect_keyword = [&](const char* kw) {
        while (is >> tok) {
            if (tok == kw) return true;
        }
        return false;
    };
    if (!expect_keyword("POINTS")) throw ConfigError("vtk: POINTS section missing");
    std::size_t n;
    is >> n >> tok;  // count, type
    out.mesh.vertices.resize(n);
    out.mesh.boundary.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double x, y, z;
        is >> x >> y >> z;
        out.mesh.vertices[i] = {x, y};
    }
    if (!expect_keyword("CELLS")) throw ConfigError("vtk: CELLS section missing");
    std::size_t m, total;
    is >> m >> total;
    out.mesh.triangles.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        int k, a, b, c;
        is >> k >> a >> b >> c;
        if (k != 3) throw ConfigError("vtk: only triangles supported");
        out.mesh.triangles[t] = {a, b, c};
    }
    // optional POINT_DATA scalars
    while (is >> tok) {
        if (tok == "SCALARS") {
            std::string name, type, rest;
            is >> name >> type;
            std::getline(is, rest);  // optional component count
            std::string lut, lutname;
            is >> lut >> lutname;
            if (lut != "LOOKUP_TABLE") throw ConfigError("vtk: LOOKUP_TABLE expected");
            std::vector<double> vals(n);
            for (std::size_t i = 0; i < n; ++i) is >> vals[i];
            out.fields.emplace_back(name, std::move(vals));
        }
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const PoleSweepResult& sweep) {
    os << "y1,y2,lambda,kkt,iters\n";
    for (const auto& e : sweep.entries) {
        os << fmt(e.pole.x) << ',' << fmt(e.pole.y) << ',' << fmt(e.lambda) << ','
           << fmt(e.report.kkt) << ',' << e.report.iters << '\n';
    }
}

std::string report_to_json_text(const SolveReport& report) {
    json j;
    j["energy"] = report.energy;
    j["kkt"] = report.kkt;
    j["iters"] = report.iters;
    j["eps_floor"] = report.eps_floor;
    j["seconds"] = report.seconds;
    return j.dump(2);
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open for writing: " + tmp);
        os << content;
        if (!os) throw Error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace morrey
