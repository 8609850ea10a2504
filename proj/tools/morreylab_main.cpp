// morreylab: compute sharp sup-norm embedding constants and their extremal
// fields on planar domains via p-Laplace potentials and pole-energy descent.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "morrey/errors.hpp"
#include "morrey/io.hpp"
#include "morrey/shape_calculus.hpp"
#include "morrey/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace morrey;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

std::string timestamp_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct RunConfig {
    std::string spec_path;
    double p{3.0};
    double h{0.05};
    double g{0.0};  // 0: default 4h
    double grad_tol{1e-8};
    std::vector<double> eps_schedule;  // empty: solver default
    int max_iter{0};                   // 0: solver default
    int jobs{1};
    bool quadrant{false};
    std::string out_dir;

    void load_file(const std::string& path) {
        json j;
        try {
            j = json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: invalid JSON: ") + e.what());
        }
        if (j.contains("spec")) spec_path = j["spec"].get<std::string>();
        if (j.contains("p")) p = j["p"].get<double>();
        if (j.contains("h")) h = j["h"].get<double>();
        if (j.contains("g")) g = j["g"].get<double>();
        if (j.contains("grad_tol")) grad_tol = j["grad_tol"].get<double>();
        if (j.contains("eps_schedule")) eps_schedule = j["eps_schedule"].get<std::vector<double>>();
        if (j.contains("max_iter")) max_iter = j["max_iter"].get<int>();
        if (j.contains("jobs")) jobs = j["jobs"].get<int>();
        if (j.contains("quadrant")) quadrant = j["quadrant"].get<bool>();
        if (j.contains("out")) out_dir = j["out"].get<std::string>();
    }

    void validate() const {
        if (spec_path.empty()) throw ConfigError("config: missing domain spec path");
        if (!fs::exists(spec_path)) throw ConfigError("config: spec file not found: " + spec_path);
        if (!(p > 2.0)) throw ConfigError("config: p must exceed 2");
        if (!(h > 0.0)) throw ConfigError("config: h must be positive");
        if (g != 0.0 && !(g > 0.0)) throw ConfigError("config: g must be positive");
        if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    }

    std::string resolve_out() const {
        if (!out_dir.empty()) return out_dir;
        if (const char* env = std::getenv("MORREYLAB_OUT")) return env;
        return ".";
    }

    SolverConfig solver() const {
        SolverConfig c;
        c.p = p;
        c.grad_tol = grad_tol;
        if (!eps_schedule.empty()) c.eps_schedule = eps_schedule;
        if (max_iter > 0) c.max_iter = max_iter;
        c.validate();
        return c;
    }

    json echo() const {
        json j;
        j["spec"] = spec_path;
        j["p"] = p;
        j["h"] = h;
        j["g"] = g > 0 ? g : 4.0 * h;
        j["grad_tol"] = grad_tol;
        j["jobs"] = jobs;
        j["quadrant"] = quadrant;
        return j;
    }
};

void add_common(CLI::App* cmd, RunConfig& rc, std::string& config_path) {
    cmd->set_help_flag("--help", "print this help message");  // frees -h for mesh size
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    cmd->add_option("--spec", rc.spec_path, "domain spec JSON file");
    cmd->add_option("--p", rc.p, "exponent p > 2");
    cmd->add_option("--h", rc.h, "target mesh edge length");
    cmd->add_option("--g", rc.g, "pole sweep grid spacing (default 4h)");
    cmd->add_option("--grad-tol", rc.grad_tol, "KKT residual tolerance");
    cmd->add_option("--jobs", rc.jobs, "parallel solves for sweeps");
    cmd->add_flag("--quadrant", rc.quadrant,
                  "sweep only the first quadrant of a doubly reflection-symmetric domain");
    cmd->add_option("--out", rc.out_dir, "output directory (or MORREYLAB_OUT)");
}

// re-parse the config file first, then let CLI flags that were actually given
// override it
void merge_config(const CLI::App* cmd, RunConfig& rc, const std::string& config_path) {
    if (config_path.empty()) return;
    RunConfig from_file = rc;
    from_file.load_file(config_path);
    RunConfig merged = from_file;
    if (cmd->count("--spec")) merged.spec_path = rc.spec_path;
    if (cmd->count("--p")) merged.p = rc.p;
    if (cmd->count("--h")) merged.h = rc.h;
    if (cmd->count("--g")) merged.g = rc.g;
    if (cmd->count("--grad-tol")) merged.grad_tol = rc.grad_tol;
    if (cmd->count("--jobs")) merged.jobs = rc.jobs;
    if (cmd->count("--quadrant")) merged.quadrant = rc.quadrant;
    if (cmd->count("--out")) merged.out_dir = rc.out_dir;
    rc = merged;
}

json field_summary(const RunConfig& rc, const DomainSpec& spec, const ExtremalSolution& sol) {
    json j;
    j["input"] = rc.echo();
    j["version"] = kVersion;
    j["domain"] = spec.kind_name();
    j["lambda_p"] = sol.lambda_p;
    j["x0"] = {sol.x0.x, sol.x0.y};
    j["rayleigh"] = sol.rayleigh;
    j["fit_exponent"] = sol.fit.exponent;
    j["fit_coefficient"] = sol.fit.coefficient;
    j["kkt"] = sol.report.kkt;
    j["iters"] = sol.report.iters;
    return j;
}

int cmd_solve(const RunConfig& rc, const std::optional<Vec2>& pole) {
    const DomainSpec spec = domain_from_json_file(rc.spec_path);
    const SolverConfig solver = rc.solver();
    const fs::path out = rc.resolve_out();
    fs::create_directories(out);

    ExtremalSolution sol;
    if (pole) {
        auto mesh = std::make_shared<const Mesh>(triangulate(spec, rc.h, *pole));
        auto ps = solve_potential(mesh, solver);
        sol.mesh = mesh;
        sol.u = std::move(ps.w);
        sol.x0 = *pole;
        sol.lambda_p = ps.lambda;
        sol.rayleigh = ps.lambda;
        sol.report = ps.report;
        try {
            sol.fit = asymptotic_fit(sol.u, sol.x0, rc.p);
        } catch (const InsufficientSamples&) {}
    } else {
        FindOptions fo;
        fo.h = rc.h;
        fo.sweep_g = rc.g;
        fo.jobs = rc.jobs;
        fo.fundamental_domain_only = rc.quadrant;
        sol = find_extremal(spec, solver, fo);
    }

    json summary = field_summary(rc, spec, sol);
    summary["files"] = {"field.vtk", "report.json", "sweep.csv"};
    summary["timestamp"] = timestamp_now();

    {
        std::ostringstream os;
        write_vtk(os, *sol.mesh, {{"u", &sol.u.values}});
        atomic_write_file((out / "field.vtk").string(), os.str());
    }
    atomic_write_file((out / "report.json").string(), report_to_json_text(sol.report));
    {
        std::ostringstream os;
        write_sweep_csv(os, sol.sweep);
        atomic_write_file((out / "sweep.csv").string(), os.str());
    }
    atomic_write_file((out / "summary.json").string(), summary.dump(2));

    std::cout << "lambda_p = " << sol.lambda_p << "  x0 = (" << sol.x0.x << ", " << sol.x0.y
              << ")  [" << out.string() << "/summary.json]\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& rc) {
    const DomainSpec spec = domain_from_json_file(rc.spec_path);
    SweepOptions sw;
    sw.h = rc.h;
    sw.g = rc.g > 0 ? rc.g : 4.0 * rc.h;
    sw.jobs = rc.jobs;
    sw.fundamental_domain_only = rc.quadrant;
    const auto sweep = pole_sweep(spec, rc.solver(), sw);

    const fs::path out = rc.resolve_out();
    fs::create_directories(out);
    {
        std::ostringstream os;
        write_sweep_csv(os, sweep);
        atomic_write_file((out / "sweep.csv").string(), os.str());
    }
    json j;
    j["input"] = rc.echo();
    j["version"] = kVersion;
    j["poles"] = sweep.entries.size();
    j["converged"] = std::count_if(sweep.entries.begin(), sweep.entries.end(),
                                   [](const PoleSweepEntry& e) { return e.ok; });
    if (sweep.argmin >= 0) {
        j["argmin_pole"] = {sweep.best().pole.x, sweep.best().pole.y};
        j["min_lambda"] = sweep.min_lambda();
    }
    j["timestamp"] = timestamp_now();
    atomic_write_file((out / "sweep_summary.json").string(), j.dump(2));
    std::cout << "poles=" << sweep.entries.size();
    if (sweep.argmin >= 0)
        std::cout << "  min lambda=" << sweep.min_lambda() << " at (" << sweep.best().pole.x
                  << ", " << sweep.best().pole.y << ")";
    std::cout << "\n";
    if (!sweep.all_ok()) return kExitNumeric;
    return kExitOk;
}

int cmd_green_max(const RunConfig& rc) {
    const DomainSpec spec = domain_from_json_file(rc.spec_path);
    SweepOptions sw;
    sw.h = rc.h;
    sw.g = rc.g > 0 ? rc.g : 4.0 * rc.h;
    sw.jobs = rc.jobs;
    sw.fundamental_domain_only = rc.quadrant;
    const auto sweep = pole_sweep(spec, rc.solver(), sw);
    if (sweep.argmin < 0) {
        std::cerr << "error: no converged pole\n";
        return kExitNumeric;
    }
    const double pm1 = rc.p - 1.0;
    int argmax = -1;
    double gmax = -1.0;
    std::ostringstream os;
    os << "y1,y2,green_diag\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (int i = 0; i < (int)sweep.entries.size(); ++i) {
        const auto& e = sweep.entries[i];
        const double G = e.ok ? std::pow(e.lambda, -1.0 / pm1)
                              : std::numeric_limits<double>::quiet_NaN();
        os << fmt(e.pole.x) << ',' << fmt(e.pole.y) << ',' << fmt(G) << '\n';
        if (e.ok && G > gmax) { gmax = G; argmax = i; }
    }
    const fs::path out = rc.resolve_out();
    fs::create_directories(out);
    atomic_write_file((out / "green.csv").string(), os.str());

    // spot verification against a direct Green solve at the argmax pole
    auto mesh = std::make_shared<const Mesh>(triangulate(spec, sw.h, sweep.entries[argmax].pole));
    const auto green = green_function(mesh, rc.solver());
    const double direct_err = std::abs(green.diag - gmax);

    json j;
    j["input"] = rc.echo();
    j["version"] = kVersion;
    j["argmax_pole"] = {sweep.entries[argmax].pole.x, sweep.entries[argmax].pole.y};
    j["max_green_diag"] = gmax;
    j["argmin_lambda_pole"] = {sweep.best().pole.x, sweep.best().pole.y};
    j["min_lambda"] = sweep.min_lambda();
    j["argopt_coincide"] = argmax == sweep.argmin;
    j["direct_green_error"] = direct_err;
    j["timestamp"] = timestamp_now();
    atomic_write_file((out / "green_summary.json").string(), j.dump(2));
    std::cout << "max G(y,y)=" << gmax << " at (" << sweep.entries[argmax].pole.x << ", "
              << sweep.entries[argmax].pole.y << "), coincides with argmin lambda: "
              << (argmax == sweep.argmin ? "yes" : "no") << "\n";
    return argmax == sweep.argmin && direct_err < 1e-10 ? kExitOk : kExitNumeric;
}

int cmd_symmetry_check(const RunConfig& rc) {
    const DomainSpec spec = domain_from_json_file(rc.spec_path);
    FindOptions fo;
    fo.h = rc.h;
    fo.sweep_g = rc.g;
    fo.jobs = rc.jobs;
    fo.fundamental_domain_only = rc.quadrant;
    const auto rep = uniqueness_probe(spec, rc.solver(), fo);

    json j;
    j["input"] = rc.echo();
    j["version"] = kVersion;
    j["symmetry_consistent"] = rep.symmetry_consistent;
    j["max_field_asymmetry"] = rep.max_field_asymmetry;
    j["x0"] = {rep.x0.x, rep.x0.y};
    j["lambda_p"] = rep.lambda_p;
    j["orbit_size"] = rep.orbit_size;
    j["count_estimate"] = rep.count_estimate;
    j["orbit_lambda_spread_rel"] = rep.orbit_lambda_spread_rel;
    j["timestamp"] = timestamp_now();
    const fs::path out = rc.resolve_out();
    fs::create_directories(out);
    atomic_write_file((out / "symmetry.json").string(), j.dump(2));
    std::cout << "symmetry_consistent=" << (rep.symmetry_consistent ? "true" : "false")
              << " extremal-count estimate=" << rep.count_estimate
              << " max asymmetry=" << rep.max_field_asymmetry << "\n";
    return kExitOk;
}

int cmd_export(const RunConfig& rc, const std::string& mesh_out, const std::string& mask_out) {
    const DomainSpec spec = domain_from_json_file(rc.spec_path);
    if (!mesh_out.empty()) {
        const Mesh mesh = triangulate(spec, rc.h);
        std::ostringstream os;
        write_vtk(os, mesh);
        atomic_write_file(mesh_out, os.str());
        std::cout << "mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
                  << " triangles -> " << mesh_out << "\n";
    }
    if (!mask_out.empty()) {
        const PixelMask mask = rasterize(spec);
        GridFunction g;
        g.origin = mask.origin;
        g.cell = mask.cell;
        g.nx = mask.nx;
        g.ny = mask.ny;
        g.values.assign(mask.cells.begin(), mask.cells.end());
        std::ostringstream os;
        g.to_csv(os);
        atomic_write_file(mask_out, os.str());
        std::cout << "mask: " << mask.count() << " cells -> " << mask_out << "\n";
    }
    return kExitOk;
}

int cmd_verify(const BatteryOptions& opts) {
    const auto results = run_battery(opts);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << "  ("
                  << (int)(r.seconds * 1000) / 1000.0 << "s)" << r.detail << "\n";
        all &= r.passed;
    }
    if (results.empty()) {
        std::cerr << "error: no checks selected\n";
        return kExitConfig;
    }
    return all ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sharp sup-norm embedding constants via p-Laplace potentials"};
    app.require_subcommand(1);

    RunConfig rc_solve, rc_sweep, rc_green, rc_sym, rc_export;
    std::string cfg_solve, cfg_sweep, cfg_green, cfg_sym, cfg_export;
    std::string pole_arg, mesh_out, mask_out;

    auto* solve = app.add_subcommand("solve", "find the extremal and lambda_p");
    add_common(solve, rc_solve, cfg_solve);
    solve->add_option("--pole", pole_arg, "pin the pole at x,y instead of optimizing");

    auto* sweep = app.add_subcommand("sweep", "map the pole-energy landscape lambda(y)");
    add_common(sweep, rc_sweep, cfg_sweep);

    auto* green = app.add_subcommand("green-max", "maximize the Green diagonal G(y,y)");
    add_common(green, rc_green, cfg_green);

    auto* sym = app.add_subcommand("symmetry-check", "probe symmetry/uniqueness consequences");
    add_common(sym, rc_sym, cfg_sym);

    auto* exp = app.add_subcommand("export", "export meshes and raster masks");
    add_common(exp, rc_export, cfg_export);
    exp->add_option("--mesh-out", mesh_out, "write the triangulation as legacy ASCII VTK");
    exp->add_option("--mask-out", mask_out, "write the raster mask as grid CSV");

    BatteryOptions bo;
    auto* verify = app.add_subcommand("verify", "run the verification battery");
    verify->add_option("--only", bo.only, "run only the named checks");
    verify->add_option("--slack-scale", bo.slack_scale, "scale every pass tolerance");
    verify->add_option("--jobs", bo.jobs, "parallel solves inside checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed()) {
            merge_config(solve, rc_solve, cfg_solve);
            rc_solve.validate();
            std::optional<Vec2> pole;
            if (!pole_arg.empty()) {
                const auto comma = pole_arg.find(',');
                if (comma == std::string::npos)
                    throw ConfigError("config: --pole expects x,y");
                pole = Vec2{std::stod(pole_arg.substr(0, comma)),
                            std::stod(pole_arg.substr(comma + 1))};
            }
            return cmd_solve(rc_solve, pole);
        }
        if (sweep->parsed()) {
            merge_config(sweep, rc_sweep, cfg_sweep);
            rc_sweep.validate();
            return cmd_sweep(rc_sweep);
        }
        if (green->parsed()) {
            merge_config(green, rc_green, cfg_green);
            rc_green.validate();
            return cmd_green_max(rc_green);
        }
        if (sym->parsed()) {
            merge_config(sym, rc_sym, cfg_sym);
            rc_sym.validate();
            return cmd_symmetry_check(rc_sym);
        }
        if (exp->parsed()) {
            merge_config(exp, rc_export, cfg_export);
            rc_export.validate();
            return cmd_export(rc_export, mesh_out, mask_out);
        }
        if (verify->parsed()) return cmd_verify(bo);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
