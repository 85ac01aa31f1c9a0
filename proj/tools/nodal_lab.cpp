// Command line front end. Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "nodal_lab/config.hpp"
#include "nodal_lab/lab.hpp"
#include "nodal_lab/mesh_io.hpp"

namespace fs = std::filesystem;
using namespace nodal_lab;

namespace {

constexpr int kOk = 0, kConfigError = 2, kNumericalError = 3;

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
};

Config load_config(const Options& o) {
    Config c = o.config.empty() ? Config{} : Config::load(o.config);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(ErrorKind::invalid_input, "--set expects key=value, got '" + kv + "'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        c.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (!o.out.empty()) c.set("out", o.out);
    return c;
}

void reject_unused(const Config& c) {
    const auto extra = c.unused();
    if (extra.empty()) return;
    std::string list;
    for (const auto& k : extra) list += (list.empty() ? "" : ", ") + k;
    fail(ErrorKind::invalid_input, "unknown config keys: " + list);
}

std::string out_dir(const Config& c) { return c.get("out", std::string("./results")); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) fail(ErrorKind::io, "cannot write " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + dir + ": " + ec.message());
}

BoundaryCondition boundary_for(const Config& c, const IntrinsicMesh& m) {
    const std::string bc = c.get("solve.bc", std::string(m.closed() ? "closed" : "dirichlet"));
    if (bc == "closed") {
        require(m.closed(), "solve.bc = closed needs a closed surface");
        return BoundaryCondition::closed;
    }
    if (bc == "dirichlet") return BoundaryCondition::dirichlet;
    fail(ErrorKind::invalid_input, "solve.bc must be closed or dirichlet");
}

/// Converged flag of every record; a sweep with failures still writes its files.
int finish(const ExperimentReport& r, const std::string& dir) {
    for (const auto& f : emit_report(r, dir)) std::cout << "wrote " << f << '\n';
    for (const auto& f : r.flags) std::cout << "flag: " << f << '\n';
    for (const auto& x : r.records)
        if (!x.converged) return kNumericalError;
    return kOk;
}

int cmd_mesh(const Config& c) {
    const auto m = parse_geometry(c.require_string("geometry.m1"));
    const std::string dir = out_dir(c);
    reject_unused(c);
    ensure_dir(dir);
    const std::string path = (fs::path(dir) / "mesh.imesh").string();
    save_imesh(path, m);
    std::cout << "vertices " << m.vertex_count() << "\ntriangles " << m.triangle_count() << "\neuler "
              << m.euler_characteristic() << "\narea " << m.total_area() << "\nwrote " << path << '\n';
    return kOk;
}

struct Solved {
    IntrinsicMesh mesh;
    BoundaryCondition bc;
    Spectrum spectrum;
};

Solved solve_from(const Config& c, int extra_modes = 0) {
    Solved s;
    s.mesh = parse_geometry(c.require_string("geometry.m1"));
    s.bc = boundary_for(c, s.mesh);
    const int m = c.get("solve.m", 6);
    require(m >= 1, "solve.m must be at least 1");
    const double tol = c.get("solve.tol", 1e-9);
    require(tol > 0 && tol < 1e-2, "solve.tol must lie in (0, 1e-2)");
    const auto seed = static_cast<unsigned>(c.get("seed", 42));
    s.spectrum = solve_lowest(assemble(s.mesh, s.bc), m + extra_modes, tol, seed);
    return s;
}

int cmd_solve(const Config& c) {
    const std::string dir = out_dir(c);
    const auto s = solve_from(c);
    reject_unused(c);
    ensure_dir(dir);
    std::ostringstream os;
    os << "k,lambda,residual,cluster\n" << std::setprecision(17);
    for (int k = 0; k < s.spectrum.size(); ++k)
        os << k << ',' << s.spectrum.eigenvalues[k] << ',' << s.spectrum.residuals[k] << ',' << s.spectrum.cluster_id[k] << '\n';
    const std::string path = (fs::path(dir) / "spectrum.csv").string();
    write_text(path, os.str());
    std::cout << os.str() << "wrote " << path << '\n';
    return s.spectrum.converged ? kOk : kNumericalError;
}

int cmd_nodal(const Config& c) {
    const std::string dir = out_dir(c);
    const int k = c.get("nodal.k", 1);
    const auto s = solve_from(c);
    reject_unused(c);
    require(k >= 0 && k < s.spectrum.size(), "nodal.k must lie within the computed modes (raise solve.m)");
    ensure_dir(dir);
    Vector f = s.spectrum.vector(k);
    if (s.bc == BoundaryCondition::dirichlet) f = lift_dirichlet_boundary(s.mesh, f);
    const auto set = extract_level_set(s.mesh, f);
    const auto domains = count_domains(s.mesh, f);
    const std::string base = (fs::path(dir) / ("nodal_k" + std::to_string(k))).string();
    std::ostringstream csv, svg;
    write_nodal_csv(csv, set);
    write_nodal_svg(svg, s.mesh, set);
    write_text(base + ".csv", csv.str());
    write_text(base + ".svg", svg.str());
    std::cout << "lambda " << std::setprecision(12) << s.spectrum.eigenvalues[k] << "\nsegments " << set.segments.size()
              << "\ncomponents " << set.component_count << "\ndomains " << domains.count << "\nwrote " << base
              << ".csv\nwrote " << base << ".svg\n";
    return s.spectrum.converged ? kOk : kNumericalError;
}

int cmd_sweep(const Config& c) {
    const auto cfg = SweepConfig::from(c);
    const bool threshold = c.get("sweep.threshold", false);
    reject_unused(c);
    int code = finish(run_convergence_sweep(cfg), cfg.out);
    if (threshold) code = std::max(code, finish(estimate_threshold(cfg), cfg.out));
    return code;
}

int cmd_payne(const Config& c) {
    const auto cfg = PayneConfig::from(c);
    const std::string mode = c.get("payne.mode", std::string("both"));
    const std::string dir = out_dir(c);
    reject_unused(c);
    require(mode == "attach" || mode == "perforate" || mode == "both", "payne.mode must be attach, perforate or both");
    int code = kOk;
    if (mode != "perforate") code = std::max(code, finish(run_payne_attachment(cfg), dir));
    if (mode != "attach") code = std::max(code, finish(run_payne_perforation(cfg), dir));
    return code;
}

int cmd_lewy(const Config& c) {
    const auto cfg = LewyConfig::from(c);
    const std::string dir = out_dir(c);
    reject_unused(c);
    return finish(run_lewy(cfg), dir);
}

/// Collects every <name>_summary.csv of the output directory into report.md.
int cmd_report(const Config& c) {
    const std::string dir = out_dir(c);
    reject_unused(c);
    if (!fs::is_directory(dir)) fail(ErrorKind::invalid_input, "report: no output directory " + dir);
    std::vector<fs::path> summaries;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string n = e.path().filename().string();
        if (n.size() > 12 && n.ends_with("_summary.csv")) summaries.push_back(e.path());
    }
    if (summaries.empty()) fail(ErrorKind::invalid_input, "report: nothing to report in " + dir);
    std::sort(summaries.begin(), summaries.end());
    std::ostringstream md;
    md << "# Results\n";
    for (const auto& p : summaries) {
        const std::string name = p.filename().string().substr(0, p.filename().string().size() - 12);
        md << "\n## " << name << "\n\n| key | value |\n|---|---|\n";
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            md << "| " << line.substr(0, comma) << " | " << (comma == std::string::npos ? "" : line.substr(comma + 1)) << " |\n";
        }
        if (fs::exists(fs::path(dir) / (name + "_errors.svg"))) md << "\n![" << name << "](" << name << "_errors.svg)\n";
    }
    const std::string path = (fs::path(dir) / "report.md").string();
    write_text(path, md.str());
    std::cout << "wrote " << path << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenfunction and nodal set experiments on glued surfaces"};
    app.require_subcommand(1, 1);
    Options opts;
    std::map<std::string, std::function<int(const Config&)>> handlers{
        {"mesh", cmd_mesh},   {"solve", cmd_solve}, {"nodal", cmd_nodal}, {"sweep", cmd_sweep},
        {"payne", cmd_payne}, {"lewy", cmd_lewy},   {"report", cmd_report}};
    const std::map<std::string, std::string> help{
        {"mesh", "build the geometry.m1 mesh and write it in IMESH format"},
        {"solve", "lowest eigenpairs of geometry.m1"},
        {"nodal", "nodal set and domains of mode nodal.k"},
        {"sweep", "epsilon sweep of the connected sum (and the threshold with sweep.threshold = true)"},
        {"payne", "Dirichlet rectangle with an attached disk and with two holes"},
        {"lewy", "minimal nodal domain counts on sphere clusters and their transfer to a glued surface"},
        {"report", "collect the summaries of an output directory into report.md"}};
    for (const auto& [name, text] : help) {
        auto* sub = app.add_subcommand(name, text);
        sub->add_option("-c,--config", opts.config, "key = value configuration file");
        sub->add_option("-s,--set", opts.overrides, "override a key, key=value")->take_all();
        sub->add_option("-o,--out", opts.out, "output directory (config key out)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    try {
        const std::string name = app.get_subcommands().front()->get_name();
        return handlers.at(name)(load_config(opts));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::numerical ? kNumericalError : kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    }
}
