#include "femwarp/cli.hpp"

#include "femwarp/analytic.hpp"
#include "femwarp/deformation_spec.hpp"
#include "femwarp/error.hpp"
#include "femwarp/generators.hpp"
#include "femwarp/mesh_io.hpp"
#include "femwarp/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace femwarp {

namespace {

std::string one_line(std::string text)
{
    for (char& c : text)
        if (c == '\n' || c == '\r')
            c = ' ';
    while (!text.empty() && text.back() == ' ')
        text.pop_back();
    return text;
}

std::vector<double> parse_grid(const std::string& grid)
{
    std::vector<double> parts;
    std::stringstream ss(grid);
    for (std::string item; std::getline(ss, item, ':');) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument, "param-grid must be a:b:step, got '" + grid + "'");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw Error(ErrorCode::invalid_argument, "param-grid must be a:b:step with step > 0 and b >= a");
    const auto count = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    if (count > 100000)
        throw Error(ErrorCode::invalid_argument, "param-grid has too many points");
    std::vector<double> values;
    for (long long k = 0; k < count; ++k)
        values.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    return values;
}

Mesh load_mesh(const std::string& base, std::ostream& err)
{
    std::vector<std::string> warnings;
    Mesh mesh = read_mesh(std::filesystem::path(base), &warnings);
    for (const auto& w : warnings)
        err << "warning: " << w << '\n';
    return mesh;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path);
    if (!f || !(f << text))
        throw Error(ErrorCode::io_error, "cannot write " + path.string());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Boundary-driven mesh warping", "femwarp"};
    app.require_subcommand(1);

    std::string mesh_base, spec_path, out_base, grid, csv_path, algorithm_name;
    bool stop_at_failure = false;

    auto* warp_cmd = app.add_subcommand("warp", "Warp a mesh with a deformation spec");
    warp_cmd->add_option("--mesh", mesh_base, "Input mesh base name (.node/.ele)")->required();
    warp_cmd->add_option("--spec", spec_path, "Deformation spec file")->required();
    warp_cmd->add_option("--out", out_base, "Output mesh base name")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a deformation over a parameter grid");
    sweep_cmd->add_option("--mesh", mesh_base, "Input mesh base name")->required();
    sweep_cmd->add_option("--spec", spec_path, "Deformation spec file")->required();
    sweep_cmd->add_option("--param-grid", grid, "a:b:step")->required();
    sweep_cmd->add_option("--algorithm", algorithm_name, "Override the spec's algorithm")
        ->check(CLI::IsMember({"femwarp", "small_step", "untangle", "hybrid"}));
    sweep_cmd->add_option("--csv", csv_path, "Write CSV here instead of standard output");
    sweep_cmd->add_flag("--stop-at-failure", stop_at_failure, "Stop after the first reversed row");

    auto* quality_cmd = app.add_subcommand("quality", "Report mesh quality");
    quality_cmd->add_option("--mesh", mesh_base, "Input mesh base name")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form reference values");
    oracle_cmd->require_subcommand(1);
    double oracle_r = 0.5, oracle_s = 0.5, oracle_theta = 0.0;
    auto* oracle_annulus = oracle_cmd->add_subcommand("annulus", "Annulus Laplace map");
    oracle_annulus->add_option("--r", oracle_r, "Inner radius")->required();
    oracle_annulus->add_option("--s", oracle_s, "Displaced inner radius")->required();
    oracle_annulus->add_option("--theta", oracle_theta, "Outer rotation (radians)")->required();

    auto* gen_cmd = app.add_subcommand("genmesh", "Generate a structured mesh");
    gen_cmd->require_subcommand(1);
    double gen_r = 0.5, width = 1.0, height = 1.0, jitter = 0.0;
    int rings = 8, sectors = 32, nx = 11, ny = 11;
    std::uint64_t seed = 1;
    auto* gen_annulus_cmd = gen_cmd->add_subcommand("annulus", "Annulus with outer radius 1");
    gen_annulus_cmd->add_option("--r", gen_r, "Inner radius");
    gen_annulus_cmd->add_option("--rings", rings, "Number of node rings (>= 2)");
    gen_annulus_cmd->add_option("--sectors", sectors, "Number of sectors (>= 8)");
    gen_annulus_cmd->add_option("--out", out_base, "Output mesh base name")->required();
    auto* gen_rect_cmd = gen_cmd->add_subcommand("rectangle", "Rectangle [0,width] x [0,height]");
    gen_rect_cmd->add_option("--width", width, "Width");
    gen_rect_cmd->add_option("--height", height, "Height");
    gen_rect_cmd->add_option("--nx", nx, "Nodes along x (>= 2)");
    gen_rect_cmd->add_option("--ny", ny, "Nodes along y (>= 2)");
    gen_rect_cmd->add_option("--jitter", jitter, "Interior node jitter in cell sizes");
    gen_rect_cmd->add_option("--seed", seed, "Jitter seed");
    gen_rect_cmd->add_option("--out", out_base, "Output mesh base name")->required();

    std::vector<std::string> storage{"femwarp"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_success;
    } catch (const CLI::ParseError& e) {
        err << "error: USAGE: " << one_line(e.what()) << '\n';
        return exit_error;
    }

    try {
        if (*warp_cmd) {
            const Mesh mesh = load_mesh(mesh_base, err);
            const DeformationSpec spec = load_deformation_spec(spec_path);
            const RunResult run = run_deformation(mesh, spec);
            write_mesh(run.mesh, out_base);
            std::ostringstream report;
            write_run_report(report, spec, run);
            write_file(out_base + ".report", report.str());
            out << report.str();
            return run.report.outcome == WarpOutcome::success ? exit_success : exit_reversed;
        }
        if (*sweep_cmd) {
            const Mesh mesh = load_mesh(mesh_base, err);
            DeformationSpec spec = load_deformation_spec(spec_path);
            if (!algorithm_name.empty()) {
                std::istringstream line("motion = affine\nalgorithm = " + algorithm_name);
                spec.algorithm = parse_deformation_spec(line).algorithm;
            }
            const std::string name = sweep_parameter(spec);
            std::vector<SweepRow> rows;
            for (double value : parse_grid(grid)) {
                const RunResult run = run_deformation(mesh, with_parameter(spec, value));
                rows.push_back({value, run.report.outcome, run.report.reversals, run.report.n_factorizations});
                if (stop_at_failure && run.report.outcome != WarpOutcome::success)
                    break;
            }
            std::ostringstream csv;
            write_sweep_csv(csv, rows);
            if (csv_path.empty())
                out << csv.str();
            else
                write_file(csv_path, csv.str());
            const auto best = last_success(rows);
            err << name << "_max=" << (best ? format_param(*best) : std::string("none")) << '\n';
            return exit_success;
        }
        if (*quality_cmd) {
            const Mesh mesh = load_mesh(mesh_base, err);
            write_quality(out, mesh, quality_report(mesh));
            return exit_success;
        }
        if (*oracle_annulus) {
            const analytic::AnnulusSpec s{oracle_r, oracle_s, oracle_theta};
            const auto c = analytic::annulus_coeffs(s);
            // Minimum over the annulus, attained on the inner circle.
            const double min_det = analytic::annulus_jac_det(s, Point(oracle_r, 0.0, 0.0));
            out << "a=" << format_double(c.a) << '\n'
                << "b=" << format_double(c.b) << '\n'
                << "c=" << format_double(c.c) << '\n'
                << "d=" << format_double(c.d) << '\n'
                << "type1_margin=" << format_double(analytic::type1_margin(s)) << '\n'
                << "predicate=" << (analytic::type1_predicate(s) ? "true" : "false") << '\n'
                << "min_jac_det=" << format_double(min_det) << '\n'
                << "cutoff_deg=" << format_double(analytic::type1_cutoff(oracle_r, oracle_s) * 180.0 / std::numbers::pi)
                << '\n';
            return exit_success;
        }
        if (*gen_annulus_cmd) {
            write_mesh(gen_annulus(gen_r, rings, sectors), out_base);
            return exit_success;
        }
        if (*gen_rect_cmd) {
            write_mesh(gen_rectangle(width, height, nx, ny, {jitter, seed}), out_base);
            return exit_success;
        }
    } catch (const Error& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "error: INTERNAL: " << one_line(e.what()) << '\n';
        return exit_error;
    }
    err << "error: USAGE: no command\n";
    return exit_error;
}

}  // namespace femwarp
