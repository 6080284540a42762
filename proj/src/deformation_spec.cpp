#include "femwarp/deformation_spec.hpp"

#include "femwarp/error.hpp"
#include "femwarp/mesh_io.hpp"
#include "femwarp/quality.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace femwarp {

std::string_view to_string(MotionKind kind) noexcept
{
    switch (kind) {
    case MotionKind::affine: return "affine";
    case MotionKind::annulus: return "annulus";
    case MotionKind::shear: return "shear";
    case MotionKind::paper3d: return "paper3d";
    case MotionKind::tabulated: return "tabulated";
    }
    return "unknown";
}

std::string_view to_string(Algorithm algorithm) noexcept
{
    switch (algorithm) {
    case Algorithm::femwarp: return "femwarp";
    case Algorithm::small_step: return "small_step";
    case Algorithm::untangle: return "untangle";
    case Algorithm::hybrid: return "hybrid";
    }
    return "unknown";
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(ErrorCode::invalid_spec, what);
}

std::vector<std::string> words(const std::string& value)
{
    std::istringstream ss(value);
    std::vector<std::string> out;
    for (std::string w; ss >> w;)
        out.push_back(w);
    return out;
}

double to_double(const std::string& key, const std::string& word)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc{} || ptr != word.data() + word.size() || !std::isfinite(v))
        invalid(key + ": '" + word + "' is not a finite number");
    return v;
}

double scalar(const std::string& key, const std::string& value)
{
    const auto w = words(value);
    if (w.size() != 1)
        invalid(key + " expects one number");
    return to_double(key, w[0]);
}

std::vector<double> vector_value(const std::string& key, const std::string& value)
{
    std::vector<double> out;
    for (const auto& w : words(value))
        out.push_back(to_double(key, w));
    return out;
}

template <typename Enum, std::size_t N>
Enum choice(const std::string& key, const std::string& value, const std::array<std::pair<const char*, Enum>, N>& options)
{
    for (const auto& [name, e] : options)
        if (value == name)
            return e;
    std::string names;
    for (const auto& [name, e] : options)
        names += (names.empty() ? "" : "|") + std::string(name);
    invalid(key + " must be one of " + names + ", got '" + value + "'");
}

const std::map<std::string, std::set<MotionKind>>& motion_keys()
{
    static const std::map<std::string, std::set<MotionKind>> keys{
        {"L", {MotionKind::affine}},
        {"v", {MotionKind::affine}},
        {"r", {MotionKind::annulus}},
        {"s", {MotionKind::annulus}},
        {"theta_outer", {MotionKind::annulus}},
        {"theta_inner", {MotionKind::annulus}},
        {"alpha", {MotionKind::shear, MotionKind::paper3d}},
        {"frames", {MotionKind::tabulated}},
    };
    return keys;
}

}  // namespace

DeformationSpec parse_deformation_spec(std::istream& in, const std::filesystem::path& base_dir)
{
    std::map<std::string, std::pair<std::string, std::size_t>> entries;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string content = trim(line);
        if (content.empty())
            continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorCode::parse_error, "line " + std::to_string(number) + ": empty key or value");
        if (!entries.emplace(key, std::pair{value, number}).second)
            invalid("line " + std::to_string(number) + ": '" + key + "' given more than once");
    }

    DeformationSpec spec;
    const auto motion = entries.find("motion");
    if (motion == entries.end())
        invalid("no motion given");
    spec.motion = choice<MotionKind, 5>("motion", motion->second.first,
                                        {{{"affine", MotionKind::affine},
                                          {"annulus", MotionKind::annulus},
                                          {"shear", MotionKind::shear},
                                          {"paper3d", MotionKind::paper3d},
                                          {"tabulated", MotionKind::tabulated}}});

    for (const auto& [key, entry] : entries) {
        const auto& value = entry.first;
        if (const auto owner = motion_keys().find(key); owner != motion_keys().end()) {
            if (!owner->second.contains(spec.motion))
                invalid("'" + key + "' does not apply to motion " + std::string(to_string(spec.motion)));
            if (key == "L")
                spec.linear = vector_value(key, value);
            else if (key == "v")
                spec.shift = vector_value(key, value);
            else if (key == "r")
                spec.r = scalar(key, value);
            else if (key == "s")
                spec.s = scalar(key, value);
            else if (key == "theta_outer")
                spec.theta_outer = scalar(key, value);
            else if (key == "theta_inner")
                spec.theta_inner = scalar(key, value);
            else if (key == "alpha")
                spec.alpha = scalar(key, value);
            else if (key == "frames")
                for (const auto& w : words(value)) {
                    std::filesystem::path p(w);
                    spec.frames.push_back(p.is_absolute() ? p : base_dir / p);
                }
        } else if (key == "motion") {
            continue;
        } else if (key == "algorithm") {
            spec.algorithm = choice<Algorithm, 4>(key, value,
                                                  {{{"femwarp", Algorithm::femwarp},
                                                    {"small_step", Algorithm::small_step},
                                                    {"untangle", Algorithm::untangle},
                                                    {"hybrid", Algorithm::hybrid}}});
        } else if (key == "scheme") {
            spec.scheme = choice<WeightScheme, 3>(key, value,
                                                  {{{"fem", WeightScheme::fem},
                                                    {"uniform", WeightScheme::uniform},
                                                    {"log_barrier", WeightScheme::log_barrier}}});
        } else if (key == "min_step") {
            spec.small_step.min_step = scalar(key, value);
        } else if (key == "max_step") {
            spec.small_step.max_step = scalar(key, value);
        } else if (key == "step_mode") {
            spec.small_step.mode =
                choice<StepMode, 2>(key, value, {{{"variable", StepMode::variable}, {"constant", StepMode::constant}}});
        } else if (key == "min_step_param") {
            spec.min_step_param = scalar(key, value);
        } else if (key == "max_sweeps") {
            const double n = scalar(key, value);
            if (n != std::floor(n) || n < 1 || n > 1e6)
                invalid("max_sweeps must be a positive integer");
            spec.max_sweeps = static_cast<int>(n);
        } else if (key == "sweep") {
            spec.sweep_parameter = value;
        } else {
            invalid("unknown key '" + key + "'");
        }
    }

    if (spec.small_step.min_step <= 0.0 || spec.small_step.min_step > 1.0)
        invalid("min_step must lie in (0, 1]");
    if (spec.small_step.max_step <= 0.0 || spec.small_step.max_step > 1.0)
        invalid("max_step must lie in (0, 1]");
    if (spec.min_step_param && *spec.min_step_param <= 0.0)
        invalid("min_step_param must be positive");
    if (spec.motion == MotionKind::annulus) {
        if (!(spec.r > 0.0 && spec.r < 1.0))
            invalid("r must lie in (0, 1)");
        if (spec.s && !(*spec.s >= spec.r && *spec.s < 1.0))
            invalid("s must lie in [r, 1)");
    }
    if (spec.motion == MotionKind::tabulated && spec.frames.empty())
        invalid("tabulated motion needs at least one frame");
    if (!spec.sweep_parameter.empty()) {
        static const std::map<MotionKind, std::set<std::string>> sweepable{
            {MotionKind::annulus, {"theta_inner", "theta_outer", "s"}},
            {MotionKind::shear, {"alpha"}},
            {MotionKind::paper3d, {"alpha"}},
        };
        const auto it = sweepable.find(spec.motion);
        if (it == sweepable.end() || !it->second.contains(spec.sweep_parameter))
            invalid("cannot sweep '" + spec.sweep_parameter + "' for motion " + std::string(to_string(spec.motion)));
    }
    return spec;
}

DeformationSpec load_deformation_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::io_error, "cannot open " + path.string());
    return parse_deformation_spec(in, path.parent_path());
}

BoundaryMotion make_motion(const DeformationSpec& spec, const Mesh& mesh)
{
    const int d = mesh.dim();
    switch (spec.motion) {
    case MotionKind::affine: {
        Eigen::MatrixXd linear = Eigen::MatrixXd::Identity(d, d);
        Eigen::VectorXd shift = Eigen::VectorXd::Zero(d);
        if (!spec.linear.empty()) {
            if (spec.linear.size() != static_cast<std::size_t>(d * d))
                throw Error(ErrorCode::dimension_mismatch,
                            "L needs " + std::to_string(d * d) + " entries for a " + std::to_string(d) + "D mesh");
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    linear(i, j) = spec.linear[i * d + j];
        }
        if (!spec.shift.empty()) {
            if (spec.shift.size() != static_cast<std::size_t>(d))
                throw Error(ErrorCode::dimension_mismatch,
                            "v needs " + std::to_string(d) + " entries for a " + std::to_string(d) + "D mesh");
            for (int i = 0; i < d; ++i)
                shift(i) = spec.shift[i];
        }
        return BoundaryMotion::affine(linear, shift);
    }
    case MotionKind::annulus:
        if (d != 2)
            throw Error(ErrorCode::dimension_mismatch, "annulus motion needs a 2D mesh");
        return annulus_rotation_motion(spec.r, spec.s.value_or(spec.r), spec.theta_outer, spec.theta_inner);
    case MotionKind::shear:
        if (d != 2)
            throw Error(ErrorCode::dimension_mismatch, "shear motion needs a 2D mesh");
        return rectangle_shear_motion(spec.alpha);
    case MotionKind::paper3d:
        if (d != 3)
            throw Error(ErrorCode::dimension_mismatch, "paper3d motion needs a 3D mesh");
        return paper3d_motion(spec.alpha);
    case MotionKind::tabulated: {
        const auto ids = mesh.boundary_ids();
        std::vector<std::vector<Point>> frames{mesh.boundary_coords()};
        for (const auto& path : spec.frames) {
            int frame_dim = 0;
            const auto coords = read_node_coords(path, &frame_dim);
            if (frame_dim != d || coords.size() != mesh.num_nodes())
                throw Error(ErrorCode::dimension_mismatch, path.string() + " does not match the mesh");
            std::vector<Point> frame;
            frame.reserve(ids.size());
            for (auto id : ids)
                frame.push_back(coords[id]);
            frames.push_back(std::move(frame));
        }
        return BoundaryMotion::tabulated(std::move(frames));
    }
    }
    throw Error(ErrorCode::invalid_spec, "unknown motion");
}

std::string sweep_parameter(const DeformationSpec& spec)
{
    if (!spec.sweep_parameter.empty())
        return spec.sweep_parameter;
    switch (spec.motion) {
    case MotionKind::annulus: return "theta_outer";
    case MotionKind::shear:
    case MotionKind::paper3d: return "alpha";
    default: break;
    }
    throw Error(ErrorCode::invalid_spec, "motion " + std::string(to_string(spec.motion)) + " has no sweep parameter");
}

DeformationSpec with_parameter(const DeformationSpec& spec, double value)
{
    DeformationSpec out = spec;
    const std::string name = sweep_parameter(spec);
    if (name == "alpha")
        out.alpha = value;
    else if (name == "theta_inner")
        out.theta_inner = value;
    else if (name == "theta_outer")
        out.theta_outer = value;
    else if (name == "s")
        out.s = value;
    return out;
}

namespace {

double parameter_value(const DeformationSpec& spec)
{
    const std::string name = sweep_parameter(spec);
    if (name == "alpha")
        return spec.alpha;
    if (name == "theta_inner")
        return spec.theta_inner;
    if (name == "theta_outer")
        return spec.theta_outer;
    return spec.s.value_or(spec.r) - spec.r;
}

SmallStepOptions step_options(const DeformationSpec& spec)
{
    SmallStepOptions opts = spec.small_step;
    if (spec.min_step_param) {
        const double magnitude = std::abs(parameter_value(spec));
        opts.min_step = magnitude > 0.0 ? std::min(1.0, *spec.min_step_param / magnitude) : 1.0;
    }
    return opts;
}

WarpReport untangle_report(const UntangleResult& u)
{
    WarpReport report;
    report.reversals = u.reversals;
    report.outcome = u.reversals == 0 ? WarpOutcome::success : WarpOutcome::reversed;
    report.t_reached = 1.0;
    report.quality = quality_report(u.mesh);
    return report;
}

}  // namespace

RunResult run_deformation(const Mesh& mesh, const DeformationSpec& spec)
{
    const BoundaryMotion motion = make_motion(spec, mesh);

    if (spec.motion == MotionKind::tabulated &&
        (spec.algorithm == Algorithm::femwarp || spec.algorithm == Algorithm::small_step)) {
        TrajectoryOptions opts;
        opts.small_step = spec.algorithm == Algorithm::small_step;
        opts.small_step_options = spec.small_step;
        TrajectoryResult traj = warp_trajectory(mesh, spec.scheme, motion, opts);
        RunResult out{traj.meshes.back(), traj.reports.back(), false, std::nullopt, traj.failed_frame};
        out.report.n_factorizations = 0;
        out.report.steps.clear();
        for (const auto& r : traj.reports) {
            out.report.n_factorizations += r.n_factorizations;
            out.report.steps.insert(out.report.steps.end(), r.steps.begin(), r.steps.end());
        }
        const double legs = static_cast<double>(motion.num_frames() - 1);
        const double done = static_cast<double>(traj.reports.size() - (traj.failed_frame ? 1 : 0));
        out.report.t_reached = (done + (traj.failed_frame ? traj.reports.back().t_reached : 0.0)) / legs;
        return out;
    }

    switch (spec.algorithm) {
    case Algorithm::femwarp: {
        WarpResult r = femwarp(mesh, spec.scheme, motion);
        return {std::move(r.mesh), std::move(r.report), false, std::nullopt, std::nullopt};
    }
    case Algorithm::small_step: {
        WarpResult r = small_step_femwarp(mesh, spec.scheme, motion, step_options(spec));
        return {std::move(r.mesh), std::move(r.report), false, std::nullopt, std::nullopt};
    }
    case Algorithm::untangle: {
        UntangleResult u = untangle_motion(mesh, motion, spec.max_sweeps);
        WarpReport report = untangle_report(u);
        Mesh out_mesh = u.mesh;
        return {std::move(out_mesh), std::move(report), true, std::move(u), std::nullopt};
    }
    case Algorithm::hybrid: {
        HybridResult h = hybrid_warp(mesh, spec.scheme, motion, {spec.max_sweeps});
        std::optional<UntangleResult> u;
        if (h.untangler_used)
            u = std::move(h.untangle);
        return {std::move(h.mesh), std::move(h.report), h.untangler_used, std::move(u), std::nullopt};
    }
    }
    throw Error(ErrorCode::invalid_spec, "unknown algorithm");
}

}  // namespace femwarp
