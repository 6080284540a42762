#include "femwarp/warp.hpp"

#include "femwarp/error.hpp"

#include <algorithm>
#include <string>

namespace femwarp {

namespace {

void check_dim(const Mesh& mesh, const BoundaryMotion& motion)
{
    if (motion.dim() != 0 && motion.dim() != mesh.dim())
        throw Error(ErrorCode::dimension_mismatch, "motion '" + motion.name() + "' is " + std::to_string(motion.dim()) +
                                                       "D but the mesh is " + std::to_string(mesh.dim()) + "D");
}

}  // namespace

std::string_view to_string(WarpOutcome outcome) noexcept
{
    return outcome == WarpOutcome::success ? "SUCCESS" : "REVERSED";
}

Eigen::MatrixXd solve_interior(const WeightSystem& weights, std::span<const Point> boundary_targets, int dim)
{
    if (boundary_targets.size() != weights.num_boundary())
        throw Error(ErrorCode::dimension_mismatch, "boundary targets do not cover every boundary node");
    Eigen::MatrixXd xb(static_cast<Eigen::Index>(boundary_targets.size()), dim);
    for (std::size_t i = 0; i < boundary_targets.size(); ++i)
        xb.row(static_cast<Eigen::Index>(i)) = boundary_targets[i].head(dim).transpose();
    const Eigen::MatrixXd rhs = -(weights.a_boundary * xb);
    return solve_multi(weights.factorization, rhs);
}

Mesh place_nodes(const Mesh& mesh, const WeightSystem& weights, std::span<const Point> boundary_targets,
                 const Eigen::MatrixXd& interior)
{
    const int d = mesh.dim();
    std::vector<Point> coords(mesh.coords().begin(), mesh.coords().end());
    for (std::size_t i = 0; i < weights.boundary_ids.size(); ++i)
        coords[weights.boundary_ids[i]] = boundary_targets[i];
    for (std::size_t i = 0; i < weights.interior_ids.size(); ++i) {
        Point p = Point::Zero();
        p.head(d) = interior.row(static_cast<Eigen::Index>(i)).transpose();
        coords[weights.interior_ids[i]] = p;
    }
    return mesh.with_coords(std::move(coords));
}

WarpResult femwarp_step(const Mesh& mesh, const WeightSystem& weights, std::span<const Point> boundary_targets)
{
    const Eigen::MatrixXd interior = solve_interior(weights, boundary_targets, mesh.dim());
    WarpResult result{place_nodes(mesh, weights, boundary_targets, interior), {}};
    const auto reversals = count_reversals(result.mesh).count;
    result.report.outcome = reversals == 0 ? WarpOutcome::success : WarpOutcome::reversed;
    result.report.reversals = reversals;
    result.report.t_reached = reversals == 0 ? 1.0 : 0.0;
    result.report.steps.push_back({0.0, 1.0, reversals == 0, reversals});
    result.report.quality = quality_report(result.mesh);
    return result;
}

WarpResult femwarp(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& motion)
{
    check_dim(mesh, motion);
    const WeightSystem weights = build_weights(mesh, scheme);
    const auto targets = motion.evaluate(mesh.boundary_coords(), 1.0);
    WarpResult result = femwarp_step(mesh, weights, targets);
    result.report.n_factorizations = 1;
    return result;
}

WarpResult small_step_femwarp(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& motion,
                              const SmallStepOptions& options)
{
    if (!(options.min_step > 0.0) || !(options.max_step > 0.0))
        throw Error(ErrorCode::invalid_argument, "small-step increments must be positive");
    check_dim(mesh, motion);

    const std::vector<Point> original_boundary = mesh.boundary_coords();
    WarpReport report;
    Mesh current = mesh;
    WeightSystem weights = build_weights(current, scheme);
    report.n_factorizations = 1;
    double t = 0.0;
    bool failed = false;

    while (t < 1.0 && !failed) {
        const double remaining = 1.0 - t;
        double increment = options.mode == StepMode::constant ? options.min_step : options.max_step;
        increment = std::min(increment, remaining);
        for (;;) {
            const double t_end = increment >= remaining ? 1.0 : t + increment;
            const auto targets = motion.evaluate(original_boundary, t_end);
            Mesh trial = place_nodes(current, weights, targets, solve_interior(weights, targets, mesh.dim()));
            const auto reversals = count_reversals(trial).count;
            report.steps.push_back({t, t_end, reversals == 0, reversals});
            if (reversals == 0) {
                current = std::move(trial);
                t = t_end;
                break;
            }
            report.reversals = reversals;
            increment *= 0.5;
            if (options.mode == StepMode::constant || increment < options.min_step) {
                failed = true;
                break;
            }
        }
        if (!failed && t < 1.0) {
            weights = build_weights(current, scheme);
            ++report.n_factorizations;
        }
    }

    report.t_reached = t;
    report.outcome = failed ? WarpOutcome::reversed : WarpOutcome::success;
    if (!failed)
        report.reversals = 0;
    report.quality = quality_report(current);
    return {std::move(current), std::move(report)};
}

TrajectoryResult warp_trajectory(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& frames,
                                 const TrajectoryOptions& options)
{
    if (frames.kind() != BoundaryMotion::Kind::tabulated)
        throw Error(ErrorCode::invalid_argument, "trajectory warping needs a tabulated motion");
    if (frames.frame(0).size() != mesh.boundary_ids().size())
        throw Error(ErrorCode::dimension_mismatch, "trajectory frames do not cover every boundary node");

    TrajectoryResult out;
    Mesh current = mesh;
    for (std::size_t k = 1; k < frames.num_frames(); ++k) {
        WarpResult step;
        if (options.small_step) {
            const auto leg = BoundaryMotion::tabulated({current.boundary_coords(), frames.frame(k)});
            step = small_step_femwarp(current, scheme, leg, options.small_step_options);
        } else {
            const WeightSystem weights = build_weights(current, scheme);
            step = femwarp_step(current, weights, frames.frame(k));
            step.report.n_factorizations = 1;
        }
        const bool reversed = step.report.outcome == WarpOutcome::reversed;
        current = step.mesh;
        out.meshes.push_back(std::move(step.mesh));
        out.reports.push_back(std::move(step.report));
        if (reversed) {
            if (!out.failed_frame)
                out.failed_frame = k;
            if (!options.continue_after_reversal)
                break;
        }
    }
    return out;
}

}  // namespace femwarp
