#pragma once

#include "femwarp/assembly.hpp"
#include "femwarp/mesh.hpp"
#include "femwarp/motion.hpp"
#include "femwarp/quality.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace femwarp {

enum class WarpOutcome { success, reversed };

[[nodiscard]] std::string_view to_string(WarpOutcome outcome) noexcept;

struct StepRecord {
    double t_start = 0.0;
    double t_end = 0.0;
    bool accepted = false;
    std::size_t reversals = 0;
};

struct WarpReport {
    WarpOutcome outcome = WarpOutcome::success;
    std::vector<StepRecord> steps;
    // Numeric factorizations performed (weight systems built).
    int n_factorizations = 0;
    // Fraction of the motion applied to the returned mesh.
    double t_reached = 0.0;
    std::size_t reversals = 0;
    QualityReport quality;
};

struct WarpResult {
    Mesh mesh;
    WarpReport report;
};

/// Solve A_I X_I = -A_B X_B for the interior block given boundary targets
/// (boundary_ids order). Returns an (m x dim) block.
[[nodiscard]] Eigen::MatrixXd solve_interior(const WeightSystem& weights, std::span<const Point> boundary_targets,
                                             int dim);

/// Mesh with boundary nodes at `boundary_targets` and interior nodes at `interior`.
[[nodiscard]] Mesh place_nodes(const Mesh& mesh, const WeightSystem& weights, std::span<const Point> boundary_targets,
                               const Eigen::MatrixXd& interior);

/// One linear solve with weights built from `mesh`. The mesh is returned even
/// when elements reverse; `report.outcome` says which.
[[nodiscard]] WarpResult femwarp_step(const Mesh& mesh, const WeightSystem& weights,
                                      std::span<const Point> boundary_targets);

/// Build weights for `scheme` and apply the full motion in one step.
[[nodiscard]] WarpResult femwarp(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& motion);

enum class StepMode { variable, constant };

struct SmallStepOptions {
    // Smallest increment of t tried before giving up.
    double min_step = 1.0 / 128.0;
    // Largest increment tried from any accepted configuration.
    double max_step = 1.0;
    StepMode mode = StepMode::variable;
};

/// Homotopy warping. From the current t, try the largest allowed increment;
/// halve it on reversal, reusing the factorization, until it is accepted or
/// drops below `min_step`. Weights are rebuilt from each accepted mesh.
/// In constant mode every increment is `min_step` and a reversal ends the run.
[[nodiscard]] WarpResult small_step_femwarp(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& motion,
                                            const SmallStepOptions& options = {});

struct TrajectoryOptions {
    bool small_step = false;
    SmallStepOptions small_step_options;
    bool continue_after_reversal = false;
};

struct TrajectoryResult {
    // One entry per frame after the first.
    std::vector<Mesh> meshes;
    std::vector<WarpReport> reports;
    // First frame index (into the motion's frames) that ended reversed.
    std::optional<std::size_t> failed_frame;
};

/// Warp frame by frame through a tabulated motion whose frame 0 is the
/// mesh's current boundary.
[[nodiscard]] TrajectoryResult warp_trajectory(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& frames,
                                               const TrajectoryOptions& options = {});

}  // namespace femwarp
