#pragma once

#include "femwarp/assembly.hpp"
#include "femwarp/mesh.hpp"
#include "femwarp/motion.hpp"
#include "femwarp/warp.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace femwarp {

/// A free vertex and the simplices around it. Each incident element lists
/// its vertex positions with the free vertex at `free_slot`; that position
/// is ignored in favour of `position`.
struct LocalSubmesh {
    int dim = 2;
    std::int32_t vertex = -1;
    Point position = Point::Zero();
    std::vector<std::array<Point, 4>> elements;
    std::vector<int> free_slot;

    /// Signed measure of incident element i with the free vertex at x.
    [[nodiscard]] double measure(std::size_t i, const Point& x) const;
    /// min_i measure(i, x)
    [[nodiscard]] double min_measure(const Point& x) const;
    /// Gradient of measure(i, .); the measure is affine in the free vertex.
    [[nodiscard]] Point measure_gradient(std::size_t i) const;
};

[[nodiscard]] LocalSubmesh local_submesh(const Mesh& mesh, std::int32_t vertex,
                                         const std::vector<std::int32_t>& incident_elements);

struct Reposition {
    Point position;
    double min_measure = 0.0;
    int pivots = 0;
};

/// Maximize the minimum incident signed measure over the free vertex position,
/// as a dense simplex LP with Bland's rule in a box of 10 cavity diameters.
/// Never returns a worse position than the input. Throws UNBOUNDED when the
/// optimum sits on the box, and INVALID_ARGUMENT for an empty submesh.
[[nodiscard]] Reposition maximin_reposition(const LocalSubmesh& sub);

enum class UntangleOutcome { success, stalled, max_sweeps };

[[nodiscard]] std::string_view to_string(UntangleOutcome outcome) noexcept;

struct UntangleResult {
    Mesh mesh;
    int sweeps = 0;
    UntangleOutcome outcome = UntangleOutcome::max_sweeps;
    std::size_t reversals = 0;
    // Bookkeeping over every vertex visit.
    std::size_t moves = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t unbounded = 0;
};

/// Sweep interior vertices in ascending id order, repositioning each with
/// `maximin_reposition`, until no element is reversed (SUCCESS), no vertex
/// moves more than 1e-12 in a sweep (STALLED), or `max_sweeps` is reached.
[[nodiscard]] UntangleResult untangle(const Mesh& mesh, int max_sweeps = 50);

struct HybridOptions {
    int max_sweeps = 50;
};

struct HybridResult {
    Mesh mesh;
    WarpReport report;
    bool untangler_used = false;
    UntangleResult untangle;
};

/// FEMWARP to the full motion, then untangle its output if it reversed.
[[nodiscard]] HybridResult hybrid_warp(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& motion,
                                       const HybridOptions& options = {});

/// Move the boundary to the full motion, keep interior nodes in place, and untangle.
[[nodiscard]] UntangleResult untangle_motion(const Mesh& mesh, const BoundaryMotion& motion, int max_sweeps = 50);

}  // namespace femwarp
