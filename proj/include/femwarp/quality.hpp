#pragma once

#include "femwarp/mesh.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace femwarp {

/// Signed area (2D) or volume (3D) of the simplex with vertices `pts[0..dim]`.
/// Positive for counter-clockwise triangles and right-handed tetrahedra.
[[nodiscard]] double signed_measure(std::span<const Point> pts, int dim);
[[nodiscard]] double signed_measure(const Mesh& mesh, std::size_t element);

struct ReversalCount {
    std::size_t count = 0;
    std::vector<std::int32_t> elements;
};

/// Elements whose signed measure is <= 0.
[[nodiscard]] ReversalCount count_reversals(const Mesh& mesh);

enum class DegeneratePolicy { infinity, throw_error };

/// Longest edge over shortest altitude.
[[nodiscard]] double aspect_ratio(std::span<const Point> pts, int dim,
                                  DegeneratePolicy policy = DegeneratePolicy::infinity);

/// Inverse mean ratio relative to the unit-edge regular simplex; 1 for the
/// regular simplex, larger for distorted ones. Throws REVERSED_ELEMENT for
/// nonpositive measure.
[[nodiscard]] double inverse_mean_ratio(std::span<const Point> pts, int dim);

[[nodiscard]] double max_edge_length(std::span<const Point> pts, int dim);
[[nodiscard]] double max_edge_length(const Mesh& mesh);

enum class ViolationKind {
    bad_index,
    degenerate_element,
    orphan_node,
    reversed_element,
};

struct Violation {
    ViolationKind kind;
    std::int64_t element = -1;
    std::int64_t node = -1;
    std::string message;
};

[[nodiscard]] std::string_view to_string(ViolationKind kind) noexcept;

/// Structural and orientation checks. An empty result means the mesh is valid.
[[nodiscard]] std::vector<Violation> validate(const Mesh& mesh);

struct Stats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct QualityReport {
    Stats measure;
    Stats aspect;
    // Over positively oriented elements only.
    Stats inverse_mean_ratio;
    std::size_t reversals = 0;
    // Elements with 0 < measure < 1e-12 * h^d.
    std::size_t near_degenerate = 0;
    double h = 0.0;
};

[[nodiscard]] QualityReport quality_report(const Mesh& mesh);

}  // namespace femwarp
