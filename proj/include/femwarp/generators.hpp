#pragma once

#include "femwarp/mesh.hpp"

#include <cstdint>

namespace femwarp {

/// Structured annulus with outer radius 1 and inner radius r. Rings are
/// evenly spaced in radius; each ring/sector quad is split into two
/// positively oriented triangles. The innermost and outermost rings are the
/// boundary.
[[nodiscard]] Mesh gen_annulus(double r, int n_rings, int n_sectors);

struct RectangleOptions {
    // Interior nodes are displaced by up to `jitter` cell sizes per axis,
    // deterministically from `seed`. 0 gives the plain grid.
    double jitter = 0.0;
    std::uint64_t seed = 1;
};

/// Structured [0,width] x [0,height] grid with nx x ny nodes, every cell split
/// along the same diagonal, perimeter nodes marked boundary.
[[nodiscard]] Mesh gen_rectangle(double width, double height, int nx, int ny, const RectangleOptions& options = {});

}  // namespace femwarp
