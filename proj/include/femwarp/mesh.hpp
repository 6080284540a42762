#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace femwarp {

/// Node position. 2D meshes keep z = 0.
using Point = Eigen::Vector3d;

/// Simplex connectivity. Triangles use the first three slots; the fourth is -1.
using Element = std::array<std::int32_t, 4>;

/// Simplicial mesh with fixed connectivity and a boundary-node marking.
///
/// A Mesh is immutable. Warping produces a new Mesh through `with_coords`,
/// sharing the same connectivity and boundary marking. Construction does not
/// check invariants; call `validate()` for that.
class Mesh {
public:
    Mesh() = default;
    Mesh(int dim, std::vector<Point> coords, std::vector<Element> elements, std::vector<bool> boundary);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int nodes_per_element() const noexcept { return dim_ + 1; }
    [[nodiscard]] std::size_t num_nodes() const noexcept { return coords_.size(); }
    [[nodiscard]] std::size_t num_elements() const noexcept { return elements_.size(); }

    [[nodiscard]] std::span<const Point> coords() const noexcept { return coords_; }
    [[nodiscard]] const Point& coord(std::size_t node) const { return coords_[node]; }
    [[nodiscard]] std::span<const Element> elements() const noexcept { return elements_; }
    [[nodiscard]] const Element& element(std::size_t e) const { return elements_[e]; }
    [[nodiscard]] std::span<const std::int32_t> element_nodes(std::size_t e) const
    {
        return {elements_[e].data(), static_cast<std::size_t>(dim_ + 1)};
    }

    [[nodiscard]] bool is_boundary(std::size_t node) const { return boundary_[node]; }
    [[nodiscard]] const std::vector<bool>& boundary_mask() const noexcept { return boundary_; }

    // Ascending node ids; the orderings used for the interior/boundary blocks.
    [[nodiscard]] std::span<const std::int32_t> interior_ids() const noexcept { return interior_ids_; }
    [[nodiscard]] std::span<const std::int32_t> boundary_ids() const noexcept { return boundary_ids_; }

    /// Vertices of element `e`, in connectivity order.
    [[nodiscard]] std::array<Point, 4> element_points(std::size_t e) const;

    /// Same connectivity and boundary, new coordinates.
    [[nodiscard]] Mesh with_coords(std::vector<Point> coords) const;

    /// Boundary node coordinates in `boundary_ids()` order.
    [[nodiscard]] std::vector<Point> boundary_coords() const;

    /// Sorted neighbor lists: nodes sharing an element with each node.
    [[nodiscard]] std::vector<std::vector<std::int32_t>> node_neighbors() const;

    /// Element ids incident to each node, ascending.
    [[nodiscard]] std::vector<std::vector<std::int32_t>> node_elements() const;

private:
    int dim_ = 2;
    std::vector<Point> coords_;
    std::vector<Element> elements_;
    std::vector<bool> boundary_;
    std::vector<std::int32_t> interior_ids_;
    std::vector<std::int32_t> boundary_ids_;
};

}  // namespace femwarp
