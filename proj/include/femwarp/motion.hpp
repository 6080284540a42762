#pragma once

#include "femwarp/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace femwarp {

/// Boundary deformation parameterized by the fraction t in [0, 1] of the
/// full motion. evaluate(original, 0) returns `original`; evaluate(original, 1)
/// is the user-supplied deformation.
class BoundaryMotion {
public:
    enum class Kind { affine, parametric, tabulated };

    /// Point map at fraction t; must satisfy map(p, 0) = p.
    using PointMap = std::function<Point(const Point&, double t)>;

    /// x -> L x + v, interpolated as ((1-t) I + t L) x + t v so every
    /// intermediate configuration is affine.
    [[nodiscard]] static BoundaryMotion affine(const Eigen::MatrixXd& linear, const Eigen::VectorXd& shift);
    [[nodiscard]] static BoundaryMotion parametric(std::string name, PointMap map, int dim = 0);
    /// frames[k][i] is boundary node i (in boundary_ids order) at frame k.
    /// Frame 0 is t = 0; t moves piecewise linearly through the frames.
    [[nodiscard]] static BoundaryMotion tabulated(std::vector<std::vector<Point>> frames);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    /// Spatial dimension the motion is defined for; 0 if any.
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t num_frames() const noexcept { return frames_.size(); }
    [[nodiscard]] const std::vector<Point>& frame(std::size_t k) const { return frames_.at(k); }

    /// Target coordinates for every boundary node at fraction t.
    [[nodiscard]] std::vector<Point> evaluate(std::span<const Point> original_boundary, double t) const;

private:
    Kind kind_ = Kind::affine;
    std::string name_;
    int dim_ = 0;
    PointMap map_;
    std::vector<std::vector<Point>> frames_;
};

/// Outer circle rotated by theta_outer, inner circle (radius r) rotated by
/// theta_inner and moved radially to radius s. Nodes closer to the inner
/// circle than to the outer one belong to the inner boundary.
[[nodiscard]] BoundaryMotion annulus_rotation_motion(double r, double s, double theta_outer, double theta_inner);

/// (x, y) -> (x, y + t alpha x (2 - x)).
[[nodiscard]] BoundaryMotion rectangle_shear_motion(double alpha);

/// Straight-line blend from the identity to the nonlinear 3D test map.
[[nodiscard]] BoundaryMotion paper3d_motion(double alpha);

}  // namespace femwarp
