#include "femwarp/motion.hpp"

#include "femwarp/analytic.hpp"
#include "femwarp/error.hpp"

#include <algorithm>
#include <cmath>

namespace femwarp {

BoundaryMotion BoundaryMotion::affine(const Eigen::MatrixXd& linear, const Eigen::VectorXd& shift)
{
    const auto d = linear.rows();
    if (linear.cols() != d || shift.size() != d || (d != 2 && d != 3))
        throw Error(ErrorCode::dimension_mismatch, "affine motion needs a square 2x2 or 3x3 matrix and matching shift");
    Eigen::Matrix3d l = Eigen::Matrix3d::Identity();
    l.topLeftCorner(d, d) = linear;
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    v.head(d) = shift;
    BoundaryMotion m;
    m.kind_ = Kind::affine;
    m.name_ = "affine";
    m.dim_ = static_cast<int>(d);
    m.map_ = [l, v](const Point& p, double t) -> Point {
        const Eigen::Matrix3d lt = (1.0 - t) * Eigen::Matrix3d::Identity() + t * l;
        return lt * p + t * v;
    };
    return m;
}

BoundaryMotion BoundaryMotion::parametric(std::string name, PointMap map, int dim)
{
    BoundaryMotion m;
    m.kind_ = Kind::parametric;
    m.name_ = std::move(name);
    m.dim_ = dim;
    m.map_ = std::move(map);
    return m;
}

BoundaryMotion BoundaryMotion::tabulated(std::vector<std::vector<Point>> frames)
{
    if (frames.size() < 2)
        throw Error(ErrorCode::invalid_argument, "tabulated motion needs at least two frames");
    for (const auto& f : frames)
        if (f.size() != frames.front().size())
            throw Error(ErrorCode::dimension_mismatch, "tabulated frames differ in boundary node count");
    BoundaryMotion m;
    m.kind_ = Kind::tabulated;
    m.name_ = "tabulated";
    m.frames_ = std::move(frames);
    return m;
}

std::vector<Point> BoundaryMotion::evaluate(std::span<const Point> original_boundary, double t) const
{
    t = std::clamp(t, 0.0, 1.0);
    std::vector<Point> out(original_boundary.begin(), original_boundary.end());
    if (kind_ == Kind::tabulated) {
        if (original_boundary.size() != frames_.front().size())
            throw Error(ErrorCode::dimension_mismatch, "tabulated frames do not cover every boundary node");
        if (t == 0.0)
            return out;
        const double pos = t * static_cast<double>(frames_.size() - 1);
        const auto k = std::min(static_cast<std::size_t>(pos), frames_.size() - 2);
        const double u = pos - static_cast<double>(k);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = (1.0 - u) * frames_[k][i] + u * frames_[k + 1][i];
        return out;
    }
    if (t == 0.0)
        return out;
    for (auto& p : out)
        p = map_(p, t);
    return out;
}

BoundaryMotion annulus_rotation_motion(double r, double s, double theta_outer, double theta_inner)
{
    if (!(r > 0.0 && r < 1.0 && s > 0.0 && s < 1.0))
        throw Error(ErrorCode::invalid_spec, "annulus motion requires radii in (0, 1)");
    const double mid = 0.5 * (r + 1.0);
    return BoundaryMotion::parametric("annulus", [=](const Point& p, double t) -> Point {
        const bool inner = p.head<2>().norm() < mid;
        const double angle = t * (inner ? theta_inner : theta_outer);
        const double scale = inner ? (r + t * (s - r)) / r : 1.0;
        const double c = std::cos(angle);
        const double sn = std::sin(angle);
        return {scale * (c * p.x() - sn * p.y()), scale * (sn * p.x() + c * p.y()), 0.0};
    }, 2);
}

BoundaryMotion rectangle_shear_motion(double alpha)
{
    return BoundaryMotion::parametric("shear", [alpha](const Point& p, double t) {
        return analytic::rectangle_shear_map(t * alpha, p);
    }, 2);
}

BoundaryMotion paper3d_motion(double alpha)
{
    return BoundaryMotion::parametric("paper3d", [alpha](const Point& p, double t) -> Point {
        return (1.0 - t) * p + t * analytic::paper3d_map(alpha, p);
    }, 3);
}

}  // namespace femwarp
