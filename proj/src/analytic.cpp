#include "femwarp/analytic.hpp"

#include "femwarp/error.hpp"
#include "femwarp/quality.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace femwarp::analytic {

namespace {

constexpr double radius_slack = 1e-9;

Eigen::Matrix2d rotation(double angle)
{
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle),
         std::sin(angle), std::cos(angle);
    return r;
}

const Eigen::Matrix2d quarter_turn = (Eigen::Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();

void check_in_annulus(double r, const Point& p)
{
    const double rho = p.head<2>().norm();
    if (rho == 0.0 || rho < r - radius_slack || rho > 1.0 + radius_slack)
        throw Error(ErrorCode::domain_error, "point at radius " + std::to_string(rho) + " is outside the annulus");
}

}  // namespace

void check_spec(const AnnulusSpec& spec)
{
    if (!(spec.r > 0.0 && spec.r < 1.0 && spec.s >= spec.r && spec.s < 1.0))
        throw Error(ErrorCode::invalid_spec, "annulus requires 0 < r <= s < 1");
}

AnnulusCoeffs annulus_coeffs(const AnnulusSpec& spec)
{
    check_spec(spec);
    const double r = spec.r;
    const double s = spec.s;
    const double ct = std::cos(spec.theta);
    const double st = std::sin(spec.theta);
    const double denom = 1.0 - r * r;
    return {(ct - r * s) / denom, (r * s - r * r * ct) / denom, st / denom, -r * r * st / denom};
}

Point annulus_map(const AnnulusSpec& spec, const Point& p)
{
    check_in_annulus(spec.r, p);
    const auto k = annulus_coeffs(spec);
    const double rho2 = p.head<2>().squaredNorm();
    const double big_a = k.a + k.b / rho2;
    const double big_b = k.c + k.d / rho2;
    return {big_a * p.x() + big_b * p.y(), -big_b * p.x() + big_a * p.y(), 0.0};
}

double annulus_jac_det(const AnnulusSpec& spec, const Point& p)
{
    check_in_annulus(spec.r, p);
    const auto k = annulus_coeffs(spec);
    const double rho2 = p.head<2>().squaredNorm();
    return k.a * k.a + k.c * k.c - (k.b * k.b + k.d * k.d) / (rho2 * rho2);
}

double type1_margin(const AnnulusSpec& spec)
{
    check_spec(spec);
    return 2.0 * spec.r * std::cos(spec.theta) - spec.r * spec.r * spec.s - spec.s;
}

bool type1_predicate(const AnnulusSpec& spec)
{
    return type1_margin(spec) < 0.0;
}

double type1_cutoff(double r, double s)
{
    check_spec({r, s, 0.0});
    const double c = s * (1.0 + r * r) / (2.0 * r);
    if (c >= 1.0)
        return 0.0;
    if (c <= -1.0)
        return std::numbers::pi;
    return std::acos(c);
}

double infinitesimal_rotation_angle(double r, double theta, double rho)
{
    return (1.0 - r * r / (rho * rho)) * theta / (1.0 - r * r);
}

Point infinitesimal_rotation_map(double r, double theta, const Point& p)
{
    check_in_annulus(r, p);
    const double alpha = infinitesimal_rotation_angle(r, theta, p.head<2>().norm());
    const Eigen::Vector2d q = rotation(alpha) * p.head<2>();
    return {q.x(), q.y(), 0.0};
}

namespace {

// grad(alpha) = 2 k r^2 p / rho^4 with k = theta / (1 - r^2).
Eigen::Vector2d angle_gradient(double r, double theta, const Eigen::Vector2d& p)
{
    const double k = theta / (1.0 - r * r);
    const double rho2 = p.squaredNorm();
    return 2.0 * k * r * r * p / (rho2 * rho2);
}

}  // namespace

Eigen::Matrix2d infinitesimal_rotation_jacobian(double r, double theta, const Point& p3)
{
    check_in_annulus(r, p3);
    const Eigen::Vector2d p = p3.head<2>();
    const Eigen::Matrix2d rot = rotation(infinitesimal_rotation_angle(r, theta, p.norm()));
    const Eigen::Vector2d g = angle_gradient(r, theta, p);
    return rot + (rot * quarter_turn * p) * g.transpose();
}

std::array<Eigen::Matrix2d, 2> infinitesimal_rotation_hessian(double r, double theta, const Point& p3)
{
    check_in_annulus(r, p3);
    const Eigen::Vector2d p = p3.head<2>();
    const double rho2 = p.squaredNorm();
    const double k = theta / (1.0 - r * r);
    const Eigen::Matrix2d rot = rotation(infinitesimal_rotation_angle(r, theta, p.norm()));
    const Eigen::Vector2d g = angle_gradient(r, theta, p);
    const Eigen::Matrix2d dg =
        2.0 * k * r * r * (Eigen::Matrix2d::Identity() / (rho2 * rho2) - 4.0 * p * p.transpose() / (rho2 * rho2 * rho2));
    const Eigen::Matrix2d rj = rot * quarter_turn;
    const Eigen::Vector2d rjp = rj * p;
    const Eigen::Vector2d rjjp = rj * quarter_turn * p;

    std::array<Eigen::Matrix2d, 2> h{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Eigen::Vector2d v =
                rj.col(i) * g(j) + rj.col(j) * g(i) + rjjp * g(i) * g(j) + rjp * dg(i, j);
            h[0](i, j) = v(0);
            h[1](i, j) = v(1);
        }
    }
    return h;
}

Point rectangle_shear_map(double alpha, const Point& p)
{
    return {p.x(), p.y() + alpha * p.x() * (2.0 - p.x()), p.z()};
}

Eigen::Matrix2d rectangle_shear_jacobian(double alpha, const Point& p)
{
    Eigen::Matrix2d j;
    j << 1.0, 0.0,
         alpha * (2.0 - 2.0 * p.x()), 1.0;
    return j;
}

std::array<Eigen::Matrix2d, 2> rectangle_shear_hessian(double alpha, const Point& /*p*/)
{
    Eigen::Matrix2d hy = Eigen::Matrix2d::Zero();
    hy(0, 0) = -2.0 * alpha;
    return {Eigen::Matrix2d::Zero(), hy};
}

Eigen::Matrix3d paper3d_linear_part()
{
    Eigen::Matrix3d l;
    l << 2.0, -1.0, 0.0,
         -2.0, 5.0, 0.0,
         0.0, 0.0, 1.0;
    return l;
}

Point paper3d_map(double alpha, const Point& p)
{
    const Eigen::Vector3d q(0.1 * p.x() * p.y(), 0.5 * p.y() * p.z(), 0.1 * p.x() * p.x());
    return paper3d_linear_part() * p + alpha * q;
}

double hessian_norm(const std::array<Eigen::Matrix2d, 2>& hessian)
{
    double sum = 0.0;
    for (const auto& h : hessian) {
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(h, Eigen::EigenvaluesOnly);
        const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
        sum += spectral * spectral;
    }
    return std::sqrt(sum);
}

double reversal_bound_ratio(const Eigen::Matrix2d& gradient, double hessian_bound)
{
    if (!(hessian_bound > 0.0))
        throw Error(ErrorCode::invalid_bound, "Hessian bound must be positive");
    const Eigen::JacobiSVD<Eigen::Matrix2d> svd(gradient);
    return svd.singularValues().minCoeff() / hessian_bound;
}

bool reversal_bound_check(std::span<const Point> triangle, const Eigen::Matrix2d& gradient_at_v1,
                          double hessian_bound)
{
    const double ratio = reversal_bound_ratio(gradient_at_v1, hessian_bound);
    if (gradient_at_v1.determinant() <= 0.0)
        return false;
    const double h = max_edge_length(triangle, 2);
    const double asp = aspect_ratio(triangle, 2);
    return ratio > 2.0 * h * asp;
}

}  // namespace femwarp::analytic
