#pragma once

#include "femwarp/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <span>

namespace femwarp::analytic {

/// Annulus with outer radius 1 and inner radius r; the inner circle moves
/// radially to radius s and the outer circle rotates clockwise by theta
/// (radians).
struct AnnulusSpec {
    double r = 0.5;
    double s = 0.5;
    double theta = 0.0;
};

/// Coefficients of the harmonic annulus map (A x + B y, -B x + A y) with
/// A = a + b / rho^2 and B = c + d / rho^2.
struct AnnulusCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// Throws INVALID_SPEC unless 0 < r <= s < 1.
void check_spec(const AnnulusSpec& spec);

[[nodiscard]] AnnulusCoeffs annulus_coeffs(const AnnulusSpec& spec);

/// Throws DOMAIN_ERROR outside r <= |p| <= 1 (1e-9 slack).
[[nodiscard]] Point annulus_map(const AnnulusSpec& spec, const Point& p);
[[nodiscard]] double annulus_jac_det(const AnnulusSpec& spec, const Point& p);

/// True iff the continuum annulus map reverses orientation somewhere:
/// 2 r cos(theta) - r^2 s - s < 0.
[[nodiscard]] bool type1_predicate(const AnnulusSpec& spec);

/// 2 r cos(theta) - r^2 s - s; its sign decides `type1_predicate`.
[[nodiscard]] double type1_margin(const AnnulusSpec& spec);

/// Smallest theta in [0, pi] at which the continuum map reverses, for s given.
[[nodiscard]] double type1_cutoff(double r, double s);

/// Rotation angle applied at radius rho by the infinitesimal-step map.
[[nodiscard]] double infinitesimal_rotation_angle(double r, double theta, double rho);

/// Rotate a point at radius rho by (1 - r^2/rho^2) theta / (1 - r^2).
/// Throws DOMAIN_ERROR outside the annulus.
[[nodiscard]] Point infinitesimal_rotation_map(double r, double theta, const Point& p);
[[nodiscard]] Eigen::Matrix2d infinitesimal_rotation_jacobian(double r, double theta, const Point& p);
/// Second derivatives: component k, entry (i, j) = d^2 f_k / dx_i dx_j.
[[nodiscard]] std::array<Eigen::Matrix2d, 2> infinitesimal_rotation_hessian(double r, double theta, const Point& p);

/// (x, y) -> (x, y + alpha x (2 - x)).
[[nodiscard]] Point rectangle_shear_map(double alpha, const Point& p);
[[nodiscard]] Eigen::Matrix2d rectangle_shear_jacobian(double alpha, const Point& p);
[[nodiscard]] std::array<Eigen::Matrix2d, 2> rectangle_shear_hessian(double alpha, const Point& p);

/// Linear map [[2,-1,0],[-2,5,0],[0,0,1]] plus alpha (0.1 x y, 0.5 y z, 0.1 x^2).
[[nodiscard]] Point paper3d_map(double alpha, const Point& p);
[[nodiscard]] Eigen::Matrix3d paper3d_linear_part();

/// Upper bound on the norm of a second-derivative tensor,
/// sqrt(sum_k ||H_k||_2^2), which bounds |H[v, v]| for unit v.
[[nodiscard]] double hessian_norm(const std::array<Eigen::Matrix2d, 2>& hessian);

/// Sufficient condition against reversal of a mapped triangle:
/// sigma_min(grad f(v1)) / M > 2 h asp(T). Returns false when the condition
/// does not hold or grad f(v1) is singular. Throws INVALID_BOUND for M <= 0.
[[nodiscard]] bool reversal_bound_check(std::span<const Point> triangle, const Eigen::Matrix2d& gradient_at_v1,
                                        double hessian_bound);

/// Left-hand side of the condition, sigma_min(gradient) / M.
[[nodiscard]] double reversal_bound_ratio(const Eigen::Matrix2d& gradient, double hessian_bound);

}  // namespace femwarp::analytic
