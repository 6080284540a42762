#pragma once

#include "femwarp/mesh.hpp"
#include "femwarp/solve.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace femwarp {

enum class WeightScheme { fem, uniform, log_barrier };

[[nodiscard]] std::string_view to_string(WeightScheme scheme) noexcept;

/// Interior rows of a linearly weighted Laplacian system,
/// [A_I, A_B] [X_I; X_B] = 0, with the factorization of A_I.
///
/// FEM systems keep the unscaled stiffness rows so A_I stays symmetric and
/// is factored by Cholesky. UNIFORM and LOG_BARRIER rows have a unit
/// diagonal and -w_ij off the diagonal; A_I is nonsymmetric and LU-factored.
struct WeightSystem {
    WeightScheme scheme = WeightScheme::fem;
    SparseMatrix a_interior;  // m x m
    SparseMatrix a_boundary;  // m x b
    std::vector<std::int32_t> interior_ids;
    std::vector<std::int32_t> boundary_ids;
    // Node id -> position within its own block.
    std::vector<std::int32_t> block_index;
    Factorization factorization;

    [[nodiscard]] std::size_t num_interior() const noexcept { return interior_ids.size(); }
    [[nodiscard]] std::size_t num_boundary() const noexcept { return boundary_ids.size(); }
};

/// K[i][j] = integral of grad(phi_i) . grad(phi_j) over one linear simplex.
[[nodiscard]] Eigen::MatrixXd local_stiffness(std::span<const Point> pts, int dim);

/// Global P1 Laplacian stiffness matrix, accumulated in ascending element order.
[[nodiscard]] SparseMatrix assemble_stiffness(const Mesh& mesh);

/// Split a full stiffness matrix into interior/boundary blocks and factor A_I.
[[nodiscard]] WeightSystem partition_system(const SparseMatrix& a, const Mesh& mesh);

/// Classical Laplacian smoothing weights 1/|N(i)|.
[[nodiscard]] WeightSystem uniform_weights(const Mesh& mesh);

struct NodeWeights {
    std::vector<double> weights;
    int iterations = 0;
    double kkt_residual = 0.0;
};

struct BarrierOptions {
    int max_iterations = 100;
    double tol = 1e-12;
};

/// Maximize sum(log w_j) subject to sum(w_j) = 1 and sum(w_j x_j) = x.
/// Damped Newton on the dual, started from uniform weights. Throws
/// NODE_NOT_INTERIOR_TO_NEIGHBORS when x is not strictly inside the hull.
[[nodiscard]] NodeWeights log_barrier_node_weights(const Point& center, std::span<const Point> neighbors, int dim,
                                                   const BarrierOptions& options = {});

[[nodiscard]] WeightSystem log_barrier_weights(const Mesh& mesh, const BarrierOptions& options = {});

/// Dispatch on the scheme.
[[nodiscard]] WeightSystem build_weights(const Mesh& mesh, WeightScheme scheme);

/// Rows of `ids` as a (#ids x dim) coordinate block.
[[nodiscard]] Eigen::MatrixXd coordinate_block(const Mesh& mesh, std::span<const std::int32_t> ids);

}  // namespace femwarp
