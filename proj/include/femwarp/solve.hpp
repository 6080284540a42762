#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <vector>

namespace femwarp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Fill-reducing ordering, elimination tree and factor pattern of a symmetric
/// matrix. Computed once per sparsity pattern and shared by every numeric
/// factorization of a matrix with that pattern.
struct CholeskySymbolic {
    int n = 0;
    // perm[new] = old
    std::vector<int> perm;
    std::vector<int> inverse_perm;
    std::vector<int> parent;
    // Column pointers of L (diagonal first in each column).
    std::vector<int> l_col_ptr;
    // Pattern of the input matrix the analysis was done for.
    std::vector<int> a_outer;
    std::vector<int> a_inner;

    [[nodiscard]] bool matches_pattern(const SparseMatrix& a) const;
};

/// Analyze the pattern of a square, structurally symmetric matrix.
[[nodiscard]] std::shared_ptr<const CholeskySymbolic> analyze_cholesky(const SparseMatrix& a);

/// Immutable numeric factorization of a system matrix. Sparse Cholesky for
/// SPD matrices (the default path), sparse LU for the nonsymmetric weight
/// systems. Copies share the underlying factor; concurrent solves are safe.
class Factorization {
public:
    enum class Kind { cholesky, lu };

    /// Sparse Cholesky. Throws NOT_POSITIVE_DEFINITE on a nonpositive pivot.
    [[nodiscard]] static Factorization factor(const SparseMatrix& a);
    /// Sparse Cholesky reusing a previous symbolic analysis.
    [[nodiscard]] static Factorization factor(const SparseMatrix& a,
                                              std::shared_ptr<const CholeskySymbolic> symbolic);
    /// Sparse LU for nonsymmetric matrices. Throws SINGULAR_SYSTEM.
    [[nodiscard]] static Factorization factor_general(const SparseMatrix& a);

    /// Factor a matrix of the same kind; a Cholesky refactor skips the
    /// symbolic phase when the pattern is unchanged.
    [[nodiscard]] Factorization refactor(const SparseMatrix& a) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::shared_ptr<const CholeskySymbolic> symbolic() const noexcept { return symbolic_; }
    /// Nonzeros in L (Cholesky only; 0 otherwise).
    [[nodiscard]] std::size_t factor_nonzeros() const noexcept { return l_values_.size(); }

    /// Solve A X = B column by column.
    [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

private:
    struct LuImpl;

    Kind kind_ = Kind::cholesky;
    int order_ = 0;
    std::shared_ptr<const CholeskySymbolic> symbolic_;
    std::vector<int> l_rows_;
    std::vector<double> l_values_;
    std::shared_ptr<const LuImpl> lu_;
};

/// Multi right-hand-side solve; throws DIMENSION_MISMATCH on a row-count
/// mismatch or an empty right-hand side.
[[nodiscard]] Eigen::MatrixXd solve_multi(const Factorization& factorization, const Eigen::MatrixXd& b);

struct IterativeOptions {
    double tol = 1e-10;
    // <= 0 selects 10 * order.
    int max_iterations = 0;
};

struct IterativeResult {
    Eigen::MatrixXd x;
    int iterations = 0;
    // max over columns of ||A x - b|| / ||b|| (absolute when b = 0)
    double residual = 0.0;
    bool converged = false;
};

/// Gauss-Seidel with a fixed ascending sweep order. Throws DIVERGED when the
/// residual grows for 10 consecutive sweeps.
[[nodiscard]] IterativeResult gauss_seidel(const SparseMatrix& a, const Eigen::MatrixXd& rhs,
                                           const Eigen::MatrixXd& initial, const IterativeOptions& options = {});

/// Gauss-Seidel on the interior system A_I X = -A_B X_B.
[[nodiscard]] IterativeResult gauss_seidel(const SparseMatrix& a_interior, const SparseMatrix& a_boundary,
                                           const Eigen::MatrixXd& boundary_coords,
                                           const Eigen::MatrixXd& initial, const IterativeOptions& options = {});

/// Unpreconditioned conjugate gradients for SPD systems, columnwise.
[[nodiscard]] IterativeResult conjugate_gradient(const SparseMatrix& a, const Eigen::MatrixXd& rhs,
                                                 const Eigen::MatrixXd& initial,
                                                 const IterativeOptions& options = {});

}  // namespace femwarp
