#include "femwarp/solve.hpp"

#include "femwarp/error.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace femwarp {

namespace {

// Upper triangle (row <= col) of P A P^T in compressed-column form.
struct UpperCsc {
    std::vector<int> col_ptr;
    std::vector<int> rows;
    std::vector<double> values;
};

UpperCsc permuted_upper(const SparseMatrix& a, const CholeskySymbolic& sym)
{
    const int n = sym.n;
    std::vector<int> count(n + 1, 0);
    for (int j = 0; j < n; ++j) {
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
            const int i_new = sym.inverse_perm[it.row()];
            const int j_new = sym.inverse_perm[j];
            if (i_new <= j_new)
                ++count[j_new + 1];
        }
    }
    UpperCsc c;
    c.col_ptr.assign(n + 1, 0);
    for (int j = 0; j < n; ++j)
        c.col_ptr[j + 1] = c.col_ptr[j] + count[j + 1];
    c.rows.resize(c.col_ptr[n]);
    c.values.resize(c.col_ptr[n]);
    std::vector<int> next(c.col_ptr.begin(), c.col_ptr.end() - 1);
    for (int j = 0; j < n; ++j) {
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
            const int i_new = sym.inverse_perm[it.row()];
            const int j_new = sym.inverse_perm[j];
            if (i_new <= j_new) {
                const int p = next[j_new]++;
                c.rows[p] = i_new;
                c.values[p] = it.value();
            }
        }
    }
    return c;
}

// Nonzero pattern of row k of L, returned in stack[top..n). `mark` must be
// all false on entry and is restored on exit.
int elimination_reach(const UpperCsc& c, int k, const std::vector<int>& parent, std::vector<int>& stack,
                      std::vector<char>& mark)
{
    const int n = static_cast<int>(parent.size());
    int top = n;
    mark[k] = 1;
    for (int p = c.col_ptr[k]; p < c.col_ptr[k + 1]; ++p) {
        int i = c.rows[p];
        if (i > k)
            continue;
        int len = 0;
        for (; !mark[i]; i = parent[i]) {
            stack[len++] = i;
            mark[i] = 1;
        }
        while (len > 0)
            stack[--top] = stack[--len];
    }
    for (int p = top; p < n; ++p)
        mark[stack[p]] = 0;
    mark[k] = 0;
    return top;
}

SparseMatrix compressed(const SparseMatrix& a)
{
    SparseMatrix out = a;
    out.makeCompressed();
    return out;
}

}  // namespace

bool CholeskySymbolic::matches_pattern(const SparseMatrix& a) const
{
    if (a.rows() != n || a.cols() != n)
        return false;
    const SparseMatrix c = compressed(a);
    const auto nnz = static_cast<std::size_t>(c.nonZeros());
    if (nnz != a_inner.size())
        return false;
    return std::equal(a_outer.begin(), a_outer.end(), c.outerIndexPtr()) &&
           std::equal(a_inner.begin(), a_inner.end(), c.innerIndexPtr());
}

std::shared_ptr<const CholeskySymbolic> analyze_cholesky(const SparseMatrix& a_in)
{
    if (a_in.rows() != a_in.cols())
        throw Error(ErrorCode::dimension_mismatch, "Cholesky of a non-square matrix");
    const SparseMatrix a = compressed(a_in);
    auto sym = std::make_shared<CholeskySymbolic>();
    const int n = static_cast<int>(a.rows());
    sym->n = n;
    sym->a_outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + n + 1);
    sym->a_inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());

    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> order;
    Eigen::AMDOrdering<int> amd;
    amd(a, order);
    sym->perm.assign(order.indices().data(), order.indices().data() + n);
    sym->inverse_perm.assign(n, 0);
    for (int i = 0; i < n; ++i)
        sym->inverse_perm[sym->perm[i]] = i;

    const UpperCsc c = permuted_upper(a, *sym);

    // Elimination tree with path compression through `ancestor`.
    sym->parent.assign(n, -1);
    std::vector<int> ancestor(n, -1);
    for (int k = 0; k < n; ++k) {
        for (int p = c.col_ptr[k]; p < c.col_ptr[k + 1]; ++p) {
            int i = c.rows[p];
            while (i != -1 && i < k) {
                const int next = ancestor[i];
                ancestor[i] = k;
                if (next == -1)
                    sym->parent[i] = k;
                i = next;
            }
        }
    }

    // Column counts of L from the row patterns.
    std::vector<int> counts(n, 1);
    std::vector<int> stack(n);
    std::vector<char> mark(n, 0);
    for (int k = 0; k < n; ++k) {
        const int top = elimination_reach(c, k, sym->parent, stack, mark);
        for (int p = top; p < n; ++p)
            ++counts[stack[p]];
    }
    sym->l_col_ptr.assign(n + 1, 0);
    for (int j = 0; j < n; ++j)
        sym->l_col_ptr[j + 1] = sym->l_col_ptr[j] + counts[j];
    return sym;
}

struct Factorization::LuImpl {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

Factorization Factorization::factor(const SparseMatrix& a)
{
    return factor(a, analyze_cholesky(a));
}

Factorization Factorization::factor(const SparseMatrix& a_in, std::shared_ptr<const CholeskySymbolic> symbolic)
{
    if (!symbolic || !symbolic->matches_pattern(a_in))
        throw Error(ErrorCode::dimension_mismatch, "symbolic analysis does not match the matrix pattern");
    const SparseMatrix a = compressed(a_in);
    const CholeskySymbolic& sym = *symbolic;
    const int n = sym.n;
    const UpperCsc c = permuted_upper(a, sym);

    Factorization f;
    f.kind_ = Kind::cholesky;
    f.order_ = n;
    f.symbolic_ = std::move(symbolic);
    f.l_rows_.assign(sym.l_col_ptr[n], 0);
    f.l_values_.assign(sym.l_col_ptr[n], 0.0);

    std::vector<int> next(sym.l_col_ptr.begin(), sym.l_col_ptr.end() - 1);
    std::vector<double> x(n, 0.0);
    std::vector<int> stack(n);
    std::vector<char> mark(n, 0);

    // Up-looking: row k of L from a sparse triangular solve.
    for (int k = 0; k < n; ++k) {
        const int top = elimination_reach(c, k, sym.parent, stack, mark);
        x[k] = 0.0;
        for (int p = c.col_ptr[k]; p < c.col_ptr[k + 1]; ++p)
            if (c.rows[p] <= k)
                x[c.rows[p]] = c.values[p];
        double d = x[k];
        x[k] = 0.0;
        for (int t = top; t < n; ++t) {
            const int i = stack[t];
            const double lki = x[i] / f.l_values_[sym.l_col_ptr[i]];
            x[i] = 0.0;
            for (int p = sym.l_col_ptr[i] + 1; p < next[i]; ++p)
                x[f.l_rows_[p]] -= f.l_values_[p] * lki;
            d -= lki * lki;
            const int p = next[i]++;
            f.l_rows_[p] = k;
            f.l_values_[p] = lki;
        }
        if (!(d > 0.0))
            throw Error(ErrorCode::not_positive_definite,
                        "nonpositive pivot " + std::to_string(d) + " at elimination step " + std::to_string(k));
        const int p = next[k]++;
        f.l_rows_[p] = k;
        f.l_values_[p] = std::sqrt(d);
    }
    return f;
}

Factorization Factorization::factor_general(const SparseMatrix& a)
{
    if (a.rows() != a.cols())
        throw Error(ErrorCode::dimension_mismatch, "LU of a non-square matrix");
    auto impl = std::make_shared<LuImpl>();
    SparseMatrix ac = compressed(a);
    impl->lu.analyzePattern(ac);
    impl->lu.factorize(ac);
    if (impl->lu.info() != Eigen::Success)
        throw Error(ErrorCode::singular_system, "sparse LU failed: " + impl->lu.lastErrorMessage());
    Factorization f;
    f.kind_ = Kind::lu;
    f.order_ = static_cast<int>(a.rows());
    f.lu_ = std::move(impl);
    return f;
}

Factorization Factorization::refactor(const SparseMatrix& a) const
{
    if (kind_ == Kind::lu)
        return factor_general(a);
    if (symbolic_ && symbolic_->matches_pattern(a))
        return factor(a, symbolic_);
    return factor(a);
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& b) const
{
    if (b.rows() != order_)
        throw Error(ErrorCode::dimension_mismatch,
                    "right-hand side has " + std::to_string(b.rows()) + " rows, system order is " +
                        std::to_string(order_));
    if (kind_ == Kind::lu) {
        Eigen::MatrixXd x = lu_->lu.solve(b);
        return x;
    }
    const CholeskySymbolic& sym = *symbolic_;
    const int n = order_;
    Eigen::MatrixXd out(n, b.cols());
    std::vector<double> y(n);
    for (Eigen::Index col = 0; col < b.cols(); ++col) {
        for (int i = 0; i < n; ++i)
            y[i] = b(sym.perm[i], col);
        // L y = b
        for (int j = 0; j < n; ++j) {
            const int p0 = sym.l_col_ptr[j];
            y[j] /= l_values_[p0];
            for (int p = p0 + 1; p < sym.l_col_ptr[j + 1]; ++p)
                y[l_rows_[p]] -= l_values_[p] * y[j];
        }
        // L^T x = y
        for (int j = n - 1; j >= 0; --j) {
            const int p0 = sym.l_col_ptr[j];
            for (int p = p0 + 1; p < sym.l_col_ptr[j + 1]; ++p)
                y[j] -= l_values_[p] * y[l_rows_[p]];
            y[j] /= l_values_[p0];
        }
        for (int i = 0; i < n; ++i)
            out(sym.perm[i], col) = y[i];
    }
    return out;
}

Eigen::MatrixXd solve_multi(const Factorization& factorization, const Eigen::MatrixXd& b)
{
    if (b.cols() < 1)
        throw Error(ErrorCode::dimension_mismatch, "solve_multi needs at least one right-hand side");
    return factorization.solve(b);
}

namespace {

double relative_residual(const SparseMatrix& a, const Eigen::MatrixXd& x, const Eigen::MatrixXd& rhs)
{
    double worst = 0.0;
    const Eigen::MatrixXd r = a * x - rhs;
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        const double scale = rhs.col(c).norm();
        const double rn = r.col(c).norm();
        worst = std::max(worst, scale > 0.0 ? rn / scale : rn);
    }
    return worst;
}

void check_iterative_shapes(const SparseMatrix& a, const Eigen::MatrixXd& rhs, const Eigen::MatrixXd& initial)
{
    if (a.rows() != a.cols() || rhs.rows() != a.rows() || initial.rows() != a.rows() ||
        initial.cols() != rhs.cols())
        throw Error(ErrorCode::dimension_mismatch, "iterative solver operand shapes disagree");
}

}  // namespace

IterativeResult gauss_seidel(const SparseMatrix& a_col, const Eigen::MatrixXd& rhs, const Eigen::MatrixXd& initial,
                             const IterativeOptions& options)
{
    check_iterative_shapes(a_col, rhs, initial);
    const Eigen::SparseMatrix<double, Eigen::RowMajor, int> a = a_col;
    const Eigen::Index n = a.rows();
    const int max_sweeps = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n);

    std::vector<double> diag(n, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (decltype(a)::InnerIterator it(a, i); it; ++it)
            if (it.col() == i)
                diag[i] = it.value();
        if (diag[i] == 0.0)
            throw Error(ErrorCode::singular_system, "zero diagonal in row " + std::to_string(i));
    }

    IterativeResult result;
    result.x = initial;
    result.residual = relative_residual(a_col, result.x, rhs);
    int growth_streak = 0;
    while (result.residual > options.tol && result.iterations < max_sweeps) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
                double s = rhs(i, c);
                for (decltype(a)::InnerIterator it(a, i); it; ++it)
                    if (it.col() != i)
                        s -= it.value() * result.x(it.col(), c);
                result.x(i, c) = s / diag[i];
            }
        }
        ++result.iterations;
        const double previous = result.residual;
        result.residual = relative_residual(a_col, result.x, rhs);
        growth_streak = result.residual > previous ? growth_streak + 1 : 0;
        if (growth_streak >= 10)
            throw Error(ErrorCode::diverged,
                        "residual grew for 10 consecutive sweeps (sweep " + std::to_string(result.iterations) + ")");
    }
    result.converged = result.residual <= options.tol;
    return result;
}

IterativeResult gauss_seidel(const SparseMatrix& a_interior, const SparseMatrix& a_boundary,
                             const Eigen::MatrixXd& boundary_coords, const Eigen::MatrixXd& initial,
                             const IterativeOptions& options)
{
    if (a_boundary.rows() != a_interior.rows() || a_boundary.cols() != boundary_coords.rows())
        throw Error(ErrorCode::dimension_mismatch, "boundary block shapes disagree");
    const Eigen::MatrixXd rhs = -(a_boundary * boundary_coords);
    return gauss_seidel(a_interior, rhs, initial, options);
}

IterativeResult conjugate_gradient(const SparseMatrix& a, const Eigen::MatrixXd& rhs, const Eigen::MatrixXd& initial,
                                   const IterativeOptions& options)
{
    check_iterative_shapes(a, rhs, initial);
    const int max_iterations = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * a.rows());
    IterativeResult result;
    result.x = initial;
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        Eigen::VectorXd x = initial.col(c);
        Eigen::VectorXd r = rhs.col(c) - a * x;
        Eigen::VectorXd p = r;
        const double scale = rhs.col(c).norm() > 0.0 ? rhs.col(c).norm() : 1.0;
        double rr = r.squaredNorm();
        int it = 0;
        while (std::sqrt(rr) / scale > options.tol && it < max_iterations) {
            const Eigen::VectorXd ap = a * p;
            const double alpha = rr / p.dot(ap);
            x += alpha * p;
            r -= alpha * ap;
            const double rr_next = r.squaredNorm();
            p = r + (rr_next / rr) * p;
            rr = rr_next;
            ++it;
        }
        result.x.col(c) = x;
        result.iterations = std::max(result.iterations, it);
    }
    result.residual = relative_residual(a, result.x, rhs);
    result.converged = result.residual <= options.tol;
    return result;
}

}  // namespace femwarp
