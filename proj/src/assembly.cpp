#include "femwarp/assembly.hpp"

#include "femwarp/error.hpp"
#include "femwarp/quality.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <string>

namespace femwarp {

std::string_view to_string(WeightScheme scheme) noexcept
{
    switch (scheme) {
    case WeightScheme::fem: return "fem";
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::log_barrier: return "log_barrier";
    }
    return "unknown";
}

Eigen::MatrixXd local_stiffness(std::span<const Point> pts, int dim)
{
    const double measure = signed_measure(pts, dim);
    if (measure == 0.0 || !std::isfinite(measure))
        throw Error(ErrorCode::degenerate_element, "stiffness of a zero-measure element");
    Eigen::MatrixXd edges(dim, dim);
    for (int k = 0; k < dim; ++k)
        edges.col(k) = (pts[k + 1] - pts[0]).head(dim);
    // Rows of E^{-1} are the gradients of the barycentric coordinates 1..d.
    const Eigen::MatrixXd inv = edges.inverse();
    Eigen::MatrixXd grads(dim + 1, dim);
    grads.bottomRows(dim) = inv;
    grads.row(0) = -inv.colwise().sum();
    return std::abs(measure) * grads * grads.transpose();
}

SparseMatrix assemble_stiffness(const Mesh& mesh)
{
    const int k = mesh.nodes_per_element();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.num_elements() * k * k);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto pts = mesh.element_points(e);
        Eigen::MatrixXd local;
        try {
            local = local_stiffness(pts, mesh.dim());
        } catch (const Error&) {
            throw Error(ErrorCode::degenerate_element, "element " + std::to_string(e) + " has zero measure");
        }
        const auto nodes = mesh.element_nodes(e);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                triplets.emplace_back(nodes[a], nodes[b], local(a, b));
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    SparseMatrix a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
}

namespace {

std::string fmt_residual(double r)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", r);
    return buf;
}

std::vector<std::int32_t> block_indices(const Mesh& mesh)
{
    std::vector<std::int32_t> index(mesh.num_nodes(), -1);
    std::int32_t i = 0;
    for (auto id : mesh.interior_ids())
        index[id] = i++;
    std::int32_t b = 0;
    for (auto id : mesh.boundary_ids())
        index[id] = b++;
    return index;
}

void require_interior(const Mesh& mesh)
{
    if (mesh.interior_ids().empty())
        throw Error(ErrorCode::no_interior, "mesh has no interior nodes");
    if (mesh.boundary_ids().empty())
        throw Error(ErrorCode::invalid_argument, "mesh has no boundary nodes");
}

WeightSystem empty_system(const Mesh& mesh, WeightScheme scheme)
{
    WeightSystem ws;
    ws.scheme = scheme;
    ws.interior_ids.assign(mesh.interior_ids().begin(), mesh.interior_ids().end());
    ws.boundary_ids.assign(mesh.boundary_ids().begin(), mesh.boundary_ids().end());
    ws.block_index = block_indices(mesh);
    return ws;
}

// Assemble unit-diagonal rows from per-interior-node weights over neighbors.
void assemble_scaled(WeightSystem& ws, const Mesh& mesh, const std::vector<std::vector<std::int32_t>>& nbrs,
                     const std::vector<std::vector<double>>& weights)
{
    const auto m = static_cast<Eigen::Index>(ws.num_interior());
    const auto b = static_cast<Eigen::Index>(ws.num_boundary());
    std::vector<Eigen::Triplet<double>> ti, tb;
    for (std::size_t row = 0; row < ws.interior_ids.size(); ++row) {
        const auto node = ws.interior_ids[row];
        const auto r = static_cast<int>(row);
        ti.emplace_back(r, r, 1.0);
        for (std::size_t k = 0; k < nbrs[node].size(); ++k) {
            const auto j = nbrs[node][k];
            if (mesh.is_boundary(j))
                tb.emplace_back(r, ws.block_index[j], -weights[row][k]);
            else
                ti.emplace_back(r, ws.block_index[j], -weights[row][k]);
        }
    }
    ws.a_interior.resize(m, m);
    ws.a_interior.setFromTriplets(ti.begin(), ti.end());
    ws.a_interior.makeCompressed();
    ws.a_boundary.resize(m, b);
    ws.a_boundary.setFromTriplets(tb.begin(), tb.end());
    ws.a_boundary.makeCompressed();
    ws.factorization = Factorization::factor_general(ws.a_interior);
}

}  // namespace

WeightSystem partition_system(const SparseMatrix& a, const Mesh& mesh)
{
    require_interior(mesh);
    if (a.rows() != static_cast<Eigen::Index>(mesh.num_nodes()) || a.cols() != a.rows())
        throw Error(ErrorCode::dimension_mismatch, "stiffness order differs from node count");
    WeightSystem ws = empty_system(mesh, WeightScheme::fem);
    const auto m = static_cast<Eigen::Index>(ws.num_interior());
    const auto b = static_cast<Eigen::Index>(ws.num_boundary());

    std::vector<Eigen::Triplet<double>> ti, tb;
    for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            const auto row_node = it.row();
            if (mesh.is_boundary(row_node))
                continue;
            const int r = ws.block_index[row_node];
            const int c = ws.block_index[col];
            if (mesh.is_boundary(col))
                tb.emplace_back(r, c, it.value());
            else
                ti.emplace_back(r, c, it.value());
        }
    }
    ws.a_interior.resize(m, m);
    ws.a_interior.setFromTriplets(ti.begin(), ti.end());
    ws.a_interior.makeCompressed();
    ws.a_boundary.resize(m, b);
    ws.a_boundary.setFromTriplets(tb.begin(), tb.end());
    ws.a_boundary.makeCompressed();
    try {
        ws.factorization = Factorization::factor(ws.a_interior);
    } catch (const Error& e) {
        throw Error(ErrorCode::singular_system, std::string("interior block is not positive definite (") +
                                                    e.what() + ")");
    }
    return ws;
}

WeightSystem uniform_weights(const Mesh& mesh)
{
    require_interior(mesh);
    WeightSystem ws = empty_system(mesh, WeightScheme::uniform);
    const auto nbrs = mesh.node_neighbors();
    std::vector<std::vector<double>> weights;
    weights.reserve(ws.num_interior());
    for (auto node : ws.interior_ids) {
        const auto& list = nbrs[node];
        if (list.empty())
            throw Error(ErrorCode::no_neighbors, "interior node " + std::to_string(node) + " has no neighbors");
        weights.emplace_back(list.size(), 1.0 / static_cast<double>(list.size()));
    }
    assemble_scaled(ws, mesh, nbrs, weights);
    return ws;
}

NodeWeights log_barrier_node_weights(const Point& center, std::span<const Point> neighbors, int dim,
                                     const BarrierOptions& options)
{
    const auto n = static_cast<Eigen::Index>(neighbors.size());
    const int rows = dim + 1;
    if (n < rows)
        throw Error(ErrorCode::node_not_interior_to_neighbors, "fewer than d+1 neighbors");

    // Constraint matrix in coordinates centered on the node and scaled to O(1).
    double scale = 0.0;
    for (const auto& p : neighbors)
        scale = std::max(scale, (p - center).norm());
    if (!(scale > 0.0))
        throw Error(ErrorCode::node_not_interior_to_neighbors, "neighbors coincide with the node");
    Eigen::MatrixXd c(rows, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        c(0, j) = 1.0;
        c.col(j).tail(dim) = ((neighbors[j] - center) / scale).head(dim);
    }
    Eigen::VectorXd target = Eigen::VectorXd::Zero(rows);
    target(0) = 1.0;

    // Dual: minimize g(l) = target.l - sum log (C^T l)_j; primal w_j = 1 / (C^T l)_j.
    auto dual_value = [&](const Eigen::VectorXd& s, const Eigen::VectorXd& lambda) {
        return target.dot(lambda) - s.array().log().sum();
    };
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(rows);
    lambda(0) = static_cast<double>(n);
    Eigen::VectorXd s = c.transpose() * lambda;

    NodeWeights out;
    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        const Eigen::VectorXd w = s.cwiseInverse();
        const Eigen::VectorXd grad = target - c * w;
        out.kkt_residual = grad.cwiseAbs().maxCoeff();
        out.iterations = iter;
        if (out.kkt_residual <= options.tol) {
            out.weights.assign(w.data(), w.data() + n);
            return out;
        }
        if (iter == options.max_iterations)
            break;
        const Eigen::MatrixXd hess = c * w.cwiseAbs2().asDiagonal() * c.transpose();
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
            break;
        const Eigen::VectorXd step = -ldlt.solve(grad);
        const Eigen::VectorXd ds = c.transpose() * step;
        const double g0 = dual_value(s, lambda);
        const double slope = grad.dot(step);
        double tau = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, tau *= 0.5) {
            const Eigen::VectorXd s_trial = s + tau * ds;
            if (s_trial.minCoeff() <= 0.0)
                continue;
            // Armijo on the dual value, or a lower residual once the dual value stops resolving.
            const Eigen::VectorXd l_trial = lambda + tau * step;
            const bool armijo = dual_value(s_trial, l_trial) < g0 + 1e-4 * tau * slope;
            if (armijo || (target - c * s_trial.cwiseInverse()).cwiseAbs().maxCoeff() < out.kkt_residual) {
                lambda = l_trial;
                s = s_trial;
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
    }
    throw Error(ErrorCode::node_not_interior_to_neighbors,
                "log-barrier weights did not converge (KKT residual " + fmt_residual(out.kkt_residual) + ")");
}

WeightSystem log_barrier_weights(const Mesh& mesh, const BarrierOptions& options)
{
    require_interior(mesh);
    WeightSystem ws = empty_system(mesh, WeightScheme::log_barrier);
    const auto nbrs = mesh.node_neighbors();
    std::vector<std::vector<double>> weights;
    weights.reserve(ws.num_interior());
    std::vector<Point> pts;
    for (auto node : ws.interior_ids) {
        pts.clear();
        for (auto j : nbrs[node])
            pts.push_back(mesh.coord(j));
        try {
            weights.push_back(log_barrier_node_weights(mesh.coord(node), pts, mesh.dim(), options).weights);
        } catch (const Error& e) {
            throw Error(ErrorCode::node_not_interior_to_neighbors,
                        "node " + std::to_string(node) + ": " + e.what());
        }
    }
    assemble_scaled(ws, mesh, nbrs, weights);
    return ws;
}

WeightSystem build_weights(const Mesh& mesh, WeightScheme scheme)
{
    switch (scheme) {
    case WeightScheme::fem: return partition_system(assemble_stiffness(mesh), mesh);
    case WeightScheme::uniform: return uniform_weights(mesh);
    case WeightScheme::log_barrier: return log_barrier_weights(mesh);
    }
    throw Error(ErrorCode::invalid_argument, "unknown weight scheme");
}

Eigen::MatrixXd coordinate_block(const Mesh& mesh, std::span<const std::int32_t> ids)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), mesh.dim());
    for (std::size_t i = 0; i < ids.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = mesh.coord(ids[i]).head(mesh.dim()).transpose();
    return out;
}

}  // namespace femwarp
