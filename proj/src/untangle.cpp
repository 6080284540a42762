#include "femwarp/untangle.hpp"

#include "femwarp/error.hpp"
#include "femwarp/quality.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace femwarp {

namespace {

// Vertex orders that are even permutations of (0..d) starting at each slot.
constexpr std::array<std::array<int, 3>, 3> even_order_2d{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};
constexpr std::array<std::array<int, 4>, 4> even_order_3d{{{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}}};

constexpr double pivot_eps = 1e-12;

// Dense tableau for: maximize c^T x subject to A x <= b, x >= 0, b >= 0.
// Bland's rule on both the entering and the leaving variable.
class SimplexTableau {
public:
    SimplexTableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
        : rows_(static_cast<int>(a.rows())), vars_(static_cast<int>(a.cols())),
          t_(Eigen::MatrixXd::Zero(rows_ + 1, vars_ + rows_ + 1)), basis_(rows_)
    {
        t_.topLeftCorner(rows_, vars_) = a;
        t_.block(0, vars_, rows_, rows_).setIdentity();
        t_.col(vars_ + rows_).head(rows_) = b;
        t_.row(rows_).head(vars_) = c.transpose();
        for (int r = 0; r < rows_; ++r)
            basis_[r] = vars_ + r;
    }

    int solve(int max_pivots)
    {
        const int cols = vars_ + rows_;
        int pivots = 0;
        for (; pivots < max_pivots; ++pivots) {
            int enter = -1;
            for (int j = 0; j < cols; ++j) {
                if (t_(rows_, j) > pivot_eps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0)
                return pivots;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < rows_; ++r) {
                const double coef = t_(r, enter);
                if (coef <= pivot_eps)
                    continue;
                const double ratio = t_(r, cols) / coef;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis_[r] < basis_[leave])) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave < 0)
                throw Error(ErrorCode::unbounded, "maximin LP is unbounded");
            pivot(leave, enter);
        }
        throw Error(ErrorCode::unbounded, "maximin LP exceeded the pivot limit");
    }

    [[nodiscard]] Eigen::VectorXd primal() const
    {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(vars_);
        for (int r = 0; r < rows_; ++r)
            if (basis_[r] < vars_)
                x(basis_[r]) = t_(r, vars_ + rows_);
        return x;
    }

private:
    void pivot(int r, int j)
    {
        t_.row(r) /= t_(r, j);
        for (int i = 0; i <= rows_; ++i) {
            if (i == r)
                continue;
            const double f = t_(i, j);
            if (f != 0.0)
                t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = j;
    }

    int rows_;
    int vars_;
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
};

}  // namespace

double LocalSubmesh::measure(std::size_t i, const Point& x) const
{
    auto pts = elements[i];
    pts[free_slot[i]] = x;
    return signed_measure(pts, dim);
}

double LocalSubmesh::min_measure(const Point& x) const
{
    double q = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < elements.size(); ++i)
        q = std::min(q, measure(i, x));
    return q;
}

Point LocalSubmesh::measure_gradient(std::size_t i) const
{
    const auto& pts = elements[i];
    const int k = free_slot[i];
    if (dim == 2) {
        const auto& ord = even_order_2d[k];
        const Point e = pts[ord[2]] - pts[ord[1]];
        return {-0.5 * e.y(), 0.5 * e.x(), 0.0};
    }
    const auto& ord = even_order_3d[k];
    const Point& a = pts[ord[1]];
    return -((pts[ord[2]] - a).cross(pts[ord[3]] - a)) / 6.0;
}

LocalSubmesh local_submesh(const Mesh& mesh, std::int32_t vertex, const std::vector<std::int32_t>& incident_elements)
{
    LocalSubmesh sub;
    sub.dim = mesh.dim();
    sub.vertex = vertex;
    sub.position = mesh.coord(vertex);
    for (auto e : incident_elements) {
        const auto nodes = mesh.element_nodes(e);
        const auto it = std::find(nodes.begin(), nodes.end(), vertex);
        if (it == nodes.end())
            throw Error(ErrorCode::invalid_argument, "element does not contain the free vertex");
        sub.elements.push_back(mesh.element_points(e));
        sub.free_slot.push_back(static_cast<int>(it - nodes.begin()));
    }
    return sub;
}

Reposition maximin_reposition(const LocalSubmesh& sub)
{
    const std::size_t n = sub.elements.size();
    if (n == 0)
        throw Error(ErrorCode::invalid_argument, "local submesh has no elements");
    const int d = sub.dim;
    const Point x0 = sub.position;
    const double q0 = sub.min_measure(x0);

    // Length scale: bounding-box diagonal of every vertex in the cavity.
    Eigen::Vector3d lo = x0, hi = x0;
    for (std::size_t i = 0; i < n; ++i)
        for (int v = 0; v <= d; ++v)
            if (v != sub.free_slot[i]) {
                lo = lo.cwiseMin(sub.elements[i][v]);
                hi = hi.cwiseMax(sub.elements[i][v]);
            }
    const double length = (hi - lo).norm();
    if (!(length > 0.0))
        return {x0, q0, 0};
    const double measure_scale = std::pow(length, d);
    constexpr double box = 10.0;

    // Variables: z+ (d), z- (d), s. Position x = x0 + length (z+ - z-),
    // level t = measure_scale (s + t_lo).
    const double q0n = q0 / measure_scale;
    const double t_lo = q0n - std::abs(q0n) - 1.0;
    const int vars = 2 * d + 1;
    const int rows = static_cast<int>(n) + 2 * d;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, vars);
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < n; ++i) {
        const Point g = sub.measure_gradient(i) * (length / measure_scale);
        const auto r = static_cast<Eigen::Index>(i);
        for (int k = 0; k < d; ++k) {
            a(r, k) = -g(k);
            a(r, d + k) = g(k);
        }
        a(r, 2 * d) = 1.0;
        b(r) = sub.measure(i, x0) / measure_scale - t_lo;
    }
    for (int k = 0; k < 2 * d; ++k) {
        a(static_cast<Eigen::Index>(n) + k, k) = 1.0;
        b(static_cast<Eigen::Index>(n) + k) = box;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
    c(2 * d) = 1.0;

    SimplexTableau lp(a, b, c);
    const int pivots = lp.solve(50 * (rows + vars));
    const Eigen::VectorXd z = lp.primal();

    Point x = x0;
    bool on_box = false;
    for (int k = 0; k < d; ++k) {
        const double step = z(k) - z(d + k);
        x(k) += length * step;
        on_box = on_box || std::abs(step) >= box * (1.0 - 1e-9);
    }
    if (on_box)
        throw Error(ErrorCode::unbounded,
                    "maximin optimum for vertex " + std::to_string(sub.vertex) + " lies on the bounding box");
    const double q = sub.min_measure(x);
    if (!(q > q0))
        return {x0, q0, pivots};
    return {x, q, pivots};
}

std::string_view to_string(UntangleOutcome outcome) noexcept
{
    switch (outcome) {
    case UntangleOutcome::success: return "SUCCESS";
    case UntangleOutcome::stalled: return "STALLED";
    case UntangleOutcome::max_sweeps: return "MAX_SWEEPS";
    }
    return "UNKNOWN";
}

UntangleResult untangle(const Mesh& mesh, int max_sweeps)
{
    UntangleResult result;
    result.mesh = mesh;
    result.reversals = count_reversals(mesh).count;
    if (result.reversals == 0) {
        result.outcome = UntangleOutcome::success;
        return result;
    }
    const auto incident = mesh.node_elements();
    std::vector<Point> coords(mesh.coords().begin(), mesh.coords().end());

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double max_move = 0.0;
        for (auto v : mesh.interior_ids()) {
            if (incident[v].empty())
                continue;
            LocalSubmesh sub;
            sub.dim = mesh.dim();
            sub.vertex = v;
            sub.position = coords[v];
            for (auto e : incident[v]) {
                const auto nodes = mesh.element_nodes(e);
                std::array<Point, 4> pts{Point::Zero(), Point::Zero(), Point::Zero(), Point::Zero()};
                int slot = 0;
                for (int k = 0; k < mesh.nodes_per_element(); ++k) {
                    pts[k] = coords[nodes[k]];
                    if (nodes[k] == v)
                        slot = k;
                }
                sub.elements.push_back(pts);
                sub.free_slot.push_back(slot);
            }
            const double before = sub.min_measure(coords[v]);
            Reposition moved;
            try {
                moved = maximin_reposition(sub);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::unbounded)
                    throw;
                ++result.unbounded;
                continue;
            }
            ++result.moves;
            if (sub.min_measure(moved.position) < before)
                ++result.monotonicity_violations;
            max_move = std::max(max_move, (moved.position - coords[v]).norm());
            coords[v] = moved.position;
        }
        result.sweeps = sweep;
        result.mesh = mesh.with_coords(coords);
        result.reversals = count_reversals(result.mesh).count;
        if (result.reversals == 0) {
            result.outcome = UntangleOutcome::success;
            return result;
        }
        if (max_move <= 1e-12) {
            result.outcome = UntangleOutcome::stalled;
            return result;
        }
    }
    result.outcome = UntangleOutcome::max_sweeps;
    return result;
}

HybridResult hybrid_warp(const Mesh& mesh, WeightScheme scheme, const BoundaryMotion& motion,
                         const HybridOptions& options)
{
    WarpResult warped = femwarp(mesh, scheme, motion);
    HybridResult out;
    out.report = std::move(warped.report);
    if (out.report.outcome == WarpOutcome::success) {
        out.mesh = std::move(warped.mesh);
        return out;
    }
    out.untangler_used = true;
    out.untangle = untangle(warped.mesh, options.max_sweeps);
    out.mesh = out.untangle.mesh;
    out.report.reversals = out.untangle.reversals;
    out.report.outcome = out.untangle.reversals == 0 ? WarpOutcome::success : WarpOutcome::reversed;
    out.report.t_reached = out.report.outcome == WarpOutcome::success ? 1.0 : 0.0;
    out.report.quality = quality_report(out.mesh);
    return out;
}

UntangleResult untangle_motion(const Mesh& mesh, const BoundaryMotion& motion, int max_sweeps)
{
    const auto targets = motion.evaluate(mesh.boundary_coords(), 1.0);
    std::vector<Point> coords(mesh.coords().begin(), mesh.coords().end());
    const auto ids = mesh.boundary_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
        coords[ids[i]] = targets[i];
    return untangle(mesh.with_coords(std::move(coords)), max_sweeps);
}

}  // namespace femwarp
