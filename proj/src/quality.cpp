#include "femwarp/quality.hpp"

#include "femwarp/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace femwarp {

namespace {

Eigen::MatrixXd edge_matrix(std::span<const Point> pts, int dim)
{
    Eigen::MatrixXd e(dim, dim);
    for (int k = 0; k < dim; ++k)
        e.col(k) = (pts[k + 1] - pts[0]).head(dim);
    return e;
}

// Edge matrix of the unit-edge regular simplex.
Eigen::MatrixXd regular_edge_matrix(int dim)
{
    Eigen::MatrixXd e(dim, dim);
    if (dim == 2) {
        e << 1.0, 0.5,
             0.0, std::sqrt(3.0) / 2.0;
    } else {
        e << 1.0, 0.5, 0.5,
             0.0, std::sqrt(3.0) / 2.0, std::sqrt(3.0) / 6.0,
             0.0, 0.0, std::sqrt(2.0 / 3.0);
    }
    return e;
}

class StatsAccumulator {
public:
    void add(double v)
    {
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
        sum_ += v;
        ++n_;
    }
    [[nodiscard]] Stats get() const
    {
        if (n_ == 0)
            return {};
        return {min_, max_, sum_ / static_cast<double>(n_)};
    }

private:
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    std::size_t n_ = 0;
};

}  // namespace

double signed_measure(std::span<const Point> pts, int dim)
{
    if (dim == 2) {
        const Eigen::Vector3d a = pts[1] - pts[0];
        const Eigen::Vector3d b = pts[2] - pts[0];
        return 0.5 * (a.x() * b.y() - a.y() * b.x());
    }
    const Eigen::Vector3d a = pts[1] - pts[0];
    const Eigen::Vector3d b = pts[2] - pts[0];
    const Eigen::Vector3d c = pts[3] - pts[0];
    return a.dot(b.cross(c)) / 6.0;
}

double signed_measure(const Mesh& mesh, std::size_t element)
{
    const auto pts = mesh.element_points(element);
    return signed_measure(pts, mesh.dim());
}

ReversalCount count_reversals(const Mesh& mesh)
{
    ReversalCount out;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        if (signed_measure(mesh, e) <= 0.0)
            out.elements.push_back(static_cast<std::int32_t>(e));
    }
    out.count = out.elements.size();
    return out;
}

double max_edge_length(std::span<const Point> pts, int dim)
{
    double h = 0.0;
    for (int a = 0; a <= dim; ++a)
        for (int b = a + 1; b <= dim; ++b)
            h = std::max(h, (pts[a] - pts[b]).norm());
    return h;
}

double max_edge_length(const Mesh& mesh)
{
    double h = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto pts = mesh.element_points(e);
        h = std::max(h, max_edge_length(pts, mesh.dim()));
    }
    return h;
}

double aspect_ratio(std::span<const Point> pts, int dim, DegeneratePolicy policy)
{
    const double measure = std::abs(signed_measure(pts, dim));
    if (measure == 0.0) {
        if (policy == DegeneratePolicy::throw_error)
            throw Error(ErrorCode::degenerate_element, "aspect ratio of a zero-measure element");
        return std::numeric_limits<double>::infinity();
    }
    const double h = max_edge_length(pts, dim);
    // Minimum altitude is opposite the largest facet.
    double largest_facet = 0.0;
    if (dim == 2) {
        largest_facet = h;
    } else {
        for (int skip = 0; skip < 4; ++skip) {
            std::array<Point, 3> f;
            int k = 0;
            for (int v = 0; v < 4; ++v)
                if (v != skip)
                    f[k++] = pts[v];
            largest_facet = std::max(largest_facet, 0.5 * (f[1] - f[0]).cross(f[2] - f[0]).norm());
        }
    }
    const double min_altitude = dim * measure / largest_facet;
    return h / min_altitude;
}

double inverse_mean_ratio(std::span<const Point> pts, int dim)
{
    const double measure = signed_measure(pts, dim);
    if (!(measure > 0.0))
        throw Error(ErrorCode::reversed_element, "inverse mean ratio of a nonpositive element");
    const Eigen::MatrixXd w = edge_matrix(pts, dim) * regular_edge_matrix(dim).inverse();
    const double det = w.determinant();
    return w.squaredNorm() / (dim * std::pow(det, 2.0 / dim));
}

std::string_view to_string(ViolationKind kind) noexcept
{
    switch (kind) {
    case ViolationKind::bad_index: return "BAD_INDEX";
    case ViolationKind::degenerate_element: return "DEGENERATE_ELEMENT";
    case ViolationKind::orphan_node: return "ORPHAN_NODE";
    case ViolationKind::reversed_element: return "REVERSED_ELEMENT";
    }
    return "UNKNOWN";
}

std::vector<Violation> validate(const Mesh& mesh)
{
    std::vector<Violation> out;
    const auto n = static_cast<std::int64_t>(mesh.num_nodes());
    const int k = mesh.nodes_per_element();
    std::vector<bool> used(mesh.num_nodes(), false);

    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto nodes = mesh.element_nodes(e);
        const auto eid = static_cast<std::int64_t>(e);
        bool structural_ok = true;
        for (int a = 0; a < k; ++a) {
            if (nodes[a] < 0 || nodes[a] >= n) {
                out.push_back({ViolationKind::bad_index, eid, nodes[a],
                               "element " + std::to_string(e) + " cites node " + std::to_string(nodes[a])});
                structural_ok = false;
                continue;
            }
            used[nodes[a]] = true;
            for (int b = 0; b < a; ++b) {
                if (nodes[a] == nodes[b]) {
                    out.push_back({ViolationKind::degenerate_element, eid, nodes[a],
                                   "element " + std::to_string(e) + " repeats node " + std::to_string(nodes[a])});
                    structural_ok = false;
                }
            }
        }
        if (!structural_ok)
            continue;
        const double m = signed_measure(mesh, e);
        if (m == 0.0)
            out.push_back({ViolationKind::degenerate_element, eid, -1,
                           "element " + std::to_string(e) + " has zero measure"});
        else if (m < 0.0)
            out.push_back({ViolationKind::reversed_element, eid, -1,
                           "element " + std::to_string(e) + " is negatively oriented"});
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i])
            out.push_back({ViolationKind::orphan_node, -1, static_cast<std::int64_t>(i),
                           "node " + std::to_string(i) + " belongs to no element"});
    }
    return out;
}

QualityReport quality_report(const Mesh& mesh)
{
    QualityReport report;
    report.h = max_edge_length(mesh);
    const int d = mesh.dim();
    const double degenerate_floor = 1e-12 * std::pow(report.h, d);

    StatsAccumulator measure, aspect, imr;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto pts = mesh.element_points(e);
        const double m = signed_measure(pts, d);
        measure.add(m);
        aspect.add(aspect_ratio(pts, d));
        if (m <= 0.0) {
            ++report.reversals;
            continue;
        }
        if (m < degenerate_floor)
            ++report.near_degenerate;
        imr.add(inverse_mean_ratio(pts, d));
    }
    report.measure = measure.get();
    report.aspect = aspect.get();
    report.inverse_mean_ratio = imr.get();
    return report;
}

}  // namespace femwarp
