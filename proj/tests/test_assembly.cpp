#include "femwarp/assembly.hpp"
#include "femwarp/error.hpp"
#include "femwarp/generators.hpp"
#include "femwarp/mesh_io.hpp"
#include "femwarp/quality.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace femwarp;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

// K[i][j] = -cot(angle opposite edge ij) / 2.
Eigen::Matrix3d cotangent_stiffness(const std::array<Point, 3>& p)
{
    Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
    for (int o = 0; o < 3; ++o) {
        const int i = (o + 1) % 3, j = (o + 2) % 3;
        const Point a = p[i] - p[o], b = p[j] - p[o];
        const double cot = a.dot(b) / a.cross(b).norm();
        k(i, j) = k(j, i) = -0.5 * cot;
    }
    for (int i = 0; i < 3; ++i)
        k(i, i) = -(k.row(i).sum());
    return k;
}

Mesh square_with_center(Point center = Point(0.5, 0.5, 0))
{
    std::vector<Point> c{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, center};
    std::vector<Element> e{{0, 1, 4, -1}, {1, 2, 4, -1}, {2, 3, 4, -1}, {3, 0, 4, -1}};
    return {2, c, e, {true, true, true, true, false}};
}

double identity_residual(const WeightSystem& ws, const Mesh& mesh)
{
    const Eigen::MatrixXd xi = coordinate_block(mesh, ws.interior_ids);
    const Eigen::MatrixXd xb = coordinate_block(mesh, ws.boundary_ids);
    return (ws.a_interior * xi + ws.a_boundary * xb).cwiseAbs().maxCoeff();
}

Mesh tire()
{
    return read_mesh(std::filesystem::path(FEMWARP_TEST_DATA) / "tire");
}

}  // namespace

TEST_CASE("local stiffness of the unit right triangle")
{
    const std::array<Point, 3> p{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0)};
    const Eigen::MatrixXd k = local_stiffness(p, 2);
    Eigen::Matrix3d expected;
    expected << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    CHECK((k - expected).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((k - cotangent_stiffness(p)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("local stiffness agrees with the cotangent formula on random triangles")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<Point, 3> p{Point(u(rng), u(rng), 0), Point(u(rng), u(rng), 0), Point(u(rng), u(rng), 0)};
        if (signed_measure(p, 2) < 0)
            std::swap(p[1], p[2]);
        const Eigen::MatrixXd k = local_stiffness(p, 2);
        const Eigen::Matrix3d ref = cotangent_stiffness(p);
        CHECK((k - ref).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ref.cwiseAbs().maxCoeff()));
        CHECK(k.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + k.cwiseAbs().maxCoeff()));
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("2D local stiffness is scale invariant")
{
    const std::array<Point, 3> p{Point(0.1, 0.2, 0), Point(1.3, 0.1, 0), Point(0.4, 0.9, 0)};
    std::array<Point, 3> q = p;
    for (auto& x : q)
        x *= 7.5;
    CHECK((local_stiffness(p, 2) - local_stiffness(q, 2)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("3D local stiffness")
{
    const std::array<Point, 4> p{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)};
    const Eigen::MatrixXd k = local_stiffness(p, 3);
    // Gradients: (-1,-1,-1), e_x, e_y, e_z; volume 1/6.
    Eigen::Matrix4d expected;
    expected << 3, -1, -1, -1, -1, 1, 0, 0, -1, 0, 1, 0, -1, 0, 0, 1;
    expected /= 6.0;
    CHECK((k - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("degenerate element is rejected")
{
    const std::array<Point, 3> p{Point(0, 0, 0), Point(1, 1, 0), Point(2, 2, 0)};
    CHECK(code_of([&] { (void)local_stiffness(p, 2); }) == ErrorCode::degenerate_element);

    const Mesh m(2, {Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(2, 0, 0)}, {{0, 1, 2, -1}, {0, 1, 3, -1}},
                 {true, true, true, true});
    try {
        (void)assemble_stiffness(m);
        FAIL("expected DEGENERATE_ELEMENT");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_element);
        CHECK(std::string(e.what()).find("element 1") != std::string::npos);
    }
}

TEST_CASE("assembled stiffness of two triangles")
{
    const Mesh m(2, {Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)}, {{0, 1, 2, -1}, {0, 2, 3, -1}},
                 {true, true, true, true});
    const Eigen::MatrixXd a = assemble_stiffness(m);
    CHECK(a.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // Nodes 1 and 3 share no element.
    CHECK(a(1, 3) == 0.0);
    CHECK(a(0, 1) != 0.0);
    CHECK(a(0, 2) == 0.0);  // right angles on both sides of the diagonal
}

TEST_CASE("single triangle assembles to its local matrix")
{
    const std::array<Point, 3> p{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0)};
    const Mesh m(2, {p[0], p[1], p[2]}, {{0, 1, 2, -1}}, {true, true, true});
    const Eigen::MatrixXd a = assemble_stiffness(m);
    CHECK((a - local_stiffness(p, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("FEM stiffness is positive semidefinite with zero row sums")
{
    const Mesh m = gen_annulus(0.5, 6, 24);
    const Eigen::MatrixXd a = assemble_stiffness(m);
    const double norm = a.cwiseAbs().maxCoeff();
    CHECK(a.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10 * norm);
    std::mt19937_64 rng(22);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(a.rows());
        for (auto& v : x)
            v = n(rng);
        CHECK(x.dot(a * x) >= -1e-12 * norm * x.squaredNorm());
    }
}

TEST_CASE("FEM partition reproduces the generating coordinates")
{
    for (const Mesh& m : {gen_annulus(0.5, 8, 32), gen_rectangle(2, 1, 9, 5, {0.1, 2}), tire()}) {
        const WeightSystem ws = partition_system(assemble_stiffness(m), m);
        CHECK(ws.factorization.kind() == Factorization::Kind::cholesky);
        CHECK(ws.num_interior() + ws.num_boundary() == m.num_nodes());
        double scale = 0.0;
        for (const auto& p : m.coords())
            scale = std::max(scale, p.cwiseAbs().maxCoeff());
        CHECK(identity_residual(ws, m) <= 1e-10 * scale * ws.a_interior.coeffs().cwiseAbs().maxCoeff());
    }
}

TEST_CASE("partition of a square with one centre node")
{
    const Mesh m = square_with_center();
    const WeightSystem ws = partition_system(assemble_stiffness(m), m);
    REQUIRE(ws.a_interior.rows() == 1);
    CHECK(ws.a_interior.coeff(0, 0) > 0.0);
    CHECK(ws.block_index[4] == 0);
    CHECK(ws.block_index[2] == 2);
}

TEST_CASE("partition errors")
{
    const Mesh no_interior = gen_annulus(0.5, 2, 8);
    CHECK(no_interior.num_nodes() == 16);
    CHECK(no_interior.num_elements() == 16);
    CHECK(code_of([&] { (void)partition_system(assemble_stiffness(no_interior), no_interior); }) ==
          ErrorCode::no_interior);
    CHECK(code_of([&] { (void)uniform_weights(no_interior); }) == ErrorCode::no_interior);
}

TEST_CASE("two interior components still give an SPD block")
{
    // Two squares joined at a boundary edge, each with its own centre node.
    std::vector<Point> c{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}, {2, 0, 0}, {2, 1, 0}, {1.5, 0.5, 0}};
    std::vector<Element> e{{0, 1, 4, -1}, {1, 2, 4, -1}, {2, 3, 4, -1}, {3, 0, 4, -1},
                           {1, 5, 7, -1}, {5, 6, 7, -1}, {6, 2, 7, -1}, {2, 1, 7, -1}};
    const Mesh m(2, c, e, {true, true, true, true, false, true, true, false});
    const WeightSystem ws = partition_system(assemble_stiffness(m), m);
    CHECK(ws.num_interior() == 2);
    CHECK(ws.a_interior.coeff(0, 1) == 0.0);
}

TEST_CASE("uniform weights")
{
    const Mesh m = gen_annulus(0.5, 6, 24);
    const WeightSystem ws = uniform_weights(m);
    CHECK(ws.factorization.kind() == Factorization::Kind::lu);
    const auto nbrs = m.node_neighbors();
    const Eigen::MatrixXd ai = ws.a_interior;
    const Eigen::MatrixXd ab = ws.a_boundary;
    for (std::size_t k = 0; k < ws.num_interior(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const auto node = ws.interior_ids[k];
        CHECK(ai(row, row) == 1.0);
        for (auto j : nbrs[node]) {
            const double w = m.is_boundary(j) ? ab(row, ws.block_index[j]) : ai(row, ws.block_index[j]);
            CHECK(w == doctest::Approx(-1.0 / static_cast<double>(nbrs[node].size())));
        }
        CHECK(std::abs(ai.row(row).sum() + ab.row(row).sum()) <= 1e-15);
    }
}

TEST_CASE("uniform weights with three neighbours are 1/3")
{
    const Mesh m(2, {Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(0.3, 0.3, 0)},
                 {{0, 1, 3, -1}, {1, 2, 3, -1}, {2, 0, 3, -1}}, {true, true, true, false});
    const WeightSystem ws = uniform_weights(m);
    const Eigen::MatrixXd ab = ws.a_boundary;
    CHECK((ab.array() + 1.0 / 3.0).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("uniform weights reject an isolated interior node")
{
    const Mesh m(2, {Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(5, 5, 0)}, {{0, 1, 2, -1}},
                 {true, true, true, false});
    CHECK(code_of([&] { (void)uniform_weights(m); }) == ErrorCode::no_neighbors);
}

TEST_CASE("log-barrier weights with d+1 neighbours solve the constraints exactly")
{
    const std::array<Point, 3> nbrs{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0)};
    const NodeWeights w = log_barrier_node_weights(Point(0.25, 0.25, 0), nbrs, 2);
    // Oracle: [1 1 1; x; y] w = [1; 0.25; 0.25].
    Eigen::Matrix3d c;
    c << 1, 1, 1, 0, 1, 0, 0, 0, 1;
    const Eigen::Vector3d ref = c.partialPivLu().solve(Eigen::Vector3d(1, 0.25, 0.25));
    REQUIRE(w.weights.size() == 3);
    for (int j = 0; j < 3; ++j)
        CHECK(w.weights[j] == doctest::Approx(ref(j)).epsilon(1e-10));
    CHECK(w.weights[0] == doctest::Approx(0.5));
}

TEST_CASE("log-barrier weights are symmetric for symmetric stars")
{
    const std::array<Point, 3> tri{Point(0, 0, 0), Point(1, 0, 0), Point(0.5, std::sqrt(3.0) / 2, 0)};
    const NodeWeights a = log_barrier_node_weights((tri[0] + tri[1] + tri[2]) / 3.0, tri, 2);
    for (double w : a.weights)
        CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    const std::array<Point, 4> sq{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)};
    const NodeWeights b = log_barrier_node_weights(Point(0.5, 0.5, 0), sq, 2);
    for (double w : b.weights)
        CHECK(w == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(b.kkt_residual <= 1e-10);
    CHECK(b.iterations <= 100);
}

TEST_CASE("log-barrier weights are positive convex combinations")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ang(0, 2 * 3.141592653589793);
    std::uniform_real_distribution<double> rad(0.3, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point> nbrs;
        const int n = 5 + trial % 6;
        for (int k = 0; k < n; ++k) {
            const double a = 2 * 3.141592653589793 * (k + 0.3 * std::sin(ang(rng))) / n;
            const double r = rad(rng);
            nbrs.emplace_back(r * std::cos(a), r * std::sin(a), 0);
        }
        const Point x(0.05 * std::cos(ang(rng)), 0.05 * std::sin(ang(rng)), 0);
        const NodeWeights w = log_barrier_node_weights(x, nbrs, 2);
        Point s = Point::Zero();
        double total = 0.0;
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            CHECK(w.weights[j] > 0.0);
            total += w.weights[j];
            s += w.weights[j] * nbrs[j];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        CHECK((s - x).norm() <= 1e-10);
    }
}

TEST_CASE("log-barrier weights in 3D include the z constraint")
{
    const std::array<Point, 6> oct{Point(1, 0, 0), Point(-1, 0, 0), Point(0, 1, 0),
                                   Point(0, -1, 0), Point(0, 0, 1), Point(0, 0, -1)};
    const Point x(0.1, -0.2, 0.3);
    const NodeWeights w = log_barrier_node_weights(x, oct, 3);
    Point s = Point::Zero();
    for (std::size_t j = 0; j < oct.size(); ++j)
        s += w.weights[j] * oct[j];
    CHECK((s - x).norm() <= 1e-10);
}

TEST_CASE("log-barrier rejects a node outside its neighbours' hull")
{
    const std::array<Point, 3> nbrs{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0)};
    CHECK(code_of([&] { (void)log_barrier_node_weights(Point(1, 1, 0), nbrs, 2); }) ==
          ErrorCode::node_not_interior_to_neighbors);

    const Mesh bad = square_with_center(Point(1.5, 0.5, 0));
    try {
        (void)log_barrier_weights(bad);
        FAIL("expected NODE_NOT_INTERIOR_TO_NEIGHBORS");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::node_not_interior_to_neighbors);
        CHECK(std::string(e.what()).find("node 4") != std::string::npos);
    }
}

TEST_CASE("scaled systems are diagonally dominant M-matrices")
{
    const Mesh m = gen_annulus(0.5, 6, 24);
    for (const WeightSystem& ws : {uniform_weights(m), log_barrier_weights(m)}) {
        const Eigen::MatrixXd ai = ws.a_interior;
        const Eigen::MatrixXd ab = ws.a_boundary;
        for (Eigen::Index r = 0; r < ai.rows(); ++r) {
            CHECK(ai(r, r) == 1.0);
            for (Eigen::Index c = 0; c < ai.cols(); ++c)
                if (c != r)
                    CHECK(ai(r, c) <= 0.0);
            CHECK(ab.row(r).maxCoeff() <= 0.0);
            const double interior_sum = ai.row(r).sum();
            if (ab.row(r).minCoeff() < 0.0)
                CHECK(interior_sum > 0.0);
            else
                CHECK(interior_sum >= -1e-10);
            CHECK(std::abs(interior_sum + ab.row(r).sum()) <= 1e-10);
        }
    }
}

TEST_CASE("log-barrier systems reproduce the generating coordinates")
{
    for (const Mesh& m : {gen_annulus(0.5, 8, 32), tire()}) {
        const WeightSystem ws = log_barrier_weights(m);
        double scale = 0.0;
        for (const auto& p : m.coords())
            scale = std::max(scale, p.cwiseAbs().maxCoeff());
        CHECK(identity_residual(ws, m) <= 1e-10 * scale);
    }
}

TEST_CASE("uniform systems reproduce coordinates only at neighbour centroids")
{
    CHECK(identity_residual(uniform_weights(square_with_center()), square_with_center()) <= 1e-15);
    const Mesh off = square_with_center(Point(0.3, 0.6, 0));
    CHECK(identity_residual(uniform_weights(off), off) > 0.1);
}

TEST_CASE("scaled and unscaled FEM rows give the same solution")
{
    const Mesh m = gen_annulus(0.5, 6, 24);
    const WeightSystem ws = partition_system(assemble_stiffness(m), m);
    Eigen::MatrixXd ai = ws.a_interior;
    Eigen::MatrixXd ab = ws.a_boundary;
    const Eigen::VectorXd d = ai.diagonal();
    const Eigen::MatrixXd xb = 1.7 * coordinate_block(m, ws.boundary_ids);
    const Eigen::MatrixXd unscaled = solve_multi(ws.factorization, -(ws.a_boundary * xb));
    const Eigen::MatrixXd scaled =
        (d.asDiagonal().inverse() * ai).partialPivLu().solve(-(d.asDiagonal().inverse() * ab) * xb);
    CHECK((scaled - unscaled).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("build_weights dispatches on the scheme")
{
    const Mesh m = gen_annulus(0.5, 5, 16);
    CHECK(build_weights(m, WeightScheme::fem).scheme == WeightScheme::fem);
    CHECK(build_weights(m, WeightScheme::uniform).scheme == WeightScheme::uniform);
    CHECK(build_weights(m, WeightScheme::log_barrier).scheme == WeightScheme::log_barrier);
    CHECK(to_string(WeightScheme::log_barrier) == "log_barrier");
}
