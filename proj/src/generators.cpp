#include "femwarp/generators.hpp"

#include "femwarp/error.hpp"
#include "femwarp/quality.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace femwarp {

namespace {

// Append the triangle, flipped if necessary to be counter-clockwise.
void push_ccw(std::vector<Element>& out, const std::vector<Point>& coords, std::int32_t a, std::int32_t b,
              std::int32_t c)
{
    const std::array<Point, 3> pts{coords[a], coords[b], coords[c]};
    if (signed_measure(pts, 2) < 0.0)
        std::swap(b, c);
    out.push_back({a, b, c, -1});
}

}  // namespace

Mesh gen_annulus(double r, int n_rings, int n_sectors)
{
    if (!(r > 0.0 && r < 1.0))
        throw Error(ErrorCode::invalid_argument, "annulus inner radius must lie in (0, 1)");
    if (n_rings < 2 || n_sectors < 8)
        throw Error(ErrorCode::invalid_argument, "annulus needs n_rings >= 2 and n_sectors >= 8");

    std::vector<Point> coords;
    std::vector<bool> boundary;
    coords.reserve(static_cast<std::size_t>(n_rings) * n_sectors);
    for (int k = 0; k < n_rings; ++k) {
        const double rho = r + (1.0 - r) * k / (n_rings - 1);
        for (int j = 0; j < n_sectors; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / n_sectors;
            coords.emplace_back(rho * std::cos(phi), rho * std::sin(phi), 0.0);
            boundary.push_back(k == 0 || k == n_rings - 1);
        }
    }
    auto id = [n_sectors](int ring, int sector) {
        return static_cast<std::int32_t>(ring * n_sectors + (sector % n_sectors));
    };
    std::vector<Element> elements;
    elements.reserve(2 * static_cast<std::size_t>(n_rings - 1) * n_sectors);
    for (int k = 0; k + 1 < n_rings; ++k) {
        for (int j = 0; j < n_sectors; ++j) {
            const auto p00 = id(k, j);
            const auto p01 = id(k, j + 1);
            const auto p10 = id(k + 1, j);
            const auto p11 = id(k + 1, j + 1);
            // Diagonal alternates with the parity of j + k.
            if ((j + k) % 2 == 0) {
                push_ccw(elements, coords, p00, p01, p11);
                push_ccw(elements, coords, p00, p11, p10);
            } else {
                push_ccw(elements, coords, p00, p01, p10);
                push_ccw(elements, coords, p01, p11, p10);
            }
        }
    }
    return {2, std::move(coords), std::move(elements), std::move(boundary)};
}

Mesh gen_rectangle(double width, double height, int nx, int ny, const RectangleOptions& options)
{
    if (nx < 2 || ny < 2)
        throw Error(ErrorCode::invalid_argument, "rectangle needs nx, ny >= 2");
    if (!(width > 0.0 && height > 0.0))
        throw Error(ErrorCode::invalid_argument, "rectangle extents must be positive");
    if (!(options.jitter >= 0.0 && options.jitter < 0.2))
        throw Error(ErrorCode::invalid_argument, "rectangle jitter must lie in [0, 0.2)");

    const double dx = width / (nx - 1);
    const double dy = height / (ny - 1);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<Point> coords;
    std::vector<bool> boundary;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool on_perimeter = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            Point p(i * dx, j * dy, 0.0);
            if (!on_perimeter && options.jitter > 0.0) {
                p.x() += options.jitter * dx * unit(rng);
                p.y() += options.jitter * dy * unit(rng);
            }
            coords.push_back(p);
            boundary.push_back(on_perimeter);
        }
    }
    std::vector<Element> elements;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const auto p00 = static_cast<std::int32_t>(j * nx + i);
            const auto p10 = p00 + 1;
            const auto p01 = p00 + nx;
            const auto p11 = p01 + 1;
            push_ccw(elements, coords, p00, p10, p11);
            push_ccw(elements, coords, p00, p11, p01);
        }
    }
    return {2, std::move(coords), std::move(elements), std::move(boundary)};
}

}  // namespace femwarp
