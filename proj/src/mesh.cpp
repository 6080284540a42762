#include "femwarp/mesh.hpp"

#include "femwarp/error.hpp"

#include <algorithm>

namespace femwarp {

Mesh::Mesh(int dim, std::vector<Point> coords, std::vector<Element> elements, std::vector<bool> boundary)
    : dim_(dim), coords_(std::move(coords)), elements_(std::move(elements)), boundary_(std::move(boundary))
{
    if (dim_ != 2 && dim_ != 3)
        throw Error(ErrorCode::invalid_argument, "mesh dimension must be 2 or 3");
    if (boundary_.size() != coords_.size())
        throw Error(ErrorCode::dimension_mismatch, "boundary mask size differs from node count");
    for (std::size_t i = 0; i < coords_.size(); ++i)
        (boundary_[i] ? boundary_ids_ : interior_ids_).push_back(static_cast<std::int32_t>(i));
    if (dim_ == 2) {
        for (auto& p : coords_)
            p.z() = 0.0;
        for (auto& e : elements_)
            e[3] = -1;
    }
}

std::array<Point, 4> Mesh::element_points(std::size_t e) const
{
    std::array<Point, 4> pts{Point::Zero(), Point::Zero(), Point::Zero(), Point::Zero()};
    const auto& el = elements_[e];
    for (int k = 0; k <= dim_; ++k)
        pts[k] = coords_[el[k]];
    return pts;
}

Mesh Mesh::with_coords(std::vector<Point> coords) const
{
    if (coords.size() != coords_.size())
        throw Error(ErrorCode::dimension_mismatch, "coordinate count differs from node count");
    Mesh out = *this;
    out.coords_ = std::move(coords);
    if (dim_ == 2)
        for (auto& p : out.coords_)
            p.z() = 0.0;
    return out;
}

std::vector<Point> Mesh::boundary_coords() const
{
    std::vector<Point> out;
    out.reserve(boundary_ids_.size());
    for (auto id : boundary_ids_)
        out.push_back(coords_[id]);
    return out;
}

std::vector<std::vector<std::int32_t>> Mesh::node_neighbors() const
{
    std::vector<std::vector<std::int32_t>> nbrs(coords_.size());
    for (const auto& el : elements_)
        for (int a = 0; a <= dim_; ++a)
            for (int b = 0; b <= dim_; ++b)
                if (a != b)
                    nbrs[el[a]].push_back(el[b]);
    for (auto& list : nbrs) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return nbrs;
}

std::vector<std::vector<std::int32_t>> Mesh::node_elements() const
{
    std::vector<std::vector<std::int32_t>> incident(coords_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e)
        for (int a = 0; a <= dim_; ++a)
            incident[elements_[e][a]].push_back(static_cast<std::int32_t>(e));
    return incident;
}

}  // namespace femwarp
