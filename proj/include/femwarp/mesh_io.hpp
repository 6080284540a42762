#pragma once

#include "femwarp/mesh.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace femwarp {

/// Read a Triangle/TetGen `.node`/`.ele` pair.
///
/// Ids may be 0- or 1-based (decided by the first node record). A nonzero
/// boundary marker marks a boundary node; without markers, nodes on facets
/// owned by exactly one element are boundary. Negatively oriented elements
/// are reoriented and reported in `warnings`. Throws PARSE_ERROR or
/// BAD_INDEX with the offending line number.
[[nodiscard]] Mesh read_mesh(const std::filesystem::path& node_path, const std::filesystem::path& ele_path,
                             std::vector<std::string>* warnings = nullptr);

/// `<base>.node` and `<base>.ele`.
[[nodiscard]] Mesh read_mesh(const std::filesystem::path& base, std::vector<std::string>* warnings = nullptr);

/// Coordinates from a `.node` file, indexed by 0-based node id.
[[nodiscard]] std::vector<Point> read_node_coords(const std::filesystem::path& node_path, int* dim = nullptr);

/// Write `<base>.node` and `<base>.ele` with 0-based ids, boundary markers
/// and shortest round-trip coordinate formatting.
void write_mesh(const Mesh& mesh, const std::filesystem::path& base);

/// Shortest decimal string that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace femwarp
