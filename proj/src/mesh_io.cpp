#include "femwarp/mesh_io.hpp"

#include "femwarp/error.hpp"
#include "femwarp/quality.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace femwarp {

namespace {

struct Record {
    std::size_t line = 0;
    std::vector<std::string> tokens;
};

// Non-empty lines with '#' comments stripped.
std::vector<Record> read_records(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::io_error, "cannot open " + path.string());
    std::vector<Record> records;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        Record rec{number, {}};
        for (std::string tok; ss >> tok;)
            rec.tokens.push_back(tok);
        if (!rec.tokens.empty())
            records.push_back(std::move(rec));
    }
    return records;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& what)
{
    throw Error(ErrorCode::parse_error, path.filename().string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(const std::filesystem::path& path, const Record& rec, std::size_t index)
{
    if (index >= rec.tokens.size())
        parse_fail(path, rec.line, "expected at least " + std::to_string(index + 1) + " fields");
    const std::string& tok = rec.tokens[index];
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        parse_fail(path, rec.line, "cannot parse '" + tok + "'");
    return value;
}

struct NodeTable {
    int dim = 0;
    int base = 0;
    std::vector<Point> coords;
    std::vector<int> markers;
    bool has_markers = false;
};

NodeTable parse_node_file(const std::filesystem::path& path)
{
    const auto records = read_records(path);
    if (records.empty())
        parse_fail(path, 0, "missing header");
    const auto& header = records.front();
    NodeTable table;
    const auto count = parse_number<long long>(path, header, 0);
    table.dim = parse_number<int>(path, header, 1);
    const int n_attr = header.tokens.size() > 2 ? parse_number<int>(path, header, 2) : 0;
    const int n_markers = header.tokens.size() > 3 ? parse_number<int>(path, header, 3) : 0;
    if (count <= 0)
        parse_fail(path, header.line, "mesh has no nodes");
    if (table.dim != 2 && table.dim != 3)
        parse_fail(path, header.line, "dimension must be 2 or 3");
    if (n_attr < 0 || n_markers < 0 || n_markers > 1)
        parse_fail(path, header.line, "bad attribute/marker counts");
    if (static_cast<long long>(records.size()) - 1 < count)
        parse_fail(path, records.back().line, "expected " + std::to_string(count) + " node records");

    table.has_markers = n_markers == 1;
    table.coords.assign(count, Point::Zero());
    table.markers.assign(count, 0);
    std::vector<bool> seen(count, false);
    const std::size_t fields = 1 + table.dim + n_attr + n_markers;
    for (long long k = 0; k < count; ++k) {
        const auto& rec = records[k + 1];
        if (rec.tokens.size() < fields)
            parse_fail(path, rec.line, "expected " + std::to_string(fields) + " fields");
        const auto id = parse_number<long long>(path, rec, 0);
        if (k == 0) {
            if (id != 0 && id != 1)
                parse_fail(path, rec.line, "first node id must be 0 or 1");
            table.base = static_cast<int>(id);
        }
        const long long index = id - table.base;
        if (index < 0 || index >= count || seen[index])
            parse_fail(path, rec.line, "node id " + std::to_string(id) + " out of range or repeated");
        seen[index] = true;
        Point p = Point::Zero();
        for (int c = 0; c < table.dim; ++c)
            p(c) = parse_number<double>(path, rec, 1 + c);
        table.coords[index] = p;
        if (table.has_markers)
            table.markers[index] = parse_number<int>(path, rec, 1 + table.dim + n_attr);
    }
    return table;
}

std::vector<bool> infer_boundary(const std::vector<Element>& elements, int dim, std::size_t n_nodes)
{
    using Facet = std::array<std::int32_t, 3>;
    std::map<Facet, int> owners;
    for (const auto& el : elements) {
        for (int skip = 0; skip <= dim; ++skip) {
            Facet f{-1, -1, -1};
            int k = 0;
            for (int v = 0; v <= dim; ++v)
                if (v != skip)
                    f[k++] = el[v];
            std::sort(f.begin(), f.begin() + dim);
            ++owners[f];
        }
    }
    std::vector<bool> boundary(n_nodes, false);
    for (const auto& [facet, count] : owners)
        if (count == 1)
            for (int v = 0; v < dim; ++v)
                boundary[facet[v]] = true;
    return boundary;
}

}  // namespace

std::vector<Point> read_node_coords(const std::filesystem::path& node_path, int* dim)
{
    auto table = parse_node_file(node_path);
    if (dim)
        *dim = table.dim;
    return std::move(table.coords);
}

Mesh read_mesh(const std::filesystem::path& node_path, const std::filesystem::path& ele_path,
               std::vector<std::string>* warnings)
{
    NodeTable nodes = parse_node_file(node_path);
    const int dim = nodes.dim;
    const auto n_nodes = static_cast<long long>(nodes.coords.size());

    const auto records = read_records(ele_path);
    if (records.empty())
        parse_fail(ele_path, 0, "missing header");
    const auto& header = records.front();
    const auto count = parse_number<long long>(ele_path, header, 0);
    const int per_element = parse_number<int>(ele_path, header, 1);
    if (count <= 0)
        parse_fail(ele_path, header.line, "mesh has no elements");
    if (per_element != dim + 1)
        parse_fail(ele_path, header.line, "expected " + std::to_string(dim + 1) + " nodes per element");
    if (static_cast<long long>(records.size()) - 1 < count)
        parse_fail(ele_path, records.back().line, "expected " + std::to_string(count) + " element records");

    std::vector<Element> elements;
    elements.reserve(count);
    for (long long k = 0; k < count; ++k) {
        const auto& rec = records[k + 1];
        Element el{-1, -1, -1, -1};
        for (int v = 0; v <= dim; ++v) {
            const auto id = parse_number<long long>(ele_path, rec, 1 + v) - nodes.base;
            if (id < 0 || id >= n_nodes)
                throw Error(ErrorCode::bad_index, ele_path.filename().string() + ":" + std::to_string(rec.line) +
                                                      ": node " + rec.tokens[1 + v] + " does not exist");
            el[v] = static_cast<std::int32_t>(id);
        }
        std::array<Point, 4> pts{Point::Zero(), Point::Zero(), Point::Zero(), Point::Zero()};
        for (int v = 0; v <= dim; ++v)
            pts[v] = nodes.coords[el[v]];
        if (signed_measure(pts, dim) < 0.0) {
            std::swap(el[dim - 1], el[dim]);
            if (warnings)
                warnings->push_back("element " + rec.tokens[0] + " was negatively oriented; reoriented");
        }
        elements.push_back(el);
    }

    std::vector<bool> boundary;
    if (nodes.has_markers) {
        boundary.resize(nodes.markers.size());
        for (std::size_t i = 0; i < boundary.size(); ++i)
            boundary[i] = nodes.markers[i] != 0;
    } else {
        boundary = infer_boundary(elements, dim, nodes.coords.size());
    }
    return {dim, std::move(nodes.coords), std::move(elements), std::move(boundary)};
}

Mesh read_mesh(const std::filesystem::path& base, std::vector<std::string>* warnings)
{
    auto node = base;
    auto ele = base;
    node += ".node";
    ele += ".ele";
    return read_mesh(node, ele, warnings);
}

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{})
        throw Error(ErrorCode::io_error, "cannot format number");
    return {buf, ptr};
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& base)
{
    auto node_path = base;
    auto ele_path = base;
    node_path += ".node";
    ele_path += ".ele";
    const int d = mesh.dim();

    std::ofstream node(node_path);
    if (!node)
        throw Error(ErrorCode::io_error, "cannot write " + node_path.string());
    node << mesh.num_nodes() << ' ' << d << " 0 1\n";
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        node << i;
        for (int c = 0; c < d; ++c)
            node << ' ' << format_double(mesh.coord(i)(c));
        node << ' ' << (mesh.is_boundary(i) ? 1 : 0) << '\n';
    }

    std::ofstream ele(ele_path);
    if (!ele)
        throw Error(ErrorCode::io_error, "cannot write " + ele_path.string());
    ele << mesh.num_elements() << ' ' << d + 1 << " 0\n";
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        ele << e;
        for (auto v : mesh.element_nodes(e))
            ele << ' ' << v;
        ele << '\n';
    }
    if (!node || !ele)
        throw Error(ErrorCode::io_error, "write failed for " + base.string());
}

}  // namespace femwarp
