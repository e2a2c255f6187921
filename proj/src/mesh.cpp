#include "stwave/mesh.hpp"

#include "stwave/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace stwave {

namespace {

std::uint64_t next_mesh_id()
{
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

double distance(Point a, Point b)
{
    return std::hypot(a.x - b.x, a.t - b.t);
}

double signed_area(Point a, Point b, Point c)
{
    return 0.5 * ((b.x - a.x) * (c.t - a.t) - (c.x - a.x) * (b.t - a.t));
}

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

// Global edge numbering in order of first appearance; local edge k of an element
// joins v[k] and v[(k+1)%3], so local edge 0 is the refinement edge.
struct EdgeTable
{
    std::unordered_map<std::uint64_t, int> index;
    std::vector<std::array<int, 2>> endpoints;
    std::vector<std::array<int, 3>> element_edges;
    std::vector<std::array<int, 2>> edge_elements;

    explicit EdgeTable(const Mesh& mesh)
    {
        const auto& elements = mesh.elements();
        index.reserve(elements.size() * 2);
        element_edges.resize(elements.size());
        for (std::size_t e = 0; e < elements.size(); ++e) {
            for (int k = 0; k < 3; ++k) {
                const int a = elements[e][k];
                const int b = elements[e][(k + 1) % 3];
                auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(endpoints.size()));
                if (inserted) {
                    endpoints.push_back({a, b});
                    edge_elements.push_back({-1, -1});
                }
                auto& owners = edge_elements[it->second];
                if (owners[0] < 0)
                    owners[0] = static_cast<int>(e);
                else
                    owners[1] = static_cast<int>(e);
                element_edges[e][k] = it->second;
            }
        }
    }

    int find(int a, int b) const
    {
        auto it = index.find(edge_key(a, b));
        return it == index.end() ? -1 : it->second;
    }
};

Point midpoint(Point a, Point b)
{
    return {0.5 * (a.x + b.x), 0.5 * (a.t + b.t)};
}

// Rotates the triple so that the longest edge comes first and flips clockwise input.
Triangle normalize(const std::vector<Point>& nodes, Triangle tri)
{
    if (signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0)
        std::swap(tri[1], tri[2]);
    int longest = 0;
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
        const double len = distance(nodes[tri[k]], nodes[tri[(k + 1) % 3]]);
        if (len > best * (1.0 + 1e-12)) {
            best = len;
            longest = k;
        }
    }
    std::rotate(tri.begin(), tri.begin() + longest, tri.end());
    return tri;
}

} // namespace

std::uint8_t classify_boundary(Point p)
{
    std::uint8_t tags = 0;
    if (std::abs(p.x) <= kGeometryTolerance)
        tags |= kLeft;
    if (std::abs(p.x - 1.0) <= kGeometryTolerance)
        tags |= kRight;
    if (std::abs(p.t) <= kGeometryTolerance)
        tags |= kBottom;
    if (std::abs(p.t - 1.0) <= kGeometryTolerance)
        tags |= kTop;
    return tags;
}

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> elements)
    : Mesh(std::move(nodes), std::move(elements), {}, 0, 0)
{}

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> elements, std::vector<int> parent,
           int level, std::uint64_t parent_mesh_id)
    : nodes_(std::move(nodes))
    , elements_(std::move(elements))
    , parent_(std::move(parent))
    , level_(level)
    , id_(next_mesh_id())
    , parent_mesh_id_(parent_mesh_id)
{
    if (level_ == 0) {
        parent_.resize(elements_.size());
        for (std::size_t e = 0; e < parent_.size(); ++e)
            parent_[e] = static_cast<int>(e);
        parent_mesh_id_ = id_;
    }
    if (parent_.size() != elements_.size())
        throw DimensionMismatch("parent map size differs from element count");

    tags_.resize(nodes_.size());
    std::transform(nodes_.begin(), nodes_.end(), tags_.begin(), classify_boundary);

    for (std::size_t e = 0; e < elements_.size(); ++e) {
        for (int v : elements_[e])
            if (v < 0 || v >= num_nodes())
                throw PreconditionError("element " + std::to_string(e) + " references missing node");
        if (area(static_cast<int>(e)) <= 0.0)
            throw DegenerateElement("element " + std::to_string(e) + " has non-positive area");
    }
}

std::array<Point, 3> Mesh::vertices(int element) const
{
    const auto& tri = elements_[element];
    return {nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]};
}

double Mesh::area(int element) const
{
    const auto [a, b, c] = vertices(element);
    return signed_area(a, b, c);
}

double Mesh::diameter(int element) const
{
    const auto [a, b, c] = vertices(element);
    return std::max({distance(a, b), distance(b, c), distance(c, a)});
}

double Mesh::min_angle(int element) const
{
    const auto v = vertices(element);
    double smallest = std::numbers::pi;
    for (int k = 0; k < 3; ++k) {
        const Point p = v[k];
        const Point q = v[(k + 1) % 3];
        const Point r = v[(k + 2) % 3];
        const double ux = q.x - p.x, ut = q.t - p.t;
        const double wx = r.x - p.x, wt = r.t - p.t;
        const double angle = std::atan2(std::abs(ux * wt - ut * wx), ux * wx + ut * wt);
        smallest = std::min(smallest, angle);
    }
    return smallest;
}

Point Mesh::centroid(int element) const
{
    const auto [a, b, c] = vertices(element);
    return {(a.x + b.x + c.x) / 3.0, (a.t + b.t + c.t) / 3.0};
}

Mesh make_initial_mesh(int cells_per_side)
{
    if (cells_per_side < 1)
        throw PreconditionError("cells_per_side must be positive");
    const int n = cells_per_side;
    const double h = 1.0 / n;
    std::vector<Point> nodes;
    nodes.reserve((n + 1) * (n + 1) + n * n);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            nodes.push_back({i * h, j * h});
    auto grid = [n](int i, int j) { return j * (n + 1) + i; };

    std::vector<Triangle> elements;
    elements.reserve(4 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int center = static_cast<int>(nodes.size());
            nodes.push_back({(i + 0.5) * h, (j + 0.5) * h});
            const int a = grid(i, j), b = grid(i + 1, j), c = grid(i + 1, j + 1), d = grid(i, j + 1);
            // cell side first: it is the hypotenuse and the refinement edge
            elements.push_back({a, b, center});
            elements.push_back({b, c, center});
            elements.push_back({c, d, center});
            elements.push_back({d, a, center});
        }
    }
    return Mesh(std::move(nodes), std::move(elements));
}

Mesh refine_uniform(const Mesh& mesh)
{
    const EdgeTable edges(mesh);
    std::vector<Point> nodes = mesh.nodes();
    nodes.reserve(nodes.size() + edges.endpoints.size());
    const int first_midpoint = static_cast<int>(nodes.size());
    for (const auto& [a, b] : edges.endpoints)
        nodes.push_back(midpoint(nodes[a], nodes[b]));

    std::vector<Triangle> elements;
    std::vector<int> parent;
    elements.reserve(4 * mesh.elements().size());
    parent.reserve(4 * mesh.elements().size());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& [n1, n2, n3] = mesh.elements()[e];
        const auto& le = edges.element_edges[e];
        const int m12 = first_midpoint + le[0];
        const int m23 = first_midpoint + le[1];
        const int m31 = first_midpoint + le[2];
        // each child inherits the parent's refinement-edge direction
        elements.push_back({n1, m12, m31});
        elements.push_back({m12, n2, m23});
        elements.push_back({m31, m23, n3});
        elements.push_back({m23, m31, m12});
        parent.insert(parent.end(), 4, e);
    }
    return Mesh(std::move(nodes), std::move(elements), std::move(parent), mesh.level() + 1, mesh.id());
}

Mesh refine_marked(const Mesh& mesh, std::span<const int> marked)
{
    if (marked.empty())
        throw PreconditionError("refine_marked: marked set is empty");
    const EdgeTable edges(mesh);
    const int num_edges = static_cast<int>(edges.endpoints.size());
    std::vector<char> flagged(num_edges, 0);
    std::vector<int> work;

    for (int e : marked) {
        if (e < 0 || e >= mesh.num_elements())
            throw PreconditionError("refine_marked: element index out of range");
        for (int edge : edges.element_edges[e]) {
            if (!flagged[edge]) {
                flagged[edge] = 1;
                work.push_back(edge);
            }
        }
    }

    // closure: an element with any flagged edge must also flag its refinement edge
    while (!work.empty()) {
        const int edge = work.back();
        work.pop_back();
        for (int owner : edges.edge_elements[edge]) {
            if (owner < 0)
                continue;
            const int ref = edges.element_edges[owner][0];
            if (!flagged[ref]) {
                flagged[ref] = 1;
                work.push_back(ref);
            }
        }
    }

    std::vector<Point> nodes = mesh.nodes();
    std::vector<int> midpoint_of(num_edges, -1);
    for (int edge = 0; edge < num_edges; ++edge) {
        if (!flagged[edge])
            continue;
        const auto [a, b] = edges.endpoints[edge];
        midpoint_of[edge] = static_cast<int>(nodes.size());
        nodes.push_back(midpoint(nodes[a], nodes[b]));
    }

    auto midpoint_node = [&](int a, int b) {
        const int edge = edges.find(a, b);
        return edge < 0 ? -1 : midpoint_of[edge];
    };

    std::vector<Triangle> elements;
    std::vector<int> parent;
    elements.reserve(mesh.elements().size() + 3 * marked.size());
    parent.reserve(elements.capacity());

    // bisect through the refinement edge; the children's refinement edges are the
    // parent's other two edges, so recursion depth is at most two
    auto bisect = [&](auto&& self, const Triangle& tri, int owner) -> void {
        const int m = midpoint_node(tri[0], tri[1]);
        if (m < 0) {
            elements.push_back(tri);
            parent.push_back(owner);
            return;
        }
        self(self, Triangle{tri[2], tri[0], m}, owner);
        self(self, Triangle{tri[1], tri[2], m}, owner);
    };
    for (int e = 0; e < mesh.num_elements(); ++e)
        bisect(bisect, mesh.elements()[e], e);

    return Mesh(std::move(nodes), std::move(elements), std::move(parent), mesh.level() + 1, mesh.id());
}

MeshSize mesh_size(const Mesh& mesh)
{
    MeshSize size{0.0, std::numeric_limits<double>::infinity()};
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double d = mesh.diameter(e);
        size.h_max = std::max(size.h_max, d);
        size.h_min = std::min(size.h_min, d);
    }
    return size;
}

ConformityReport check_conformity(const Mesh& mesh)
{
    ConformityReport report;
    const EdgeTable edges(mesh);
    std::vector<int> owner_count(edges.endpoints.size(), 0);
    for (const auto& le : edges.element_edges)
        for (int edge : le)
            ++owner_count[edge];

    for (std::size_t edge = 0; edge < owner_count.size(); ++edge) {
        const auto [a, b] = edges.endpoints[edge];
        const int count = owner_count[edge];
        if (count == 2) {
            ++report.interior_edges;
            continue;
        }
        // a single owner is fine only on a side of Q
        if (count == 1 && (classify_boundary(mesh.nodes()[a]) & classify_boundary(mesh.nodes()[b]))) {
            ++report.boundary_edges;
            continue;
        }
        report.conforming = false;
        std::ostringstream msg;
        msg << "edge (" << a << "," << b << ") has " << count << " owner(s)";
        report.problem = msg.str();
        return report;
    }
    return report;
}

MeshHierarchy::MeshHierarchy(Mesh coarsest)
{
    meshes_.push_back(std::move(coarsest));
}

const Mesh& MeshHierarchy::level(int l) const
{
    if (l < 0 || l >= num_levels())
        throw PreconditionError("hierarchy has no level " + std::to_string(l));
    return meshes_[l];
}

const Mesh& MeshHierarchy::refine_uniform()
{
    return push(stwave::refine_uniform(finest()));
}

const Mesh& MeshHierarchy::refine_marked(std::span<const int> marked)
{
    return push(stwave::refine_marked(finest(), marked));
}

const Mesh& MeshHierarchy::push(Mesh refined)
{
    if (refined.parent_mesh_id() != finest().id())
        throw DimensionMismatch("mesh was not refined from the finest hierarchy level");
    meshes_.push_back(std::move(refined));
    return meshes_.back();
}

int MeshHierarchy::ancestor(int fine_level, int element, int coarse_level) const
{
    if (coarse_level > fine_level)
        throw PreconditionError("ancestor: coarse level above fine level");
    for (int l = fine_level; l > coarse_level; --l)
        element = level(l).parent()[element];
    return element;
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    out << "nodes " << mesh.num_nodes() << " elements " << mesh.num_elements() << '\n';
    out << std::setprecision(17);
    for (const auto& p : mesh.nodes())
        out << p.x << ' ' << p.t << '\n';
    for (const auto& tri : mesh.elements())
        out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
}

Mesh read_mesh(std::istream& in)
{
    std::string nodes_word, elements_word;
    long num_nodes = -1, num_elements = -1;
    if (!(in >> nodes_word >> num_nodes >> elements_word >> num_elements) || nodes_word != "nodes"
        || elements_word != "elements" || num_nodes < 0 || num_elements < 0)
        throw IoError("mesh: expected header 'nodes <N> elements <M>'");
    std::vector<Point> nodes(num_nodes);
    for (auto& p : nodes)
        if (!(in >> p.x >> p.t))
            throw IoError("mesh: truncated node list");
    std::vector<Triangle> elements(num_elements);
    for (auto& tri : elements) {
        if (!(in >> tri[0] >> tri[1] >> tri[2]))
            throw IoError("mesh: truncated element list");
        for (int v : tri)
            if (v < 0 || v >= num_nodes)
                throw IoError("mesh: node index out of range");
        tri = normalize(nodes, tri);
    }
    return Mesh(std::move(nodes), std::move(elements));
}

} // namespace stwave
