#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stwave {

/// A point of the space-time square Q = (0,1)^2; `x` is space, `t` is time.
struct Point
{
    double x = 0.0;
    double t = 0.0;
};

/// Boundary sides of Q, stored as a bit set per node.
enum BoundaryTag : std::uint8_t
{
    kLeft = 1,   // x = 0
    kRight = 2,  // x = 1
    kBottom = 4, // t = 0
    kTop = 8,    // t = 1
};

inline constexpr double kGeometryTolerance = 1e-12;

/// Vertex index triple, counterclockwise. The refinement edge is (v[0], v[1]);
/// v[2] is the newest vertex.
using Triangle = std::array<int, 3>;

/**
 * Conforming triangulation of the space-time square.
 *
 * Meshes are immutable values: refinement produces a new mesh whose `parent()`
 * map points into the elements of the mesh it was refined from.  Every mesh
 * carries a process-unique id so that objects built on it (dof maps, control
 * spaces) can detect being combined with a different mesh.
 */
class Mesh
{
public:
    /// Builds a level-0 mesh (every element is its own parent).
    Mesh(std::vector<Point> nodes, std::vector<Triangle> elements);

    /// Builds a refined mesh. `parent[e]` indexes the elements of the mesh with id `parent_mesh_id`.
    Mesh(std::vector<Point> nodes, std::vector<Triangle> elements, std::vector<int> parent,
         int level, std::uint64_t parent_mesh_id);

    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<Triangle>& elements() const { return elements_; }
    const std::vector<std::uint8_t>& boundary_tags() const { return tags_; }
    const std::vector<int>& parent() const { return parent_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int level() const { return level_; }
    std::uint64_t id() const { return id_; }
    /// Id of the mesh this one was refined from; equals id() at level 0.
    std::uint64_t parent_mesh_id() const { return parent_mesh_id_; }

    std::array<Point, 3> vertices(int element) const;
    /// Signed area; positive for counterclockwise elements.
    double area(int element) const;
    /// Longest edge.
    double diameter(int element) const;
    /// Smallest interior angle in radians.
    double min_angle(int element) const;
    Point centroid(int element) const;

private:
    std::vector<Point> nodes_;
    std::vector<Triangle> elements_;
    std::vector<std::uint8_t> tags_;
    std::vector<int> parent_;
    int level_ = 0;
    std::uint64_t id_ = 0;
    std::uint64_t parent_mesh_id_ = 0;
};

std::uint8_t classify_boundary(Point p);

/// Criss-cross mesh: `cells_per_side`^2 squares, each split into four triangles by its center.
Mesh make_initial_mesh(int cells_per_side);

/// Red refinement: every element is split into four similar children through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/**
 * Newest-vertex bisection of the marked elements followed by the conforming closure.
 *
 * All three edges of each marked element are flagged, so a marked element is split
 * into four children; neighbors are bisected as often as needed to remove hanging
 * nodes.  Throws PreconditionError for an empty set or an out-of-range index.
 */
Mesh refine_marked(const Mesh& mesh, std::span<const int> marked);

struct MeshSize
{
    double h_max = 0.0;
    double h_min = 0.0;
};

MeshSize mesh_size(const Mesh& mesh);

/// Result of the edge audit used by the conformity checks.
struct ConformityReport
{
    bool conforming = true;
    int interior_edges = 0;
    int boundary_edges = 0;
    std::string problem;
};

/// Every edge must be shared by two elements with matching endpoints, or lie on the boundary of Q.
ConformityReport check_conformity(const Mesh& mesh);

/// Sequence of meshes, each refined from its predecessor.
class MeshHierarchy
{
public:
    explicit MeshHierarchy(Mesh coarsest);

    const Mesh& level(int l) const;
    const Mesh& finest() const { return meshes_.back(); }
    int num_levels() const { return static_cast<int>(meshes_.size()); }

    /// Appends `refine_uniform(finest())`.
    const Mesh& refine_uniform();
    const Mesh& refine_marked(std::span<const int> marked);
    /// Appends a mesh refined from finest(); throws if it is not.
    const Mesh& push(Mesh refined);

    /// Ancestor at level `coarse_level` of element `element` of level `fine_level`.
    int ancestor(int fine_level, int element, int coarse_level) const;

private:
    std::vector<Mesh> meshes_;
};

/// Plain-text mesh format: `nodes N elements M`, then N lines `x t`, then M lines `i j k`.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

} // namespace stwave
