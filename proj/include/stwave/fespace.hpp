#pragma once

#include "stwave/mesh.hpp"

#include <cstdint>
#include <vector>

namespace stwave {

/// Which homogeneous essential conditions a P1 space carries.
enum class SpaceKind
{
    kTrialX, // zero on x = 0, x = 1 and t = 0 (state)
    kTestY,  // zero on x = 0, x = 1 and t = 1 (adjoint)
    kFree,
};

/// Boundary tags that remove a node from a space of the given kind.
std::uint8_t essential_tags(SpaceKind kind);

/// Node-to-unknown numbering of a P1 space. Constrained nodes get no unknown.
class DofMap
{
public:
    DofMap(const Mesh& mesh, SpaceKind kind);

    SpaceKind kind() const { return kind_; }
    int size() const { return static_cast<int>(dof_to_node_.size()); }
    int num_nodes() const { return static_cast<int>(node_to_dof_.size()); }
    std::uint64_t mesh_id() const { return mesh_id_; }

    /// Unknown index of `node`, or -1 when the node is constrained.
    int dof(int node) const { return node_to_dof_[node]; }
    int node(int dof) const { return dof_to_node_[dof]; }

    /// Nodal values of the P1 function with coefficients `coefficients`; constrained nodes are 0.
    std::vector<double> to_nodal(const std::vector<double>& coefficients) const;
    /// Restriction of nodal values to the unknowns.
    std::vector<double> from_nodal(const std::vector<double>& nodal) const;

private:
    SpaceKind kind_;
    std::uint64_t mesh_id_;
    std::vector<int> node_to_dof_;
    std::vector<int> dof_to_node_;
};

inline DofMap build_dofmap(const Mesh& mesh, SpaceKind kind)
{
    return DofMap(mesh, kind);
}

/// Piecewise constants on a coarse mesh, one unknown per element.
struct ControlSpace
{
    int level = 0;
    int size = 0;
    std::uint64_t mesh_id = 0;
};

ControlSpace build_control_space(const Mesh& coarse);

/// Control space on level `fine_level - 1`; throws PreconditionError for fine_level 0.
ControlSpace build_control_space(const MeshHierarchy& hierarchy, int fine_level);

} // namespace stwave
