#include "stwave/fespace.hpp"

#include "stwave/errors.hpp"

namespace stwave {

std::uint8_t essential_tags(SpaceKind kind)
{
    switch (kind) {
    case SpaceKind::kTrialX:
        return kLeft | kRight | kBottom;
    case SpaceKind::kTestY:
        return kLeft | kRight | kTop;
    case SpaceKind::kFree:
        return 0;
    }
    return 0;
}

DofMap::DofMap(const Mesh& mesh, SpaceKind kind)
    : kind_(kind)
    , mesh_id_(mesh.id())
    , node_to_dof_(mesh.num_nodes(), -1)
{
    const std::uint8_t excluded = essential_tags(kind);
    const auto& tags = mesh.boundary_tags();
    dof_to_node_.reserve(mesh.num_nodes());
    for (int node = 0; node < mesh.num_nodes(); ++node) {
        if (tags[node] & excluded)
            continue;
        node_to_dof_[node] = static_cast<int>(dof_to_node_.size());
        dof_to_node_.push_back(node);
    }
}

std::vector<double> DofMap::to_nodal(const std::vector<double>& coefficients) const
{
    if (static_cast<int>(coefficients.size()) != size())
        throw DimensionMismatch("to_nodal: coefficient vector has wrong length");
    std::vector<double> nodal(num_nodes(), 0.0);
    for (int d = 0; d < size(); ++d)
        nodal[dof_to_node_[d]] = coefficients[d];
    return nodal;
}

std::vector<double> DofMap::from_nodal(const std::vector<double>& nodal) const
{
    if (static_cast<int>(nodal.size()) != num_nodes())
        throw DimensionMismatch("from_nodal: nodal vector has wrong length");
    std::vector<double> coefficients(size());
    for (int d = 0; d < size(); ++d)
        coefficients[d] = nodal[dof_to_node_[d]];
    return coefficients;
}

ControlSpace build_control_space(const Mesh& coarse)
{
    return ControlSpace{coarse.level(), coarse.num_elements(), coarse.id()};
}

ControlSpace build_control_space(const MeshHierarchy& hierarchy, int fine_level)
{
    if (fine_level <= 0)
        throw PreconditionError("build_control_space: no coarser mesh below level 0");
    if (fine_level >= hierarchy.num_levels())
        throw PreconditionError("build_control_space: hierarchy has no level " + std::to_string(fine_level));
    return build_control_space(hierarchy.level(fine_level - 1));
}

} // namespace stwave
