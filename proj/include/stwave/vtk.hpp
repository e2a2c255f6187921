#pragma once

#include "stwave/mesh.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stwave {

struct VtkField
{
    std::string name;
    std::span<const double> values;
};

/// Legacy ASCII VTK unstructured grid: triangles (cell type 5) in the (x, t) plane with z = 0.
/// Point fields need one value per node, cell fields one per element.
void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const VtkField> point_data = {},
               std::span<const VtkField> cell_data = {}, const std::string& title = "stwave");

void write_vtk_file(const std::string& path, const Mesh& mesh, std::span<const VtkField> point_data = {},
                    std::span<const VtkField> cell_data = {});

} // namespace stwave
