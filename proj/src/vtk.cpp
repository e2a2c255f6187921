#include "stwave/vtk.hpp"

#include "stwave/errors.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace stwave {

namespace {

void write_fields(std::ostream& out, std::span<const VtkField> fields, std::size_t expected, const char* section)
{
    if (fields.empty())
        return;
    out << section << ' ' << expected << '\n';
    for (const auto& field : fields) {
        if (field.values.size() != expected)
            throw DimensionMismatch("vtk: field '" + field.name + "' has the wrong length");
        out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : field.values)
            out << v << '\n';
    }
}

} // namespace

void write_vtk(std::ostream& out, const Mesh& mesh, std::span<const VtkField> point_data,
               std::span<const VtkField> cell_data, const std::string& title)
{
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << std::setprecision(17);
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (const auto& p : mesh.nodes())
        out << p.x << ' ' << p.t << " 0\n";
    out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
    for (const auto& tri : mesh.elements())
        out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    out << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e)
        out << "5\n";
    write_fields(out, point_data, mesh.nodes().size(), "POINT_DATA");
    write_fields(out, cell_data, mesh.elements().size(), "CELL_DATA");
}

void write_vtk_file(const std::string& path, const Mesh& mesh, std::span<const VtkField> point_data,
                    std::span<const VtkField> cell_data)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    write_vtk(out, mesh, point_data, cell_data);
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace stwave
