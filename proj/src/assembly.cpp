#include "stwave/assembly.hpp"

#include "stwave/errors.hpp"

#include <algorithm>
#include <thread>

namespace stwave {

ElementGeometry::ElementGeometry(const std::array<Point, 3>& v)
    : vertices(v)
{
    const double twice_area = (v[1].x - v[0].x) * (v[2].t - v[0].t) - (v[2].x - v[0].x) * (v[1].t - v[0].t);
    area = 0.5 * twice_area;
    if (!(area > 0.0))
        throw DegenerateElement("element geometry has non-positive area");
    for (int i = 0; i < 3; ++i) {
        const Point& a = v[(i + 1) % 3];
        const Point& b = v[(i + 2) % 3];
        gradients[i] = {(a.t - b.t) / twice_area, (b.x - a.x) / twice_area};
    }
}

Matrix3 local_stiffness(const ElementGeometry& geom)
{
    Matrix3 k{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            k[i][j] = geom.area
                      * (geom.gradients[i][0] * geom.gradients[j][0] + geom.gradients[i][1] * geom.gradients[j][1]);
    return k;
}

Matrix3 local_wave_form(const ElementGeometry& geom)
{
    Matrix3 b{};
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            b[j][k] = geom.area
                      * (geom.gradients[k][0] * geom.gradients[j][0] - geom.gradients[k][1] * geom.gradients[j][1]);
    return b;
}

Matrix3 local_mass(const ElementGeometry& geom)
{
    Matrix3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m[i][j] = geom.area / 12.0 * (i == j ? 2.0 : 1.0);
    return m;
}

namespace {

Matrix3 local_kernel(Kernel kernel, const ElementGeometry& geom)
{
    switch (kernel) {
    case Kernel::kStiffness:
        return local_stiffness(geom);
    case Kernel::kWave:
        return local_wave_form(geom);
    case Kernel::kMass:
        return local_mass(geom);
    }
    return {};
}

void check_same_mesh(const Mesh& mesh, const DofMap& dofs)
{
    if (dofs.mesh_id() != mesh.id() || dofs.num_nodes() != mesh.num_nodes())
        throw DimensionMismatch("dof map was built on a different mesh");
}

} // namespace

CsrMatrix assemble(const Mesh& mesh, const DofMap& rows, const DofMap& cols, Kernel kernel,
                   std::span<const double> element_weights, AssemblyOptions options)
{
    check_same_mesh(mesh, rows);
    check_same_mesh(mesh, cols);
    if (!element_weights.empty() && static_cast<int>(element_weights.size()) != mesh.num_elements())
        throw DimensionMismatch("assemble: one weight per element required");

    const int num_elements = mesh.num_elements();
    const int workers = std::clamp(options.threads, 1, std::max(1, num_elements));
    std::vector<std::vector<Triplet>> buffers(workers);

    auto work = [&](int chunk) {
        const int first = static_cast<int>(static_cast<long>(num_elements) * chunk / workers);
        const int last = static_cast<int>(static_cast<long>(num_elements) * (chunk + 1) / workers);
        auto& out = buffers[chunk];
        out.reserve(9 * (last - first));
        for (int e = first; e < last; ++e) {
            const ElementGeometry geom(mesh.vertices(e));
            const Matrix3 local = local_kernel(kernel, geom);
            const double weight = element_weights.empty() ? 1.0 : element_weights[e];
            const auto& tri = mesh.elements()[e];
            for (int i = 0; i < 3; ++i) {
                const int r = rows.dof(tri[i]);
                if (r < 0)
                    continue;
                for (int j = 0; j < 3; ++j) {
                    const int c = cols.dof(tri[j]);
                    if (c >= 0)
                        out.push_back({r, c, weight * local[i][j]});
                }
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (int chunk = 0; chunk < workers; ++chunk)
            pool.emplace_back(work, chunk);
    }

    // chunks are contiguous element ranges, so concatenation restores element order
    std::vector<Triplet> triplets;
    std::size_t total = 0;
    for (const auto& b : buffers)
        total += b.size();
    triplets.reserve(total);
    for (const auto& b : buffers)
        triplets.insert(triplets.end(), b.begin(), b.end());
    return CsrMatrix::from_triplets(rows.size(), cols.size(), std::move(triplets));
}

std::vector<double> assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarField& field,
                                  const QuadratureRule& rule)
{
    check_same_mesh(mesh, dofs);
    std::vector<double> load(dofs.size(), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto v = mesh.vertices(e);
        const double area = mesh.area(e);
        std::array<double, 3> local{0.0, 0.0, 0.0};
        for (int q = 0; q < rule.size(); ++q) {
            const Point p = map_point(v, rule.points[q]);
            const double value = rule.weights[q] * field(p.x, p.t);
            for (int i = 0; i < 3; ++i)
                local[i] += value * rule.points[q][i];
        }
        const auto& tri = mesh.elements()[e];
        for (int i = 0; i < 3; ++i) {
            const int d = dofs.dof(tri[i]);
            if (d >= 0)
                load[d] += area * local[i];
        }
    }
    return load;
}

CsrMatrix assemble_coupling(const Mesh& fine, const DofMap& fine_dofs, const Mesh& coarse,
                            const ControlSpace& control)
{
    check_same_mesh(fine, fine_dofs);
    if (fine.parent_mesh_id() != coarse.id() || control.mesh_id != coarse.id()
        || control.size != coarse.num_elements())
        throw DimensionMismatch("assemble_coupling: fine mesh, coarse mesh and control space do not match");

    std::vector<Triplet> triplets;
    triplets.reserve(3 * fine.num_elements());
    for (int e = 0; e < fine.num_elements(); ++e) {
        const int r = fine.parent()[e];
        const double hat_integral = fine.area(e) / 3.0;
        for (int node : fine.elements()[e]) {
            const int j = fine_dofs.dof(node);
            if (j >= 0)
                triplets.push_back({r, j, hat_integral});
        }
    }
    return CsrMatrix::from_triplets(control.size, fine_dofs.size(), std::move(triplets));
}

std::vector<double> element_integrals_of_square(const Mesh& mesh, const ScalarField& field,
                                                const QuadratureRule& rule)
{
    std::vector<double> result(mesh.num_elements(), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto v = mesh.vertices(e);
        double sum = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            const Point p = map_point(v, rule.points[q]);
            const double value = field(p.x, p.t);
            sum += rule.weights[q] * value * value;
        }
        result[e] = mesh.area(e) * sum;
    }
    return result;
}

double evaluate_p1(const Mesh& mesh, int element, std::span<const double> nodal, Point p)
{
    const ElementGeometry geom(mesh.vertices(element));
    const auto& tri = mesh.elements()[element];
    const Point& v0 = geom.vertices[0];
    double value = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double lambda = (i == 0 ? 1.0 : 0.0) + geom.gradients[i][0] * (p.x - v0.x)
                              + geom.gradients[i][1] * (p.t - v0.t);
        value += lambda * nodal[tri[i]];
    }
    return value;
}

std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine, std::span<const double> coarse_nodal)
{
    if (fine.parent_mesh_id() != coarse.id())
        throw DimensionMismatch("prolongate: fine mesh was not refined from the coarse mesh");
    if (static_cast<int>(coarse_nodal.size()) != coarse.num_nodes())
        throw DimensionMismatch("prolongate: nodal vector has wrong length");
    std::vector<double> fine_nodal(fine.num_nodes(), 0.0);
    std::vector<char> done(fine.num_nodes(), 0);
    for (int e = 0; e < fine.num_elements(); ++e) {
        const int parent = fine.parent()[e];
        for (int node : fine.elements()[e]) {
            if (done[node])
                continue;
            // nodes inherited from the coarse mesh keep their exact value
            fine_nodal[node] = node < coarse.num_nodes() ? coarse_nodal[node]
                                                         : evaluate_p1(coarse, parent, coarse_nodal,
                                                                       fine.nodes()[node]);
            done[node] = 1;
        }
    }
    return fine_nodal;
}

} // namespace stwave
