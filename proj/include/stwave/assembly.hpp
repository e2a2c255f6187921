#pragma once

#include "stwave/fespace.hpp"
#include "stwave/mesh.hpp"
#include "stwave/quadrature.hpp"
#include "stwave/sparse.hpp"
#include "stwave/targets.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace stwave {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Affine data of a P1 element: area and the constant gradients of the barycentric coordinates.
struct ElementGeometry
{
    std::array<Point, 3> vertices;
    double area = 0.0;
    /// gradients[i] = (d lambda_i / dx, d lambda_i / dt)
    std::array<std::array<double, 2>, 3> gradients{};

    /// Throws DegenerateElement if the area is not positive.
    explicit ElementGeometry(const std::array<Point, 3>& vertices);
};

/// |tau| grad(lambda_i) . grad(lambda_j)
Matrix3 local_stiffness(const ElementGeometry& geom);
/// Entry (j, k) = |tau| (g_kx g_jx - g_kt g_jt): the wave form with test index j and trial index k.
Matrix3 local_wave_form(const ElementGeometry& geom);
/// |tau| / 12 (1 + delta_ij)
Matrix3 local_mass(const ElementGeometry& geom);

enum class Kernel
{
    kStiffness,
    kWave,
    kMass,
};

struct AssemblyOptions
{
    /// Worker threads for the element loop; the result does not depend on it.
    int threads = 1;
};

/// Sum over elements of the local kernel, rows numbered by `rows` and columns by `cols`.
/// Optional per-element weights multiply each local matrix.
CsrMatrix assemble(const Mesh& mesh, const DofMap& rows, const DofMap& cols, Kernel kernel,
                   std::span<const double> element_weights = {}, AssemblyOptions options = {});

/// f_l = integral of field * phi_l, element by element with `rule`.
std::vector<double> assemble_load(const Mesh& mesh, const DofMap& dofs, const ScalarField& field,
                                  const QuadratureRule& rule);

/// P[r, j] = integral over coarse element r of psi_j, where `fine` was refined from `coarse`.
CsrMatrix assemble_coupling(const Mesh& fine, const DofMap& fine_dofs, const Mesh& coarse,
                            const ControlSpace& control);

/// Integral of field^2 over each element.
std::vector<double> element_integrals_of_square(const Mesh& mesh, const ScalarField& field,
                                                const QuadratureRule& rule);

/// Value at `p` of the P1 function with the given nodal values on element `element`.
double evaluate_p1(const Mesh& mesh, int element, std::span<const double> nodal, Point p);

/// Nodal values on `fine` of the P1 function on `coarse` (fine must be refined from coarse).
std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine, std::span<const double> coarse_nodal);

} // namespace stwave
