#pragma once

#include "stwave/assembly.hpp"
#include "stwave/fespace.hpp"
#include "stwave/mesh.hpp"
#include "stwave/optcontrol.hpp"
#include "stwave/quadrature.hpp"
#include "stwave/targets.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace stwave {

/// Per-element L2 errors eta_l and their l2 sum.
struct ErrorField
{
    std::vector<double> eta;
    double global = 0.0;
};

/// eta_l^2 = integral over tau_l of (u_h - target)^2, u_h built from `u` with constrained nodes at zero.
ErrorField element_errors(const Mesh& mesh, const DofMap& x_dofs, std::span<const double> u,
                          const ScalarField& target, const QuadratureRule& rule);

/// ||target||_{L2(Q)} with the same element quadrature as the errors.
double target_l2_norm(const Mesh& mesh, const ScalarField& target, const QuadratureRule& rule);

/// sqrt(u^T M u).
double state_l2_norm(const CsrMatrix& mass, std::span<const double> u);

struct ConvergenceRecord
{
    int level = 0;
    int dofs = 0;
    int elements = 0;
    double h = 0.0;
    double rho = 0.0;
    double error = 0.0;
    std::optional<double> eoc;
};

/// eoc_L = log(e_{L-1} / e_L) / log(h_{L-1} / h_L); undefined for zero errors or equal h.
void compute_eoc(std::vector<ConvergenceRecord>& records);

/// Least-squares slope of log(error) against log(h) over the last `count` records.
std::optional<double> fitted_eoc(std::span<const ConvergenceRecord> records, int count);

/// Header `level,dofs,elements,h,rho,error,eoc`; floats in round-trip scientific notation,
/// missing eoc as an empty field.
void write_csv(std::ostream& out, std::span<const ConvergenceRecord> records);

/// Result of the energy control reconstruction on a coarse mesh.
struct ControlReconstruction
{
    std::vector<double> z;   // one value per coarse element
    std::vector<double> psi; // multiplier-free part on the fine Y dofs
    /// ||P psi|| / ||B u||
    double constraint_residual = 0.0;
};

/**
 * Piecewise constant control on `coarse` from the state `u_fine` on `fine`:
 * solves [[A_h, P^T], [P, 0]] (psi, z) = (B_h u, 0) by sparse LU.
 * Throws SingularMatrix when the pairing is not inf-sup stable (refine the fine mesh).
 */
ControlReconstruction reconstruct_energy_control(const Mesh& fine, const Mesh& coarse,
                                                 std::span<const double> u_fine);

/// z = (P A^-1 P^T)^-1 P A^-1 B u, evaluated with CG on the coarse Schur complement.
std::vector<double> energy_control_explicit(const Mesh& fine, const Mesh& coarse, std::span<const double> u_fine,
                                            double tol = 1e-13);

/// Hierarchy form: state solved on `fine_level`, control on `fine_level - 1`.
ControlReconstruction reconstruct_control(const MeshHierarchy& hierarchy, int fine_level,
                                          std::span<const double> u_fine);

/// L2 regularization: z = -p / rho at the Y dofs.
std::vector<double> reconstruct_l2_control(const OptimalitySystem& sys, const Solution& solution);

/// Jump seminorm sqrt(sum over interior edges of (z_i - z_j)^2) of an element-wise field.
double jump_seminorm(const Mesh& mesh, std::span<const double> element_values);

/// H1 seminorm of a nodal P1 field.
double p1_seminorm(const Mesh& mesh, std::span<const double> nodal);

} // namespace stwave
