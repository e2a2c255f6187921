#pragma once

#include "stwave/assembly.hpp"
#include "stwave/fespace.hpp"
#include "stwave/mesh.hpp"
#include "stwave/solvers.hpp"
#include "stwave/sparse.hpp"
#include "stwave/targets.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stwave {

enum class Regularization
{
    kEnergy, // control cost in the dual of the adjoint space, upper-left block rho^-1 A_h
    kL2,     // control cost in L2, upper-left block rho^-1 Mbar_h
};

std::optional<Regularization> parse_regularization(std::string_view name);
std::string_view regularization_name(Regularization reg);

/// Which element diameter sets the regularization parameter.
enum class MeshSizeMeasure
{
    kMax, // uniform meshes
    kMin, // adaptive meshes
};

/// rho = h^2 for energy and h^4 for L2 regularization.
double choose_rho(Regularization reg, double h);

struct SystemOptions
{
    Regularization regularization = Regularization::kEnergy;
    MeshSizeMeasure h_measure = MeshSizeMeasure::kMax;
    /// Replaces the default rho entirely.
    std::optional<double> rho;
    /// rho = h^power instead of the default power of the regularization.
    std::optional<int> rho_power;
    /// Element-wise rho = h_tau^2 (energy only).
    bool variable_rho = false;
    /// Quadrature for the load; defaults to the target's own rule.
    std::optional<QuadratureRule> quadrature;
    int threads = 1;
};

/**
 * Discrete first-order optimality system
 *
 *     [ rho^-1 R   B ] [p]   [0]
 *     [ -B^T       M ] [u] = [f]
 *
 * with R = A_h (energy) or Mbar_h (L2), B the wave form (adjoint rows, state columns),
 * M the state mass matrix and f the load of the target.  `upper_left` already
 * contains the factor rho^-1 (element-wise in variable mode).
 */
struct OptimalitySystem
{
    Regularization regularization = Regularization::kEnergy;
    /// Scalar parameter; in variable mode the value for the smallest element.
    double rho = 0.0;
    bool variable_rho = false;
    double h = 0.0;

    DofMap x_dofs;
    DofMap y_dofs;
    CsrMatrix regularization_matrix; // A_h or Mbar_h, unscaled
    CsrMatrix upper_left;
    CsrMatrix b;
    CsrMatrix mass;
    std::vector<double> load;

    int num_state() const { return x_dofs.size(); }
    int num_adjoint() const { return y_dofs.size(); }

    /// Full block matrix; the off-diagonal blocks are B and -B^T of the same stored values.
    CsrMatrix block() const;
    std::vector<double> block_rhs() const;
};

OptimalitySystem build_system(const Mesh& mesh, const ScalarField& target, const QuadratureRule& rule,
                              const SystemOptions& options);
OptimalitySystem build_system(const Mesh& mesh, const Target& target, const SystemOptions& options);
OptimalitySystem build_system(const MeshHierarchy& hierarchy, int level, const Target& target,
                              Regularization reg, std::optional<double> rho_override = std::nullopt);

/// Energy system with rho^-1 replaced by h_tau^-2 element by element. Throws Unsupported for L2.
OptimalitySystem variable_rho_system(const MeshHierarchy& hierarchy, int level, const Target& target,
                                     Regularization reg = Regularization::kEnergy);

struct Solution
{
    std::vector<double> u; // state coefficients on the X dofs
    std::vector<double> p; // adjoint coefficients on the Y dofs
    /// ||K z - rhs|| / ||rhs|| of the block system (0 for a zero right-hand side).
    double block_residual = 0.0;
    /// Relative residuals of the two block rows, scaled by the row magnitudes.
    double adjoint_residual = 0.0;
    double state_residual = 0.0;
    int iterations = 0;
    std::string solver;
};

/// Direct solve of the block system by sparse LU.
Solution solve_block(const OptimalitySystem& sys, LuOptions options = {});

/// (M + B^T (rho^-1 R)^-1 B) u = f by CG, then p = -(rho^-1 R)^-1 B u.
Solution solve_schur(const OptimalitySystem& sys, double tol = 1e-12, int max_iterations = 10000);

/// M u + rho B^T A^-1 B u, with A given by its factorization.
std::vector<double> schur_matvec(double rho, const LuFactorization& a_factors, const CsrMatrix& b,
                                 const CsrMatrix& mass, std::span<const double> u);

/// Fills the residual fields of `solution` for `sys`.
void compute_residuals(const OptimalitySystem& sys, Solution& solution);

} // namespace stwave
