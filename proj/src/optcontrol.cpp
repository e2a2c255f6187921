#include "stwave/optcontrol.hpp"

#include "stwave/errors.hpp"

#include <cmath>

namespace stwave {

std::optional<Regularization> parse_regularization(std::string_view name)
{
    if (name == "energy")
        return Regularization::kEnergy;
    if (name == "l2")
        return Regularization::kL2;
    return std::nullopt;
}

std::string_view regularization_name(Regularization reg)
{
    return reg == Regularization::kEnergy ? "energy" : "l2";
}

double choose_rho(Regularization reg, double h)
{
    if (!(h > 0.0))
        throw PreconditionError("choose_rho: mesh size must be positive");
    const double h2 = h * h;
    return reg == Regularization::kEnergy ? h2 : h2 * h2;
}

CsrMatrix OptimalitySystem::block() const
{
    const CsrMatrix minus_bt = b.transpose().scaled(-1.0);
    return block_matrix(&upper_left, &b, &minus_bt, &mass, num_adjoint(), num_adjoint(), num_state(),
                        num_state());
}

std::vector<double> OptimalitySystem::block_rhs() const
{
    std::vector<double> rhs(num_adjoint() + num_state(), 0.0);
    std::copy(load.begin(), load.end(), rhs.begin() + num_adjoint());
    return rhs;
}

OptimalitySystem build_system(const Mesh& mesh, const ScalarField& target, const QuadratureRule& rule,
                              const SystemOptions& options)
{
    if (options.variable_rho && options.regularization != Regularization::kEnergy)
        throw Unsupported("variable regularization is only available for energy regularization");

    const MeshSize size = mesh_size(mesh);
    const double h = options.h_measure == MeshSizeMeasure::kMax ? size.h_max : size.h_min;

    OptimalitySystem sys{
        .regularization = options.regularization,
        .rho = 0.0,
        .variable_rho = options.variable_rho,
        .h = h,
        .x_dofs = DofMap(mesh, SpaceKind::kTrialX),
        .y_dofs = DofMap(mesh, SpaceKind::kTestY),
    };
    if (options.rho)
        sys.rho = *options.rho;
    else if (options.rho_power)
        sys.rho = std::pow(h, *options.rho_power);
    else
        sys.rho = choose_rho(options.regularization, h);
    if (options.variable_rho)
        sys.rho = size.h_min * size.h_min;
    if (!(sys.rho > 0.0))
        throw PreconditionError("build_system: rho must be positive");

    const AssemblyOptions assembly{options.threads};
    const Kernel reg_kernel = options.regularization == Regularization::kEnergy ? Kernel::kStiffness : Kernel::kMass;
    sys.regularization_matrix = assemble(mesh, sys.y_dofs, sys.y_dofs, reg_kernel, {}, assembly);
    if (options.variable_rho) {
        std::vector<double> weights(mesh.num_elements());
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const double d = mesh.diameter(e);
            weights[e] = 1.0 / (d * d);
        }
        sys.upper_left = assemble(mesh, sys.y_dofs, sys.y_dofs, Kernel::kStiffness, weights, assembly);
    } else {
        sys.upper_left = sys.regularization_matrix.scaled(1.0 / sys.rho);
    }
    sys.b = assemble(mesh, sys.y_dofs, sys.x_dofs, Kernel::kWave, {}, assembly);
    sys.mass = assemble(mesh, sys.x_dofs, sys.x_dofs, Kernel::kMass, {}, assembly);
    sys.load = assemble_load(mesh, sys.x_dofs, target, rule);
    return sys;
}

OptimalitySystem build_system(const Mesh& mesh, const Target& target, const SystemOptions& options)
{
    const QuadratureRule rule = options.quadrature ? *options.quadrature : target.quadrature();
    return build_system(mesh, target.field(), rule, options);
}

OptimalitySystem build_system(const MeshHierarchy& hierarchy, int level, const Target& target,
                              Regularization reg, std::optional<double> rho_override)
{
    SystemOptions options;
    options.regularization = reg;
    options.rho = rho_override;
    return build_system(hierarchy.level(level), target, options);
}

OptimalitySystem variable_rho_system(const MeshHierarchy& hierarchy, int level, const Target& target,
                                     Regularization reg)
{
    if (reg != Regularization::kEnergy)
        throw Unsupported("variable regularization is only available for energy regularization");
    SystemOptions options;
    options.regularization = reg;
    options.variable_rho = true;
    return build_system(hierarchy.level(level), target, options);
}

void compute_residuals(const OptimalitySystem& sys, Solution& solution)
{
    const int ny = sys.num_adjoint();
    const int nx = sys.num_state();
    std::vector<double> ap(ny), bu(ny), btp(nx), mu(nx);
    sys.upper_left.multiply(solution.p, ap);
    sys.b.multiply(solution.u, bu);
    sys.b.multiply_transpose(solution.p, btp);
    sys.mass.multiply(solution.u, mu);

    std::vector<double> r1(ny), r2(nx);
    for (int i = 0; i < ny; ++i)
        r1[i] = ap[i] + bu[i];
    for (int i = 0; i < nx; ++i)
        r2[i] = -btp[i] + mu[i] - sys.load[i];

    auto relative = [](double residual, double scale) { return scale > 0.0 ? residual / scale : residual; };
    solution.adjoint_residual = relative(norm2(r1), norm2(ap) + norm2(bu));
    solution.state_residual = relative(norm2(r2), norm2(btp) + norm2(mu) + norm2(sys.load));
    const double rhs_norm = norm2(sys.load);
    const double total = std::sqrt(dot(r1, r1) + dot(r2, r2));
    solution.block_residual = relative(total, rhs_norm);
}

Solution solve_block(const OptimalitySystem& sys, LuOptions options)
{
    const LuFactorization factors(sys.block(), options);
    const std::vector<double> z = factors.solve(sys.block_rhs());
    Solution solution;
    solution.p.assign(z.begin(), z.begin() + sys.num_adjoint());
    solution.u.assign(z.begin() + sys.num_adjoint(), z.end());
    solution.solver = "lu";
    compute_residuals(sys, solution);
    return solution;
}

std::vector<double> schur_matvec(double rho, const LuFactorization& a_factors, const CsrMatrix& b,
                                 const CsrMatrix& mass, std::span<const double> u)
{
    std::vector<double> bu = b * u;
    const std::vector<double> w = a_factors.solve(bu);
    std::vector<double> result(mass.rows());
    b.multiply_transpose(w, result);
    const std::vector<double> mu = mass * u;
    for (std::size_t i = 0; i < result.size(); ++i)
        result[i] = mu[i] + rho * result[i];
    return result;
}

Solution solve_schur(const OptimalitySystem& sys, double tol, int max_iterations)
{
    const LuFactorization upper(sys.upper_left);
    const int ny = sys.num_adjoint();
    std::vector<double> bu(ny), w(ny), btw(sys.num_state()), mu(sys.num_state());
    auto apply = [&](std::span<const double> u, std::span<double> y) {
        sys.b.multiply(u, bu);
        upper.solve(bu, w);
        sys.b.multiply_transpose(w, btw);
        sys.mass.multiply(u, mu);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = mu[i] + btw[i];
    };
    CgResult cg = cg_solve(apply, sys.load, tol, max_iterations);

    Solution solution;
    solution.u = std::move(cg.x);
    sys.b.multiply(solution.u, bu);
    solution.p = upper.solve(bu);
    for (double& v : solution.p)
        v = -v;
    solution.iterations = cg.iterations;
    solution.solver = "schur-cg";
    compute_residuals(sys, solution);
    return solution;
}

} // namespace stwave
