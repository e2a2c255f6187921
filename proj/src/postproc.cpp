#include "stwave/postproc.hpp"

#include "stwave/errors.hpp"
#include "stwave/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace stwave {

ErrorField element_errors(const Mesh& mesh, const DofMap& x_dofs, std::span<const double> u,
                          const ScalarField& target, const QuadratureRule& rule)
{
    if (x_dofs.mesh_id() != mesh.id())
        throw DimensionMismatch("element_errors: dof map belongs to a different mesh");
    const std::vector<double> nodal = x_dofs.to_nodal(std::vector<double>(u.begin(), u.end()));
    ErrorField field;
    field.eta.resize(mesh.num_elements());
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto v = mesh.vertices(e);
        const auto& tri = mesh.elements()[e];
        double local = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            const auto& bary = rule.points[q];
            const Point p = map_point(v, bary);
            const double uh = bary[0] * nodal[tri[0]] + bary[1] * nodal[tri[1]] + bary[2] * nodal[tri[2]];
            const double diff = uh - target(p.x, p.t);
            local += rule.weights[q] * diff * diff;
        }
        local *= mesh.area(e);
        field.eta[e] = std::sqrt(local);
        sum += local;
    }
    field.global = std::sqrt(sum);
    return field;
}

double target_l2_norm(const Mesh& mesh, const ScalarField& target, const QuadratureRule& rule)
{
    double sum = 0.0;
    for (double v : element_integrals_of_square(mesh, target, rule))
        sum += v;
    return std::sqrt(sum);
}

double state_l2_norm(const CsrMatrix& mass, std::span<const double> u)
{
    const std::vector<double> mu = mass * u;
    return std::sqrt(std::max(0.0, dot(u, mu)));
}

void compute_eoc(std::vector<ConvergenceRecord>& records)
{
    if (!records.empty())
        records.front().eoc.reset();
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& prev = records[i - 1];
        auto& cur = records[i];
        cur.eoc.reset();
        if (prev.error > 0.0 && cur.error > 0.0 && prev.h > 0.0 && cur.h > 0.0 && prev.h != cur.h)
            cur.eoc = std::log(prev.error / cur.error) / std::log(prev.h / cur.h);
    }
}

std::optional<double> fitted_eoc(std::span<const ConvergenceRecord> records, int count)
{
    if (count < 2 || static_cast<int>(records.size()) < count)
        return std::nullopt;
    const auto tail = records.last(count);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& r : tail) {
        if (!(r.error > 0.0) || !(r.h > 0.0))
            return std::nullopt;
        const double lx = std::log(r.h);
        const double ly = std::log(r.error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = count;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0)
        return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

void write_csv(std::ostream& out, std::span<const ConvergenceRecord> records)
{
    out << "level,dofs,elements,h,rho,error,eoc\n";
    char buffer[64];
    auto sci = [&buffer](double v) {
        std::snprintf(buffer, sizeof(buffer), "%.17e", v);
        return std::string(buffer);
    };
    for (const auto& r : records) {
        out << r.level << ',' << r.dofs << ',' << r.elements << ',' << sci(r.h) << ',' << sci(r.rho) << ','
            << sci(r.error) << ',';
        if (r.eoc)
            out << sci(*r.eoc);
        out << '\n';
    }
}

namespace {

struct ControlOperators
{
    DofMap y_dofs;
    CsrMatrix a;
    CsrMatrix p;
    std::vector<double> bu;
};

ControlOperators control_operators(const Mesh& fine, const Mesh& coarse, std::span<const double> u_fine)
{
    const DofMap x_dofs(fine, SpaceKind::kTrialX);
    if (static_cast<int>(u_fine.size()) != x_dofs.size())
        throw DimensionMismatch("control reconstruction: state vector does not match the fine mesh");
    ControlOperators ops{DofMap(fine, SpaceKind::kTestY), {}, {}, {}};
    ops.a = assemble(fine, ops.y_dofs, ops.y_dofs, Kernel::kStiffness);
    ops.p = assemble_coupling(fine, ops.y_dofs, coarse, build_control_space(coarse));
    const CsrMatrix b = assemble(fine, ops.y_dofs, x_dofs, Kernel::kWave);
    ops.bu = b * u_fine;
    return ops;
}

} // namespace

ControlReconstruction reconstruct_energy_control(const Mesh& fine, const Mesh& coarse,
                                                 std::span<const double> u_fine)
{
    const ControlOperators ops = control_operators(fine, coarse, u_fine);
    const int ny = ops.y_dofs.size();
    const int nh = ops.p.rows();
    const CsrMatrix pt = ops.p.transpose();
    const CsrMatrix saddle = block_matrix(&ops.a, &pt, &ops.p, nullptr, ny, ny, nh, nh);

    std::vector<double> rhs(ny + nh, 0.0);
    std::copy(ops.bu.begin(), ops.bu.end(), rhs.begin());

    std::vector<double> sol;
    try {
        sol = LuFactorization(saddle).solve(rhs);
    } catch (const SingularMatrix& e) {
        throw SingularMatrix(std::string(e.what())
                             + "; the control pairing is not stable, refine the adjoint mesh once more");
    }

    ControlReconstruction result;
    result.psi.assign(sol.begin(), sol.begin() + ny);
    result.z.assign(sol.begin() + ny, sol.end());
    const std::vector<double> constraint = ops.p * result.psi;
    const double scale = norm2(ops.bu);
    result.constraint_residual = scale > 0.0 ? norm2(constraint) / scale : norm2(constraint);
    return result;
}

std::vector<double> energy_control_explicit(const Mesh& fine, const Mesh& coarse, std::span<const double> u_fine,
                                            double tol)
{
    const ControlOperators ops = control_operators(fine, coarse, u_fine);
    const LuFactorization a_factors(ops.a);
    const std::vector<double> a_inv_bu = a_factors.solve(ops.bu);
    const std::vector<double> rhs = ops.p * a_inv_bu;

    std::vector<double> ptz(ops.p.cols()), w(ops.p.cols());
    auto apply = [&](std::span<const double> z, std::span<double> y) {
        ops.p.multiply_transpose(z, ptz);
        a_factors.solve(ptz, w);
        ops.p.multiply(w, y);
    };
    return cg_solve(apply, rhs, tol, 20 * static_cast<int>(rhs.size()) + 100).x;
}

ControlReconstruction reconstruct_control(const MeshHierarchy& hierarchy, int fine_level,
                                          std::span<const double> u_fine)
{
    build_control_space(hierarchy, fine_level);
    return reconstruct_energy_control(hierarchy.level(fine_level), hierarchy.level(fine_level - 1), u_fine);
}

std::vector<double> reconstruct_l2_control(const OptimalitySystem& sys, const Solution& solution)
{
    if (sys.regularization != Regularization::kL2)
        throw PreconditionError("reconstruct_l2_control: system is not L2-regularized");
    std::vector<double> z(solution.p.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = -solution.p[i] / sys.rho;
    return z;
}

double jump_seminorm(const Mesh& mesh, std::span<const double> element_values)
{
    if (static_cast<int>(element_values.size()) != mesh.num_elements())
        throw DimensionMismatch("jump_seminorm: one value per element required");
    std::map<std::pair<int, int>, int> first_owner;
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& tri = mesh.elements()[e];
        for (int k = 0; k < 3; ++k) {
            const auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
            auto [it, inserted] = first_owner.try_emplace({key.first, key.second}, e);
            if (!inserted) {
                const double jump = element_values[e] - element_values[it->second];
                sum += jump * jump;
            }
        }
    }
    return std::sqrt(sum);
}

double p1_seminorm(const Mesh& mesh, std::span<const double> nodal)
{
    if (static_cast<int>(nodal.size()) != mesh.num_nodes())
        throw DimensionMismatch("p1_seminorm: one value per node required");
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Matrix3 k = local_stiffness(ElementGeometry(mesh.vertices(e)));
        const auto& tri = mesh.elements()[e];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                sum += nodal[tri[i]] * k[i][j] * nodal[tri[j]];
    }
    return std::sqrt(std::max(0.0, sum));
}

} // namespace stwave
