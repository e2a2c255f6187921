#include "stwave/adapt.hpp"

#include "stwave/errors.hpp"

#include <algorithm>
#include <numeric>

namespace stwave {

Solution solve(const OptimalitySystem& sys, SolverKind solver)
{
    return solver == SolverKind::kLu ? solve_block(sys) : solve_schur(sys);
}

std::vector<int> mark(std::span<const double> eta, double theta)
{
    if (eta.empty())
        throw PreconditionError("mark: no indicators");
    const double max_eta = *std::max_element(eta.begin(), eta.end());
    if (!(max_eta > 0.0))
        throw AlreadyConverged("mark: all indicators vanish");
    const double threshold = theta * max_eta;
    std::vector<int> marked;
    for (std::size_t k = 0; k < eta.size(); ++k)
        if (eta[k] >= threshold)
            marked.push_back(static_cast<int>(k));
    return marked;
}

std::vector<int> mark_bulk(std::span<const double> eta, double theta)
{
    if (eta.empty())
        throw PreconditionError("mark_bulk: no indicators");
    double total = 0.0;
    for (double e : eta)
        total += e * e;
    if (!(total > 0.0))
        throw AlreadyConverged("mark_bulk: all indicators vanish");

    std::vector<int> order(eta.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
    std::vector<int> marked;
    double sum = 0.0;
    for (int k : order) {
        marked.push_back(k);
        sum += eta[k] * eta[k];
        if (sum >= theta * total)
            break;
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

void AdaptiveConfig::validate() const
{
    if (!(theta > 0.0 && theta < 1.0))
        throw PreconditionError("theta must lie in (0, 1)");
    if (max_level < 0)
        throw PreconditionError("max_level must be non-negative");
    if (max_dofs < 1)
        throw PreconditionError("max_dofs must be positive");
    if (variable_rho && (rho || rho_power))
        throw PreconditionError("variable rho cannot be combined with a rho override");
}

namespace {

ConvergenceRecord solve_level(const Mesh& mesh, const Target& target, const SystemOptions& options,
                              SolverKind solver, const LevelObserver& observer)
{
    const OptimalitySystem sys = build_system(mesh, target, options);
    const Solution solution = solve(sys, solver);
    const ErrorField errors = element_errors(mesh, sys.x_dofs, solution.u, target.field(), target.quadrature());
    const ConvergenceRecord record{mesh.level(), sys.num_state(), mesh.num_elements(), sys.h, sys.rho,
                                   errors.global, std::nullopt};
    if (observer)
        observer(LevelData{mesh, sys, solution, errors, record});
    return record;
}

} // namespace

StudyResult uniform_loop(Mesh initial, const Target& target, Regularization reg, const UniformConfig& config,
                         const LevelObserver& observer)
{
    if (config.levels < 0)
        throw PreconditionError("levels must be non-negative");
    StudyResult result{{}, MeshHierarchy(std::move(initial)), std::nullopt};
    SystemOptions options;
    options.regularization = reg;
    options.h_measure = MeshSizeMeasure::kMax;
    options.rho = config.rho;
    options.rho_power = config.rho_power;
    options.threads = config.threads;

    try {
        for (int level = 0; level <= config.levels; ++level) {
            if (level > 0)
                result.hierarchy.refine_uniform();
            result.records.push_back(
                solve_level(result.hierarchy.finest(), target, options, config.solver, observer));
        }
    } catch (const Error& e) {
        result.failure = e.what();
    }
    compute_eoc(result.records);
    return result;
}

StudyResult adaptive_loop(Mesh initial, const Target& target, Regularization reg, const AdaptiveConfig& config,
                          const LevelObserver& observer)
{
    config.validate();
    StudyResult result{{}, MeshHierarchy(std::move(initial)), std::nullopt};
    SystemOptions options;
    options.regularization = reg;
    options.h_measure = MeshSizeMeasure::kMin;
    options.rho = config.rho;
    options.rho_power = config.rho_power;
    options.variable_rho = config.variable_rho;
    options.threads = config.threads;

    try {
        for (int level = 0; level <= config.max_level; ++level) {
            const Mesh& mesh = result.hierarchy.finest();
            const OptimalitySystem sys = build_system(mesh, target, options);
            const Solution solution = solve(sys, config.solver);
            const ErrorField errors
                = element_errors(mesh, sys.x_dofs, solution.u, target.field(), target.quadrature());
            result.records.push_back(ConvergenceRecord{mesh.level(), sys.num_state(), mesh.num_elements(), sys.h,
                                                       sys.rho, errors.global, std::nullopt});
            if (observer)
                observer(LevelData{mesh, sys, solution, errors, result.records.back()});
            if (level == config.max_level || sys.num_state() >= config.max_dofs)
                break;
            const std::vector<int> marked = config.marking == MarkingStrategy::kMaximum
                                                ? mark(errors.eta, config.theta)
                                                : mark_bulk(errors.eta, config.theta);
            result.hierarchy.refine_marked(marked);
        }
    } catch (const AlreadyConverged&) {
        // exact reproduction of the target; nothing left to refine
    } catch (const Error& e) {
        result.failure = e.what();
    }
    compute_eoc(result.records);
    return result;
}

} // namespace stwave
