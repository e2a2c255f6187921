#pragma once

#include "stwave/mesh.hpp"
#include "stwave/optcontrol.hpp"
#include "stwave/postproc.hpp"
#include "stwave/targets.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stwave {

enum class MarkingStrategy
{
    kMaximum, // eta_k >= theta * max eta
    kBulk,    // smallest set with sum eta^2 >= theta * total
};

enum class SolverKind
{
    kLu,
    kSchurCg,
};

Solution solve(const OptimalitySystem& sys, SolverKind solver);

/// Elements with eta_k >= theta * max_l eta_l. Throws AlreadyConverged if all indicators vanish.
std::vector<int> mark(std::span<const double> eta, double theta);

/// Classic bulk criterion on the squared indicators; returns indices in ascending order.
std::vector<int> mark_bulk(std::span<const double> eta, double theta);

struct AdaptiveConfig
{
    double theta = 0.5;
    /// Levels 0..max_level are solved at most.
    int max_level = 10;
    /// No further refinement once the state space reaches this size.
    int max_dofs = 1'000'000;
    MarkingStrategy marking = MarkingStrategy::kMaximum;
    /// Element-wise rho = h_tau^2 instead of the scalar h_min^2.
    bool variable_rho = false;
    std::optional<int> rho_power;
    std::optional<double> rho;
    SolverKind solver = SolverKind::kLu;
    int threads = 1;

    /// Throws PreconditionError unless 0 < theta < 1 and the limits are sensible.
    void validate() const;
};

/// Everything known about one solved level, passed to observers.
struct LevelData
{
    const Mesh& mesh;
    const OptimalitySystem& system;
    const Solution& solution;
    const ErrorField& errors;
    const ConvergenceRecord& record;
};

using LevelObserver = std::function<void(const LevelData&)>;

struct StudyResult
{
    std::vector<ConvergenceRecord> records;
    MeshHierarchy hierarchy;
    /// Set when a numerical error stopped the run early.
    std::optional<std::string> failure;
};

/// solve -> indicate -> mark -> refine, starting from `initial`.
StudyResult adaptive_loop(Mesh initial, const Target& target, Regularization reg, const AdaptiveConfig& config,
                          const LevelObserver& observer = {});

struct UniformConfig
{
    int levels = 5;
    std::optional<int> rho_power;
    std::optional<double> rho;
    SolverKind solver = SolverKind::kLu;
    int threads = 1;
};

/// Levels 0..levels of red refinement with rho from h_max.
StudyResult uniform_loop(Mesh initial, const Target& target, Regularization reg, const UniformConfig& config,
                         const LevelObserver& observer = {});

} // namespace stwave
