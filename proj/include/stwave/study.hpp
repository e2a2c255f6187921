#pragma once

#include "stwave/adapt.hpp"
#include "stwave/optcontrol.hpp"
#include "stwave/postproc.hpp"
#include "stwave/targets.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stwave {

enum class Command
{
    kUniform,
    kAdaptive,
    kControl,
    kU4Study,
};

enum class RefinementMode
{
    kUniform,
    kAdaptive,
};

std::string_view command_name(Command command);
std::string_view refinement_mode_name(RefinementMode mode);

/// Everything one command needs. Defaults reproduce the standard uniform energy study.
struct RunConfig
{
    Command command = Command::kUniform;
    TargetKind target = TargetKind::kU1Smooth;
    U1Support u1_support = U1Support::kVerbatim;
    Regularization regularization = Regularization::kEnergy;
    /// Only consulted by the control command; the others imply it.
    RefinementMode mode = RefinementMode::kUniform;
    /// Uniform: levels 0..levels. Adaptive: at most levels + 1 solves.
    int levels = 5;
    double theta = 0.5;
    MarkingStrategy marking = MarkingStrategy::kMaximum;
    int max_dofs = 1'000'000;
    std::optional<double> rho;
    std::optional<int> rho_power;
    bool variable_rho = false;
    /// The initial mesh has cells x cells criss-cross squares.
    int cells = 4;
    std::filesystem::path out = "results";
    bool dump_meshes = false;
    bool write_vtk = false;
    SolverKind solver = SolverKind::kLu;
    int threads = 1;

    /// Throws PreconditionError on values that cannot be run.
    void validate() const;
    RefinementMode effective_mode() const;
};

/// `<target>_<reg>_<mode>`
std::string run_directory_name(const RunConfig& config);

struct ControlStats
{
    int level = 0;
    int elements = 0;
    int control_dofs = 0;
    double control_l2 = 0.0;
    /// Jump seminorm (piecewise constant control) or H1 seminorm (nodal control).
    double seminorm = 0.0;
    /// Only meaningful for the energy reconstruction.
    double constraint_residual = 0.0;
};

void write_control_csv(std::ostream& out, std::span<const ControlStats> stats);

struct RunOutcome
{
    std::filesystem::path directory;
    std::vector<ConvergenceRecord> records;
    std::vector<ControlStats> controls;
    /// u4 study only: the same run with rho = h^3.
    std::vector<ConvergenceRecord> remedy_records;
    std::optional<std::string> failure;

    /// 0 on success, 2 after a numerical failure.
    int exit_code() const { return failure ? 2 : 0; }
};

/// Runs the command, writing records.csv (and whatever else it produces) below config.out.
/// Numerical failures are reported in the outcome; the partial CSV is still written.
RunOutcome run(const RunConfig& config);

} // namespace stwave
