#include "stwave/study.hpp"

#include "stwave/assembly.hpp"
#include "stwave/errors.hpp"
#include "stwave/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace stwave {

std::string_view command_name(Command command)
{
    switch (command) {
    case Command::kUniform:
        return "uniform";
    case Command::kAdaptive:
        return "adaptive";
    case Command::kControl:
        return "control";
    case Command::kU4Study:
        return "u4-study";
    }
    return "unknown";
}

std::string_view refinement_mode_name(RefinementMode mode)
{
    return mode == RefinementMode::kUniform ? "uniform" : "adaptive";
}

RefinementMode RunConfig::effective_mode() const
{
    switch (command) {
    case Command::kAdaptive:
        return RefinementMode::kAdaptive;
    case Command::kControl:
        return mode;
    default:
        return RefinementMode::kUniform;
    }
}

void RunConfig::validate() const
{
    if (levels < 0)
        throw PreconditionError("--levels must be non-negative");
    if (!(theta > 0.0 && theta < 1.0))
        throw PreconditionError("--theta must lie in (0, 1)");
    if (cells < 1)
        throw PreconditionError("--cells must be positive");
    if (max_dofs < 1)
        throw PreconditionError("--max-dofs must be positive");
    if (threads < 1)
        throw PreconditionError("--threads must be positive");
    if (rho && !(*rho > 0.0 && std::isfinite(*rho)))
        throw PreconditionError("--rho must be positive");
    if (rho_power && (*rho_power < 2 || *rho_power > 4))
        throw PreconditionError("--rho-power must be 2, 3 or 4");
    if (rho && rho_power)
        throw PreconditionError("--rho and --rho-power are mutually exclusive");
    if (variable_rho) {
        if (regularization != Regularization::kEnergy)
            throw PreconditionError("--variable-rho requires --reg energy");
        if (rho || rho_power)
            throw PreconditionError("--variable-rho cannot be combined with --rho or --rho-power");
        if (effective_mode() != RefinementMode::kAdaptive)
            throw PreconditionError("--variable-rho is only available for adaptive refinement");
    }
    if (command == Command::kU4Study && (target != TargetKind::kU4Sine || regularization != Regularization::kEnergy))
        throw PreconditionError("u4-study runs target u4 with energy regularization only");
    if (command == Command::kU4Study && (rho || variable_rho))
        throw PreconditionError("u4-study sets rho itself; use --rho-power to change the first run");
}

std::string run_directory_name(const RunConfig& config)
{
    std::string mode = config.command == Command::kU4Study
                           ? std::string(command_name(config.command))
                           : std::string(refinement_mode_name(config.effective_mode()));
    return std::string(target_name(config.target)) + "_" + std::string(regularization_name(config.regularization))
           + "_" + mode;
}

void write_control_csv(std::ostream& out, std::span<const ControlStats> stats)
{
    out << "level,elements,control_dofs,control_l2,seminorm,constraint_residual\n";
    char buffer[128];
    for (const auto& s : stats) {
        std::snprintf(buffer, sizeof(buffer), "%d,%d,%d,%.17e,%.17e,%.17e\n", s.level, s.elements, s.control_dofs,
                      s.control_l2, s.seminorm, s.constraint_residual);
        out << buffer;
    }
}

namespace {

std::filesystem::path level_file(const std::filesystem::path& dir, const char* stem, int level)
{
    return dir / (std::string(stem) + "_L" + std::to_string(level) + ".vtk");
}

void write_records(const std::filesystem::path& path, std::span<const ConvergenceRecord> records)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(out, records);
}

void write_state_vtk(const std::filesystem::path& path, const LevelData& data, const Target& target)
{
    const std::vector<double> uh = data.system.x_dofs.to_nodal(data.solution.u);
    std::vector<double> ubar(data.mesh.num_nodes());
    for (int i = 0; i < data.mesh.num_nodes(); ++i)
        ubar[i] = target(data.mesh.nodes()[i].x, data.mesh.nodes()[i].t);
    const std::vector<VtkField> points{{"state", uh}, {"target", ubar}};
    const std::vector<VtkField> cells{{"eta", data.errors.eta}};
    write_vtk_file(path.string(), data.mesh, points, cells);
}

/// Control on the level mesh; energy pairs it with a once-refined adjoint mesh.
ControlStats control_level(const LevelData& data, const std::filesystem::path* vtk_path)
{
    const Mesh& mesh = data.mesh;
    ControlStats stats{mesh.level(), mesh.num_elements(), 0, 0.0, 0.0, 0.0};
    if (data.system.regularization == Regularization::kEnergy) {
        const Mesh fine = refine_uniform(mesh);
        const DofMap fine_x(fine, SpaceKind::kTrialX);
        const std::vector<double> u_fine
            = fine_x.from_nodal(prolongate(mesh, fine, data.system.x_dofs.to_nodal(data.solution.u)));
        const ControlReconstruction control = reconstruct_energy_control(fine, mesh, u_fine);
        double sum = 0.0;
        for (int e = 0; e < mesh.num_elements(); ++e)
            sum += mesh.area(e) * control.z[e] * control.z[e];
        stats.control_dofs = static_cast<int>(control.z.size());
        stats.control_l2 = std::sqrt(sum);
        stats.seminorm = jump_seminorm(mesh, control.z);
        stats.constraint_residual = control.constraint_residual;
        if (vtk_path) {
            const std::vector<VtkField> cells{{"control", control.z}};
            write_vtk_file(vtk_path->string(), mesh, {}, cells);
        }
    } else {
        const std::vector<double> z = reconstruct_l2_control(data.system, data.solution);
        const std::vector<double> mz = data.system.regularization_matrix * z;
        const std::vector<double> nodal = data.system.y_dofs.to_nodal(z);
        stats.control_dofs = static_cast<int>(z.size());
        stats.control_l2 = std::sqrt(std::max(0.0, dot(z, mz)));
        stats.seminorm = p1_seminorm(mesh, nodal);
        if (vtk_path) {
            const std::vector<VtkField> points{{"control", nodal}};
            write_vtk_file(vtk_path->string(), mesh, points, {});
        }
    }
    return stats;
}

StudyResult run_refinement(const RunConfig& config, const Target& target, std::optional<int> rho_power,
                           const LevelObserver& observer)
{
    Mesh initial = make_initial_mesh(config.cells);
    if (config.effective_mode() == RefinementMode::kAdaptive) {
        AdaptiveConfig adaptive;
        adaptive.theta = config.theta;
        adaptive.max_level = config.levels;
        adaptive.max_dofs = config.max_dofs;
        adaptive.marking = config.marking;
        adaptive.variable_rho = config.variable_rho;
        adaptive.rho_power = rho_power;
        adaptive.rho = config.rho;
        adaptive.solver = config.solver;
        adaptive.threads = config.threads;
        return adaptive_loop(std::move(initial), target, config.regularization, adaptive, observer);
    }
    UniformConfig uniform;
    uniform.levels = config.levels;
    uniform.rho_power = rho_power;
    uniform.rho = config.rho;
    uniform.solver = config.solver;
    uniform.threads = config.threads;
    return uniform_loop(std::move(initial), target, config.regularization, uniform, observer);
}

} // namespace

RunOutcome run(const RunConfig& config)
{
    config.validate();
    const Target target{config.target, config.u1_support};

    RunOutcome outcome;
    outcome.directory = config.out / run_directory_name(config);
    std::filesystem::create_directories(outcome.directory);
    const auto& dir = outcome.directory;

    const LevelObserver observer = [&](const LevelData& data) {
        const int level = data.mesh.level();
        if (config.dump_meshes)
            write_vtk_file(level_file(dir, "mesh", level).string(), data.mesh);
        if (config.write_vtk)
            write_state_vtk(level_file(dir, "state", level), data, target);
        if (config.command == Command::kControl) {
            const auto path = level_file(dir, "control", level);
            outcome.controls.push_back(control_level(data, &path));
        }
    };

    StudyResult study = run_refinement(config, target, config.rho_power, observer);
    outcome.records = std::move(study.records);
    outcome.failure = std::move(study.failure);
    write_records(dir / "records.csv", outcome.records);

    if (config.command == Command::kControl) {
        std::ofstream out(dir / "control.csv");
        if (!out)
            throw IoError("cannot write control.csv");
        write_control_csv(out, outcome.controls);
    }

    if (config.command == Command::kU4Study && !outcome.failure) {
        RunConfig remedy = config;
        remedy.dump_meshes = false;
        remedy.write_vtk = false;
        StudyResult cubic = run_refinement(remedy, target, 3, {});
        outcome.remedy_records = std::move(cubic.records);
        outcome.failure = std::move(cubic.failure);
        write_records(dir / "records_rho_h3.csv", outcome.remedy_records);

        std::ofstream out(dir / "summary.csv");
        if (!out)
            throw IoError("cannot write summary.csv");
        out << "rho,fitted_eoc\n";
        char buffer[64];
        const auto line = [&](const char* label, const std::vector<ConvergenceRecord>& records) {
            out << label << ',';
            if (const auto eoc = fitted_eoc(records, 3)) {
                std::snprintf(buffer, sizeof(buffer), "%.17e", *eoc);
                out << buffer;
            }
            out << '\n';
        };
        line(config.rho_power ? ("h^" + std::to_string(*config.rho_power)).c_str() : "h^2", outcome.records);
        line("h^3", outcome.remedy_records);
    }
    return outcome;
}

} // namespace stwave
