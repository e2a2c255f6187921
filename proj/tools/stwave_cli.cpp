#include "stwave/errors.hpp"
#include "stwave/study.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using namespace stwave;

const std::map<std::string, TargetKind> kTargets{{"u1", TargetKind::kU1Smooth},
                                                 {"u2", TargetKind::kU2PiecewiseConstant},
                                                 {"u3", TargetKind::kU3BilinearHat},
                                                 {"u4", TargetKind::kU4Sine},
                                                 {"zero", TargetKind::kZero}};
const std::map<std::string, Regularization> kRegs{{"energy", Regularization::kEnergy}, {"l2", Regularization::kL2}};
const std::map<std::string, SolverKind> kSolvers{{"lu", SolverKind::kLu}, {"schur-cg", SolverKind::kSchurCg}};
const std::map<std::string, MarkingStrategy> kMarkings{{"max", MarkingStrategy::kMaximum},
                                                       {"bulk", MarkingStrategy::kBulk}};
const std::map<std::string, U1Support> kSupports{{"verbatim", U1Support::kVerbatim}, {"band", U1Support::kBand}};
const std::map<std::string, RefinementMode> kModes{{"uniform", RefinementMode::kUniform},
                                                   {"adaptive", RefinementMode::kAdaptive}};

void print_summary(const RunConfig& config, const RunOutcome& outcome)
{
    std::cout << "wrote " << (outcome.directory / "records.csv").string() << " (" << outcome.records.size()
              << " levels)\n";
    for (const auto& r : outcome.records) {
        std::cout << "  level " << r.level << "  dofs " << r.dofs << "  error " << r.error;
        if (r.eoc)
            std::cout << "  eoc " << *r.eoc;
        std::cout << '\n';
    }
    if (const auto eoc = fitted_eoc(outcome.records, 3))
        std::cout << "fitted eoc (last 3 levels): " << *eoc << '\n';
    if (config.command == Command::kU4Study)
        if (const auto eoc = fitted_eoc(outcome.remedy_records, 3))
            std::cout << "fitted eoc with rho = h^3: " << *eoc << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Space-time finite element optimal control of the wave equation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");

    RunConfig config;
    std::string target = "u1", reg = "energy", solver = "lu", marking = "max", support = "verbatim",
                mode = "uniform";
    std::optional<int> levels;
    std::string out = "results";

    app.add_option("--target", target, "Target function")->check(CLI::IsMember(kTargets));
    app.add_option("--reg", reg, "Regularization")->check(CLI::IsMember(kRegs));
    app.add_option("--levels", levels, "Refinement levels after the initial mesh (default 5, adaptive 10)");
    app.add_option("--theta", config.theta, "Marking parameter in (0, 1)");
    app.add_option("--marking", marking, "Marking rule")->check(CLI::IsMember(kMarkings));
    app.add_option("--max-dofs", config.max_dofs, "Stop adaptive refinement beyond this many state dofs");
    app.add_option("--rho", config.rho, "Fixed regularization parameter");
    app.add_option("--rho-power", config.rho_power, "rho = h^power")->check(CLI::Range(2, 4));
    app.add_flag("--variable-rho", config.variable_rho, "Element-wise rho = h_tau^2 (adaptive, energy)");
    app.add_option("--cells", config.cells, "Initial mesh has cells x cells squares");
    app.add_option("--out", out, "Output directory");
    app.add_flag("--dump-meshes", config.dump_meshes, "Write mesh_L<k>.vtk per level");
    app.add_flag("--vtk", config.write_vtk, "Write state_L<k>.vtk per level");
    app.add_option("--solver", solver, "Linear solver")->check(CLI::IsMember(kSolvers));
    app.add_option("--u1-support", support, "Support condition of u1")->check(CLI::IsMember(kSupports));
    app.add_option("--threads", config.threads, "Assembly threads");

    auto* uniform = app.add_subcommand("uniform", "Uniform refinement study");
    auto* adaptive = app.add_subcommand("adaptive", "Adaptive refinement study");
    auto* control = app.add_subcommand("control", "Control reconstruction per level");
    control->add_option("--mode", mode, "Refinement mode")->check(CLI::IsMember(kModes));
    auto* u4 = app.add_subcommand("u4-study", "u4 with rho = h^2 and rho = h^3");
    for (auto* sub : {uniform, adaptive, control, u4})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (uniform->parsed())
        config.command = Command::kUniform;
    else if (adaptive->parsed())
        config.command = Command::kAdaptive;
    else if (control->parsed())
        config.command = Command::kControl;
    else {
        config.command = Command::kU4Study;
        if (app.count("--target") == 0)
            target = "u4";
    }
    config.target = kTargets.at(target);
    config.regularization = kRegs.at(reg);
    config.solver = kSolvers.at(solver);
    config.marking = kMarkings.at(marking);
    config.u1_support = kSupports.at(support);
    config.mode = kModes.at(mode);
    config.levels = levels.value_or(config.effective_mode() == RefinementMode::kAdaptive ? 10 : 5);
    config.out = out;

    try {
        config.validate();
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        const RunOutcome outcome = run(config);
        print_summary(config, outcome);
        if (outcome.failure) {
            std::cerr << "numerical failure: " << *outcome.failure << '\n';
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
