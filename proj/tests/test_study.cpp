#include "stwave/errors.hpp"
#include "stwave/study.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace stwave;
namespace fs = std::filesystem;

namespace {

class StudyTest : public ::testing::Test
{
protected:
    fs::path root;

    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        root = fs::temp_directory_path()
               / ("stwave_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(root);
    }
    void TearDown() override { fs::remove_all(root); }

    RunConfig config(Command command, TargetKind target, int levels, const std::string& sub = "a") const
    {
        RunConfig c;
        c.command = command;
        c.target = target;
        c.levels = levels;
        c.out = root / sub;
        return c;
    }
};

std::string slurp(const fs::path& path)
{
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const fs::path& path)
{
    std::istringstream in(slurp(path));
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

int cli(const std::string& args)
{
    const int status = std::system((std::string(STWAVE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(RunConfigTest, DirectoryNames)
{
    RunConfig c;
    EXPECT_EQ(run_directory_name(c), "u1_energy_uniform");
    c.command = Command::kAdaptive;
    c.target = TargetKind::kU2PiecewiseConstant;
    EXPECT_EQ(run_directory_name(c), "u2_energy_adaptive");
    c.command = Command::kControl;
    c.regularization = Regularization::kL2;
    EXPECT_EQ(run_directory_name(c), "u2_l2_uniform");
    c.command = Command::kU4Study;
    c.target = TargetKind::kU4Sine;
    c.regularization = Regularization::kEnergy;
    EXPECT_EQ(run_directory_name(c), "u4_energy_u4-study");
}

TEST(RunConfigTest, Validation)
{
    const auto rejects = [](auto change) {
        RunConfig c;
        change(c);
        EXPECT_THROW(c.validate(), PreconditionError);
    };
    rejects([](RunConfig& c) { c.theta = 1.5; });
    rejects([](RunConfig& c) { c.theta = 0.0; });
    rejects([](RunConfig& c) { c.levels = -1; });
    rejects([](RunConfig& c) { c.cells = 0; });
    rejects([](RunConfig& c) { c.threads = 0; });
    rejects([](RunConfig& c) { c.rho = -1.0; });
    rejects([](RunConfig& c) { c.rho_power = 5; });
    rejects([](RunConfig& c) { c.rho = 0.1, c.rho_power = 3; });
    rejects([](RunConfig& c) { c.variable_rho = true; });
    rejects([](RunConfig& c) { c.command = Command::kU4Study; });
    rejects([](RunConfig& c) {
        c.command = Command::kAdaptive;
        c.variable_rho = true;
        c.regularization = Regularization::kL2;
    });
    RunConfig ok;
    ok.command = Command::kAdaptive;
    ok.variable_rho = true;
    EXPECT_NO_THROW(ok.validate());
}

TEST_F(StudyTest, UniformLayoutAndRowCount)
{
    RunConfig c = config(Command::kUniform, TargetKind::kU3BilinearHat, 2);
    c.dump_meshes = true;
    c.write_vtk = true;
    const RunOutcome o = run(c);
    EXPECT_EQ(o.exit_code(), 0);
    EXPECT_EQ(o.directory, root / "a" / "u3_energy_uniform");
    const auto rows = lines(o.directory / "records.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "level,dofs,elements,h,rho,error,eoc");
    EXPECT_EQ(rows[1].substr(0, 8), "0,28,64,");
    for (int level = 0; level <= 2; ++level) {
        EXPECT_TRUE(fs::exists(o.directory / ("mesh_L" + std::to_string(level) + ".vtk")));
        EXPECT_TRUE(fs::exists(o.directory / ("state_L" + std::to_string(level) + ".vtk")));
    }
    const std::string vtk = slurp(o.directory / "state_L0.vtk");
    EXPECT_NE(vtk.find("POINTS 41 double"), std::string::npos);
    EXPECT_NE(vtk.find("CELLS 64 256"), std::string::npos);
    EXPECT_NE(vtk.find("POINT_DATA 41"), std::string::npos);
    EXPECT_NE(vtk.find("SCALARS state double 1"), std::string::npos);
    EXPECT_NE(vtk.find("CELL_DATA 64"), std::string::npos);
}

TEST_F(StudyTest, DeterministicAcrossRepeatsAndThreads)
{
    for (Command command : {Command::kUniform, Command::kAdaptive}) {
        std::vector<std::string> outputs;
        for (int threads : {1, 1, 4}) {
            RunConfig c = config(command, TargetKind::kU2PiecewiseConstant, 3, "t" + std::to_string(outputs.size()));
            c.threads = threads;
            const RunOutcome o = run(c);
            outputs.push_back(slurp(o.directory / "records.csv"));
        }
        EXPECT_EQ(outputs[0], outputs[1]);
        EXPECT_EQ(outputs[0], outputs[2]);
    }
}

TEST_F(StudyTest, ZeroTargetControlVanishes)
{
    for (auto reg : {Regularization::kEnergy, Regularization::kL2}) {
        RunConfig c = config(Command::kControl, TargetKind::kZero, 1);
        c.regularization = reg;
        const RunOutcome o = run(c);
        ASSERT_EQ(o.controls.size(), 2u);
        for (const auto& s : o.controls) {
            EXPECT_EQ(s.control_l2, 0.0);
            EXPECT_EQ(s.seminorm, 0.0);
        }
        EXPECT_EQ(lines(o.directory / "control.csv").size(), 3u);
        EXPECT_TRUE(fs::exists(o.directory / "control_L1.vtk"));
    }
}

TEST_F(StudyTest, ControlOnLevelThreeMesh)
{
    RunConfig c = config(Command::kControl, TargetKind::kU3BilinearHat, 3);
    const RunOutcome o = run(c);
    ASSERT_EQ(o.controls.size(), 4u);
    EXPECT_EQ(o.controls[3].elements, 4096);
    EXPECT_EQ(o.controls[3].control_dofs, 4096);
    EXPECT_LE(o.controls[3].constraint_residual, 1e-9);
    const std::string vtk = slurp(o.directory / "control_L3.vtk");
    EXPECT_NE(vtk.find("CELL_DATA 4096"), std::string::npos);
}

TEST_F(StudyTest, L2ControlIsSmootherThanEnergyControl)
{
    double growth[2];
    for (auto reg : {Regularization::kEnergy, Regularization::kL2}) {
        RunConfig c = config(Command::kControl, TargetKind::kU3BilinearHat, 3);
        c.regularization = reg;
        const RunOutcome o = run(c);
        growth[reg == Regularization::kL2] = o.controls[3].seminorm / o.controls[2].seminorm;
    }
    EXPECT_LT(growth[1], growth[0]);
}

TEST_F(StudyTest, U4StudyWithOneLevelHasNoFittedRate)
{
    RunConfig c = config(Command::kU4Study, TargetKind::kU4Sine, 1);
    const RunOutcome o = run(c);
    EXPECT_EQ(o.remedy_records.size(), 2u);
    const auto rows = lines(o.directory / "summary.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], "rho,fitted_eoc");
    EXPECT_EQ(rows[1], "h^2,");
    EXPECT_EQ(rows[2], "h^3,");
    EXPECT_EQ(lines(o.directory / "records_rho_h3.csv").size(), 3u);
}

TEST_F(StudyTest, NumericalFailureKeepsPartialCsv)
{
    RunConfig c = config(Command::kUniform, TargetKind::kU3BilinearHat, 1);
    c.rho = 1e-320;
    const RunOutcome o = run(c);
    EXPECT_EQ(o.exit_code(), 2);
    EXPECT_TRUE(o.failure);
    EXPECT_EQ(lines(o.directory / "records.csv").size(), 1u);
}

TEST_F(StudyTest, CommandLineExitCodes)
{
    const std::string out = " --out " + (root / "cli").string();
    EXPECT_EQ(cli("--help"), 0);
    EXPECT_EQ(cli("uniform --target u3 --levels 1" + out), 0);
    EXPECT_EQ(lines(root / "cli" / "u3_energy_uniform" / "records.csv").size(), 3u);
    EXPECT_EQ(cli("adaptive --theta 1.5" + out), 1);
    EXPECT_EQ(cli("uniform --target u9" + out), 1);
    EXPECT_EQ(cli("uniform --rho-power 7" + out), 1);
    EXPECT_EQ(cli(out), 1);
    EXPECT_EQ(cli("uniform --target u3 --rho 1e-320 --levels 1" + out), 2);
}

TEST_F(StudyTest, CommandLineConfigFile)
{
    fs::create_directories(root);
    std::ofstream(root / "run.toml") << "target = \"u3\"\nlevels = 1\nreg = \"l2\"\nout = \""
                                     << (root / "cfg").string() << "\"\n";
    EXPECT_EQ(cli("uniform --config " + (root / "run.toml").string() + " --levels 2"), 0);
    EXPECT_EQ(lines(root / "cfg" / "u3_l2_uniform" / "records.csv").size(), 4u);
}
