#include "oracles.hpp"

#include "stwave/assembly.hpp"
#include "stwave/errors.hpp"
#include "stwave/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace stwave;
using oracle::cholesky_succeeds;
using oracle::symmetry_defect;

namespace {

const std::array<Point, 3> kReference{Point{0, 0}, Point{1, 0}, Point{0, 1}};

void expect_matrix(const Matrix3& actual, const Matrix3& expected, double tol = 1e-15)
{
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(actual[i][j], expected[i][j], tol) << "(" << i << "," << j << ")";
}

struct Linear
{
    double a, b, c;
    double operator()(Point p) const { return a * p.x + b * p.t + c; }
};

std::vector<double> nodal(const Mesh& mesh, const Linear& f)
{
    std::vector<double> v(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i)
        v[i] = f(mesh.nodes()[i]);
    return v;
}

Mesh irregular_mesh()
{
    MeshHierarchy hierarchy(make_initial_mesh(2));
    hierarchy.refine_marked(std::vector<int>{0, 5});
    hierarchy.refine_marked(std::vector<int>{2, 11, 20});
    return hierarchy.finest();
}

} // namespace

TEST(LocalMatrices, ReferenceStiffness)
{
    const ElementGeometry geom(kReference);
    EXPECT_DOUBLE_EQ(geom.area, 0.5);
    expect_matrix(local_stiffness(geom), {{{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}}});
}

TEST(LocalMatrices, ReferenceWaveForm)
{
    const ElementGeometry geom(kReference);
    expect_matrix(local_wave_form(geom), {{{0.0, -0.5, 0.5}, {-0.5, 0.5, 0.0}, {0.5, 0.0, -0.5}}});
}

TEST(LocalMatrices, ReferenceMass)
{
    const ElementGeometry geom(kReference);
    const double d = 2.0 / 24.0, o = 1.0 / 24.0;
    expect_matrix(local_mass(geom), {{{d, o, o}, {o, d, o}, {o, o, d}}});
}

TEST(LocalMatrices, RowSumsAndScaling)
{
    const std::array<Point, 3> v{Point{0.1, 0.2}, Point{0.7, 0.3}, Point{0.35, 0.9}};
    const std::array<Point, 3> v2{Point{0.2, 0.4}, Point{1.4, 0.6}, Point{0.7, 1.8}};
    const ElementGeometry g(v), g2(v2);
    const Matrix3 a = local_stiffness(g), b = local_wave_form(g);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(a[i][0] + a[i][1] + a[i][2], 0.0, 1e-15);
        EXPECT_NEAR(b[i][0] + b[i][1] + b[i][2], 0.0, 1e-15);
    }
    expect_matrix(local_stiffness(g2), a, 1e-14);
    expect_matrix(local_wave_form(g2), b, 1e-14);
    const Matrix3 m = local_mass(g), m2 = local_mass(g2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(m2[i][j], 4.0 * m[i][j], 1e-15);
}

TEST(LocalMatrices, DegenerateGeometryThrows)
{
    EXPECT_THROW(ElementGeometry({Point{0, 0}, Point{1, 1}, Point{2, 2}}), DegenerateElement);
    EXPECT_THROW(ElementGeometry({Point{0, 0}, Point{0, 1}, Point{1, 0}}), DegenerateElement);
}

TEST(Assembly, GlobalFormsOfLinearFunctionsAreExact)
{
    const Mesh mesh = irregular_mesh();
    const DofMap free(mesh, SpaceKind::kFree);
    const Linear f{0.3, -1.2, 0.5}, g{2.0, 0.7, -0.1};
    const auto u = free.from_nodal(nodal(mesh, f));
    const auto v = free.from_nodal(nodal(mesh, g));

    const CsrMatrix a = assemble(mesh, free, free, Kernel::kStiffness);
    EXPECT_NEAR(dot(v, a * u), f.a * g.a + f.b * g.b, 1e-13);

    // rows test, columns trial: v^T B u = int u_x v_x - u_t v_t
    const CsrMatrix b = assemble(mesh, free, free, Kernel::kWave);
    EXPECT_NEAR(dot(v, b * u), f.a * g.a - f.b * g.b, 1e-13);

    // int over Q of (a x + b t + c)(a' x + b' t + c')
    const double exact = f.a * g.a / 3 + f.b * g.b / 3 + (f.a * g.b + f.b * g.a) / 4
                         + (f.a * g.c + f.c * g.a) / 2 + (f.b * g.c + f.c * g.b) / 2 + f.c * g.c;
    const CsrMatrix m = assemble(mesh, free, free, Kernel::kMass);
    EXPECT_NEAR(dot(v, m * u), exact, 1e-13);
}

TEST(Assembly, SymmetricPositiveDefiniteUpToLevelThree)
{
    MeshHierarchy hierarchy(make_initial_mesh(1));
    for (int level = 0; level <= 3; ++level) {
        if (level > 0)
            hierarchy.refine_uniform();
        const Mesh& mesh = hierarchy.finest();
        const DofMap x(mesh, SpaceKind::kTrialX), y(mesh, SpaceKind::kTestY);
        const CsrMatrix a = assemble(mesh, y, y, Kernel::kStiffness);
        const CsrMatrix m = assemble(mesh, x, x, Kernel::kMass);
        const CsrMatrix mbar = assemble(mesh, y, y, Kernel::kMass);
        for (const CsrMatrix* mat : {&a, &m, &mbar}) {
            EXPECT_LE(symmetry_defect(*mat), 1e-13);
            EXPECT_TRUE(cholesky_succeeds(*mat)) << "level " << level;
        }
    }
}

TEST(Assembly, WaveMatrixHasYRowsAndXColumns)
{
    const Mesh mesh = make_initial_mesh(3);
    const DofMap x(mesh, SpaceKind::kTrialX), y(mesh, SpaceKind::kTestY);
    const CsrMatrix b = assemble(mesh, y, x, Kernel::kWave);
    EXPECT_EQ(b.rows(), y.size());
    EXPECT_EQ(b.cols(), x.size());
    const CsrMatrix bt = assemble(mesh, x, y, Kernel::kWave);
    const auto d = b.to_dense(), dt = bt.to_dense();
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            EXPECT_NEAR(d[i][j], dt[j][i], 1e-15);
}

TEST(Assembly, IndependentOfThreadCount)
{
    const Mesh mesh = refine_uniform(irregular_mesh());
    const DofMap x(mesh, SpaceKind::kTrialX), y(mesh, SpaceKind::kTestY);
    const CsrMatrix serial = assemble(mesh, y, x, Kernel::kWave, {}, {1});
    for (int threads : {2, 3, 8}) {
        const CsrMatrix parallel = assemble(mesh, y, x, Kernel::kWave, {}, {threads});
        EXPECT_EQ(parallel.row_ptr(), serial.row_ptr());
        EXPECT_EQ(parallel.col_idx(), serial.col_idx());
        EXPECT_EQ(parallel.values(), serial.values());
    }
}

TEST(Assembly, ElementWeights)
{
    const Mesh mesh = make_initial_mesh(2);
    const DofMap y(mesh, SpaceKind::kTestY);
    const std::vector<double> twos(mesh.num_elements(), 2.0);
    const CsrMatrix a = assemble(mesh, y, y, Kernel::kStiffness);
    const CsrMatrix a2 = assemble(mesh, y, y, Kernel::kStiffness, twos);
    for (std::size_t k = 0; k < a.values().size(); ++k)
        EXPECT_DOUBLE_EQ(a2.values()[k], 2.0 * a.values()[k]);
    EXPECT_THROW(assemble(mesh, y, y, Kernel::kStiffness, std::vector<double>(3, 1.0)), DimensionMismatch);
}

TEST(Assembly, ForeignDofMapIsRejected)
{
    const Mesh a = make_initial_mesh(2), b = make_initial_mesh(2);
    const DofMap y(b, SpaceKind::kTestY);
    EXPECT_THROW(assemble(a, y, y, Kernel::kMass), DimensionMismatch);
}

TEST(Load, ConstantsAndHats)
{
    const Mesh mesh = make_initial_mesh(1);
    const DofMap x(mesh, SpaceKind::kTrialX);
    const QuadratureRule rule = triangle_rule(4);

    const auto zero = assemble_load(mesh, x, [](double, double) { return 0.0; }, rule);
    EXPECT_EQ(zero, std::vector<double>{0.0});

    const auto one = assemble_load(mesh, x, [](double, double) { return 1.0; }, rule);
    EXPECT_NEAR(one[0], 1.0 / 3.0, 1e-15);

    // hat function of the center node
    const auto hat = [](double xx, double t) { return 2.0 * std::min(std::min(xx, 1.0 - xx), std::min(t, 1.0 - t)); };
    const auto f = assemble_load(mesh, x, hat, rule);
    const CsrMatrix m = assemble(mesh, x, x, Kernel::kMass);
    EXPECT_NEAR(f[0], m.at(0, 0), 1e-15);
    EXPECT_NEAR(m.at(0, 0), 1.0 / 6.0, 1e-15);
}

TEST(Load, ExactForCubicTargets)
{
    const Mesh mesh = irregular_mesh();
    const DofMap x(mesh, SpaceKind::kTrialX);
    const auto cubic = [](double xx, double t) { return xx * xx * t - 2.0 * t * t * t + xx; };
    const auto f4 = assemble_load(mesh, x, cubic, triangle_rule(4));
    const auto oracle = assemble_load(mesh, x, cubic, conical_gauss_rule(10));
    for (std::size_t i = 0; i < f4.size(); ++i)
        EXPECT_NEAR(f4[i], oracle[i], 1e-15);
}

TEST(Load, HigherOrderOracle)
{
    // oracle: degree-14 rule on 256 pieces of every element
    const QuadratureRule oracle = subdivided(conical_gauss_rule(8), 4);
    const auto max_difference = [&](const Mesh& mesh, const Target& target) {
        const DofMap x(mesh, SpaceKind::kTrialX);
        const auto f = assemble_load(mesh, x, target, target.quadrature());
        const auto g = assemble_load(mesh, x, target, oracle);
        double d = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            d = std::max(d, std::abs(f[i] - g[i]));
        return d;
    };
    const Mesh level0 = make_initial_mesh(4);
    EXPECT_LE(max_difference(level0, Target{TargetKind::kU4Sine}), 1e-6);
    EXPECT_LE(max_difference(level0, Target{TargetKind::kU3BilinearHat}), 1e-14);
    // the band target is only C^2 across its zero lines, which cut through elements
    const Mesh level2 = refine_uniform(refine_uniform(level0));
    EXPECT_LE(max_difference(level2, Target{TargetKind::kU1Smooth, U1Support::kBand}), 1e-6);
}

TEST(Coupling, RowSumsAreElementMeasures)
{
    MeshHierarchy hierarchy(make_initial_mesh(2));
    hierarchy.refine_marked(std::vector<int>{1, 6});
    const Mesh& coarse = hierarchy.level(0);
    const Mesh fine = refine_uniform(hierarchy.finest());
    const Mesh& mid = hierarchy.finest();
    const DofMap free(fine, SpaceKind::kFree), y(fine, SpaceKind::kTestY);
    const ControlSpace control = build_control_space(mid);

    const CsrMatrix p_free = assemble_coupling(fine, free, mid, control);
    const CsrMatrix p_y = assemble_coupling(fine, y, mid, control);
    ASSERT_EQ(p_free.rows(), mid.num_elements());
    for (int r = 0; r < mid.num_elements(); ++r) {
        double sum_free = 0.0, sum_y = 0.0;
        for (int k = p_free.row_ptr()[r]; k < p_free.row_ptr()[r + 1]; ++k)
            sum_free += p_free.values()[k];
        for (int k = p_y.row_ptr()[r]; k < p_y.row_ptr()[r + 1]; ++k)
            sum_y += p_y.values()[k];
        EXPECT_NEAR(sum_free, mid.area(r), 1e-15);
        EXPECT_LE(sum_y, mid.area(r) + 1e-15);
    }
    // the control space must come from the parent of the fine mesh
    EXPECT_THROW(assemble_coupling(fine, y, coarse, build_control_space(coarse)), DimensionMismatch);
}

TEST(Coupling, SparsityIsElementNodeIncidence)
{
    const Mesh coarse = make_initial_mesh(2);
    const Mesh fine = refine_uniform(coarse);
    const DofMap free(fine, SpaceKind::kFree);
    const CsrMatrix p = assemble_coupling(fine, free, coarse, build_control_space(coarse));
    for (int r = 0; r < coarse.num_elements(); ++r) {
        std::set<int> nodes;
        for (int e = 0; e < fine.num_elements(); ++e)
            if (fine.parent()[e] == r)
                nodes.insert(fine.elements()[e].begin(), fine.elements()[e].end());
        EXPECT_EQ(p.row_ptr()[r + 1] - p.row_ptr()[r], static_cast<int>(nodes.size()));
        for (int k = p.row_ptr()[r]; k < p.row_ptr()[r + 1]; ++k)
            EXPECT_TRUE(nodes.count(free.node(p.col_idx()[k])));
    }
}

TEST(Prolongation, ReproducesCoarseFunction)
{
    const Mesh coarse = irregular_mesh();
    const Mesh fine = refine_marked(coarse, std::vector<int>{0, 3, 9});
    std::vector<double> coarse_values(coarse.num_nodes());
    for (int i = 0; i < coarse.num_nodes(); ++i)
        coarse_values[i] = std::sin(3.0 * i);
    const auto fine_values = prolongate(coarse, fine, coarse_values);
    for (int e = 0; e < fine.num_elements(); ++e) {
        const Point c = fine.centroid(e);
        const auto& tri = fine.elements()[e];
        const double fine_at = (fine_values[tri[0]] + fine_values[tri[1]] + fine_values[tri[2]]) / 3.0;
        EXPECT_NEAR(fine_at, evaluate_p1(coarse, fine.parent()[e], coarse_values, c), 1e-14);
    }
}
