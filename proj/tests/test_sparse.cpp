#include "oracles.hpp"

#include "stwave/assembly.hpp"
#include "stwave/errors.hpp"
#include "stwave/solvers.hpp"
#include "stwave/sparse.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace stwave;

TEST(Csr, FromTripletsSortsAndSumsDuplicates)
{
    const CsrMatrix a = CsrMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {0, 1, 0.5}});
    EXPECT_EQ(a.row_ptr(), (std::vector<int>{0, 1, 3}));
    EXPECT_EQ(a.col_idx(), (std::vector<int>{1, 0, 2}));
    EXPECT_EQ(a.values(), (std::vector<double>{2.5, 3.0, 1.0}));
    EXPECT_EQ(a.at(0, 1), 2.5);
    EXPECT_EQ(a.at(0, 0), 0.0);
    EXPECT_THROW(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionMismatch);
}

TEST(Csr, ConstructorValidates)
{
    EXPECT_THROW(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), DimensionMismatch);
    EXPECT_THROW(CsrMatrix(1, 2, {0, 2}, {0, 0}, {1.0, 1.0}), DimensionMismatch);
    EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), DimensionMismatch);
    EXPECT_THROW(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), DimensionMismatch);
    EXPECT_NO_THROW(CsrMatrix(1, 2, {0, 2}, {0, 1}, {1.0, 1.0}));
}

TEST(Csr, ProductsAgreeWithDense)
{
    std::mt19937 rng(7);
    const CsrMatrix a = CsrMatrix::from_triplets(4, 3, {{0, 0, 1}, {0, 2, -2}, {1, 1, 3}, {3, 0, 4}, {3, 2, 5}});
    const auto d = a.to_dense();
    const std::vector<double> x{1.0, -1.0, 2.0}, y{0.5, 1.0, -1.0, 2.0};
    const auto ax = a * x;
    std::vector<double> aty(3);
    a.multiply_transpose(y, aty);
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j)
            s += d[i][j] * x[j];
        EXPECT_DOUBLE_EQ(ax[i], s);
    }
    for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
            s += d[i][j] * y[i];
        EXPECT_DOUBLE_EQ(aty[j], s);
    }
    const CsrMatrix at = a.transpose();
    EXPECT_EQ(at.rows(), 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_EQ(at.at(j, i), a.at(i, j));
    EXPECT_EQ(a.max_abs(), 5.0);
    EXPECT_EQ(a.norm_inf(), 9.0);
    EXPECT_THROW(a * y, DimensionMismatch);
}

TEST(Csr, BlockMatrix)
{
    const CsrMatrix a = CsrMatrix::identity(2);
    const CsrMatrix b = CsrMatrix::from_triplets(2, 1, {{1, 0, 7.0}});
    const CsrMatrix d = CsrMatrix::from_triplets(1, 1, {{0, 0, -1.0}});
    const CsrMatrix k = block_matrix(&a, &b, nullptr, &d, 2, 2, 1, 1);
    const oracle::Dense expected{{1, 0, 0}, {0, 1, 7}, {0, 0, -1}};
    EXPECT_EQ(k.to_dense(), expected);
    EXPECT_THROW(block_matrix(&a, &d, nullptr, nullptr, 2, 2, 1, 1), DimensionMismatch);
}

TEST(Lu, IdentityAndPermutation)
{
    const std::vector<double> b{3.0, -4.0};
    EXPECT_EQ(lu_factor(CsrMatrix::identity(2)).solve(b), b);
    const CsrMatrix swap = CsrMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const auto x = lu_factor(swap).solve(b);
    EXPECT_DOUBLE_EQ(x[0], -4.0);
    EXPECT_DOUBLE_EQ(x[1], 3.0);
}

TEST(Lu, RandomSpdResidual)
{
    std::mt19937 rng(11);
    const CsrMatrix a = oracle::random_spd(50, 2, rng);
    const auto b = oracle::random_vector(50, rng);
    const auto x = lu_factor(a).solve(b);
    std::vector<double> r = a * x;
    for (int i = 0; i < 50; ++i)
        r[i] -= b[i];
    EXPECT_LE(norm2(r) / norm2(b), 1e-10);
}

TEST(Lu, ZeroRightHandSideAndUnitVectors)
{
    std::mt19937 rng(5);
    const CsrMatrix a = oracle::random_sparse(30, 3, rng, 4.0);
    const LuFactorization f = lu_factor(a);
    const auto zero = f.solve(std::vector<double>(30, 0.0));
    for (double v : zero)
        EXPECT_EQ(v, 0.0);
    for (int k = 0; k < 30; k += 7) {
        std::vector<double> e(30, 0.0);
        e[k] = 1.0;
        const auto x = f.solve(a * e);
        EXPECT_LE(oracle::max_abs_difference(x, e), 1e-10);
    }
}

TEST(Lu, MatchesDenseEliminationOnNonsymmetricMatrices)
{
    std::mt19937 rng(2024);
    for (int n : {5, 40, 120, 200}) {
        const CsrMatrix a = oracle::random_sparse(n, 4, rng);
        const auto b = oracle::random_vector(n, rng);
        const auto x = lu_factor(a).solve(b);
        const auto ref = oracle::dense_solve(a.to_dense(), b);
        EXPECT_LE(oracle::relative_difference(x, ref), 1e-10) << "n = " << n;
        // backward error bound
        std::vector<double> r = a * x;
        for (int i = 0; i < n; ++i)
            r[i] -= b[i];
        EXPECT_LE(norm_inf(r), 1e-9 * (a.norm_inf() * norm_inf(x) + norm_inf(b)));
    }
}

TEST(Lu, StatsAndRefinement)
{
    std::mt19937 rng(3);
    const CsrMatrix a = oracle::random_sparse(60, 3, rng, 3.0);
    const auto b = oracle::random_vector(60, rng);
    LuOptions options;
    options.iterative_refinement = true;
    const LuFactorization refined(a, options);
    const LuFactorization plain(a);
    EXPECT_LE(oracle::relative_difference(refined.solve(b), plain.solve(b)), 1e-12);
    EXPECT_GT(plain.stats().nnz_l, 0);
    EXPECT_GT(plain.stats().min_pivot, 0.0);
    EXPECT_GE(plain.stats().max_pivot, plain.stats().min_pivot);
}

TEST(Lu, SingularMatrices)
{
    const CsrMatrix rank_one = CsrMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
    EXPECT_THROW(lu_factor(rank_one), SingularMatrix);
    const CsrMatrix empty_row = CsrMatrix::from_triplets(3, 3, {{0, 0, 1}, {2, 2, 1}});
    EXPECT_THROW(lu_factor(empty_row), SingularMatrix);
    const CsrMatrix tiny = CsrMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1 + 1e-17}});
    EXPECT_THROW(lu_factor(tiny), SingularMatrix);
    EXPECT_THROW(lu_factor(CsrMatrix::from_triplets(2, 3, {})), DimensionMismatch);
}

TEST(Lu, WrongRightHandSideLength)
{
    const LuFactorization f = lu_factor(CsrMatrix::identity(3));
    EXPECT_THROW(f.solve(std::vector<double>(2)), DimensionMismatch);
}

TEST(Cg, IdentityConvergesInOneStep)
{
    const std::vector<double> b{1.0, 2.0, 3.0};
    const CgResult r = cg_solve(CsrMatrix::identity(3), b, 1e-14, 10);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_LE(oracle::max_abs_difference(r.x, b), 1e-15);
}

TEST(Cg, DiagonalNeedsAtMostDistinctEigenvalueCount)
{
    std::vector<Triplet> t;
    for (int i = 0; i < 40; ++i)
        t.push_back({i, i, 1.0 + (i % 4)});
    const CsrMatrix d = CsrMatrix::from_triplets(40, 40, t);
    std::mt19937 rng(1);
    const CgResult r = cg_solve(d, oracle::random_vector(40, rng), 1e-12, 100);
    EXPECT_LE(r.iterations, 4);
}

TEST(Cg, MatchesLuOnStiffnessMatrix)
{
    const Mesh mesh = refine_uniform(refine_uniform(make_initial_mesh(4)));
    const DofMap y(mesh, SpaceKind::kTestY);
    const CsrMatrix a = assemble(mesh, y, y, Kernel::kStiffness);
    std::mt19937 rng(99);
    const auto b = oracle::random_vector(a.rows(), rng);
    const CgResult r = cg_solve(a, b, 1e-13, 10000);
    EXPECT_LE(oracle::relative_difference(r.x, lu_factor(a).solve(b)), 1e-8);
}

TEST(Cg, ZeroRightHandSide)
{
    const CgResult r = cg_solve(CsrMatrix::identity(4), std::vector<double>(4, 0.0), 1e-12, 10);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.x, std::vector<double>(4, 0.0));
}

TEST(Cg, Failures)
{
    const CsrMatrix indefinite = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
    EXPECT_THROW(cg_solve(indefinite, std::vector<double>{0.0, 1.0}, 1e-12, 10), NotSPD);

    std::mt19937 rng(4);
    const CsrMatrix a = oracle::random_spd(30, 3, rng);
    const auto b = oracle::random_vector(30, rng);
    try {
        cg_solve(a, b, 1e-15, 2);
        FAIL() << "expected MaxIterations";
    } catch (const MaxIterations& e) {
        EXPECT_EQ(e.iterations(), 2);
        EXPECT_EQ(e.iterate().size(), 30u);
        EXPECT_GT(e.relative_residual(), 1e-15);
    }
}

TEST(SparseIo, MatrixMarketRoundTrip)
{
    std::mt19937 rng(8);
    const CsrMatrix a = oracle::random_sparse(12, 3, rng);
    std::stringstream buffer;
    write_matrix_market(buffer, a);
    const CsrMatrix b = read_matrix_market(buffer);
    EXPECT_EQ(b.row_ptr(), a.row_ptr());
    EXPECT_EQ(b.col_idx(), a.col_idx());
    EXPECT_EQ(b.values(), a.values());
}

TEST(SparseIo, MatrixMarketSymmetricInput)
{
    std::stringstream in("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4.0\n2 1 -1.5\n");
    const CsrMatrix a = read_matrix_market(in);
    EXPECT_EQ(a.at(0, 1), -1.5);
    EXPECT_EQ(a.at(1, 0), -1.5);
    EXPECT_EQ(a.at(0, 0), 4.0);
    std::stringstream bad("not a matrix\n");
    EXPECT_THROW(read_matrix_market(bad), IoError);
}

TEST(SparseIo, BinaryVectorRoundTrip)
{
    const std::vector<double> v{1.0, -0.0, 3.141592653589793, 1e-300, -2.5e300};
    std::stringstream buffer;
    write_vector_binary(buffer, v);
    EXPECT_EQ(buffer.str().size(), 8u + 8u * v.size());
    const auto w = read_vector_binary(buffer);
    EXPECT_EQ(w, v);
    std::stringstream truncated(buffer.str().substr(0, 12));
    EXPECT_THROW(read_vector_binary(truncated), IoError);
}
