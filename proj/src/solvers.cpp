#include "stwave/solvers.hpp"

#include "stwave/errors.hpp"

#include <umfpack.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace stwave {

struct LuFactorization::Impl
{
    int n = 0;
    // column-compressed copy of A, needed by UMFPACK for the solves
    std::vector<int> col_ptr;
    std::vector<int> row_idx;
    std::vector<double> values;
    std::array<double, UMFPACK_CONTROL> control{};
    void* numeric = nullptr;
    LuStats stats;

    ~Impl()
    {
        if (numeric)
            umfpack_di_free_numeric(&numeric);
    }
};

LuFactorization::LuFactorization(const CsrMatrix& a, LuOptions options)
    : impl_(std::make_unique<Impl>())
{
    if (a.rows() != a.cols())
        throw DimensionMismatch("lu_factor: matrix is not square");
    auto& impl = *impl_;
    impl.n = a.rows();
    if (impl.n == 0)
        return;

    // the CSR arrays of A^T are the CSC arrays of A
    const CsrMatrix at = a.transpose();
    impl.col_ptr = at.row_ptr();
    impl.row_idx = at.col_idx();
    impl.values = at.values();

    umfpack_di_defaults(impl.control.data());
    impl.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    impl.control[UMFPACK_ORDERING] = UMFPACK_ORDERING_AMD;
    impl.control[UMFPACK_PIVOT_TOLERANCE] = options.pivot_tolerance;
    impl.control[UMFPACK_SYM_PIVOT_TOLERANCE] = options.pivot_tolerance;
    impl.control[UMFPACK_IRSTEP] = options.iterative_refinement ? 1 : 0;

    std::array<double, UMFPACK_INFO> info{};
    void* symbolic = nullptr;
    int status = umfpack_di_symbolic(impl.n, impl.n, impl.col_ptr.data(), impl.row_idx.data(),
                                     impl.values.data(), &symbolic, impl.control.data(), info.data());
    if (status != UMFPACK_OK)
        throw Error("lu_factor: symbolic analysis failed (UMFPACK status " + std::to_string(status) + ")");
    status = umfpack_di_numeric(impl.col_ptr.data(), impl.row_idx.data(), impl.values.data(), symbolic,
                                &impl.numeric, impl.control.data(), info.data());
    umfpack_di_free_symbolic(&symbolic);
    if (status == UMFPACK_WARNING_singular_matrix)
        throw SingularMatrix("lu_factor: matrix is singular (zero pivot)");
    if (status != UMFPACK_OK)
        throw Error("lu_factor: numeric factorization failed (UMFPACK status " + std::to_string(status) + ")");

    int lnz = 0, unz = 0, n_row = 0, n_col = 0, nz_udiag = 0;
    umfpack_di_get_lunz(&lnz, &unz, &n_row, &n_col, &nz_udiag, impl.numeric);
    impl.stats.nnz_l = lnz;
    impl.stats.nnz_u = unz;

    std::vector<double> udiag(impl.n), row_scale(impl.n);
    int do_recip = 0;
    status = umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                                    udiag.data(), &do_recip, row_scale.data(), impl.numeric);
    if (status != UMFPACK_OK)
        throw Error("lu_factor: cannot read pivots (UMFPACK status " + std::to_string(status) + ")");

    // pivots belong to the row-scaled matrix, so compare against its largest entry
    double scaled_max = 0.0;
    for (int c = 0; c < impl.n; ++c) {
        for (int k = impl.col_ptr[c]; k < impl.col_ptr[c + 1]; ++k) {
            const int r = impl.row_idx[k];
            const double v = do_recip ? impl.values[k] * row_scale[r] : impl.values[k] / row_scale[r];
            scaled_max = std::max(scaled_max, std::abs(v));
        }
    }
    impl.stats.min_pivot = std::abs(udiag[0]);
    impl.stats.max_pivot = 0.0;
    for (double d : udiag) {
        impl.stats.min_pivot = std::min(impl.stats.min_pivot, std::abs(d));
        impl.stats.max_pivot = std::max(impl.stats.max_pivot, std::abs(d));
    }
    if (!(impl.stats.min_pivot >= options.singular_threshold * scaled_max))
        throw SingularMatrix("lu_factor: matrix is numerically singular (pivot "
                             + std::to_string(impl.stats.min_pivot) + ")");
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

int LuFactorization::size() const
{
    return impl_->n;
}

const LuStats& LuFactorization::stats() const
{
    return impl_->stats;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const
{
    std::vector<double> x(b.size());
    solve(b, x);
    return x;
}

void LuFactorization::solve(std::span<const double> b, std::span<double> x) const
{
    const auto& impl = *impl_;
    if (static_cast<int>(b.size()) != impl.n || static_cast<int>(x.size()) != impl.n)
        throw DimensionMismatch("solve: right-hand side length does not match the factorization");
    if (impl.n == 0)
        return;
    std::array<double, UMFPACK_INFO> info{};
    const int status = umfpack_di_solve(UMFPACK_A, impl.col_ptr.data(), impl.row_idx.data(), impl.values.data(),
                                        x.data(), b.data(), impl.numeric, impl.control.data(), info.data());
    if (status != UMFPACK_OK)
        throw Error("solve: UMFPACK status " + std::to_string(status));
}

CgResult cg_solve(const LinearOperator& apply, std::span<const double> b, double tol, int max_iterations)
{
    const std::size_t n = b.size();
    CgResult result;
    result.x.assign(n, 0.0);
    const double b_norm = norm2(b);
    if (b_norm == 0.0)
        return result;

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> p = r;
    std::vector<double> ap(n);
    double rr = dot(r, r);
    for (int it = 1; it <= max_iterations; ++it) {
        apply(p, ap);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0))
            throw NotSPD("cg_solve: operator is not positive definite (p^T A p = " + std::to_string(curvature)
                         + ")");
        const double alpha = rr / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            result.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        result.iterations = it;
        result.relative_residual = std::sqrt(rr_new) / b_norm;
        if (result.relative_residual <= tol)
            return result;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = r[i] + beta * p[i];
    }
    throw MaxIterations("cg_solve: no convergence after " + std::to_string(max_iterations) + " iterations",
                        std::move(result.x), result.iterations, result.relative_residual);
}

CgResult cg_solve(const CsrMatrix& a, std::span<const double> b, double tol, int max_iterations)
{
    if (a.rows() != a.cols() || a.rows() != static_cast<int>(b.size()))
        throw DimensionMismatch("cg_solve: matrix and right-hand side do not match");
    return cg_solve([&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }, b, tol,
                    max_iterations);
}

} // namespace stwave
