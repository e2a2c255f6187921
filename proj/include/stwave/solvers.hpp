#pragma once

#include "stwave/sparse.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace stwave {

struct LuOptions
{
    /// Threshold partial pivoting: a pivot is acceptable if it is at least this
    /// fraction of the largest candidate in its column; diagonal pivots are preferred.
    double pivot_tolerance = 0.1;
    /// A pivot below this fraction of the largest (row-scaled) matrix entry means singular.
    double singular_threshold = 1e-14;
    /// One step of iterative refinement in every solve.
    bool iterative_refinement = false;
};

struct LuStats
{
    long nnz_l = 0;
    long nnz_u = 0;
    double min_pivot = 0.0;
    double max_pivot = 0.0;
};

/**
 * Sparse LU factorization P R A Q = L U with threshold partial pivoting and an
 * approximate minimum degree ordering of the A + A^T pattern (UMFPACK).
 *
 * Immutable after construction; concurrent solve() calls are allowed.
 */
class LuFactorization
{
public:
    explicit LuFactorization(const CsrMatrix& a, LuOptions options = {});
    ~LuFactorization();
    LuFactorization(LuFactorization&&) noexcept;
    LuFactorization& operator=(LuFactorization&&) noexcept;
    LuFactorization(const LuFactorization&) = delete;
    LuFactorization& operator=(const LuFactorization&) = delete;

    int size() const;
    const LuStats& stats() const;

    std::vector<double> solve(std::span<const double> b) const;
    void solve(std::span<const double> b, std::span<double> x) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

inline LuFactorization lu_factor(const CsrMatrix& a, LuOptions options = {})
{
    return LuFactorization(a, options);
}

inline std::vector<double> solve(const LuFactorization& factors, std::span<const double> b)
{
    return factors.solve(b);
}

/// y = Op x
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult
{
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Conjugate gradients; stops when ||b - A x|| <= tol ||b||. Throws MaxIterations or NotSPD.
CgResult cg_solve(const LinearOperator& apply, std::span<const double> b, double tol, int max_iterations);
CgResult cg_solve(const CsrMatrix& a, std::span<const double> b, double tol, int max_iterations);

} // namespace stwave
