#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace stwave {

struct Triplet
{
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/**
 * Compressed-row sparse matrix.
 *
 * Column indices are strictly increasing within each row and no entry is stored
 * twice.  Entries that sum to zero during assembly are kept, so the pattern only
 * depends on the triplet positions.
 */
class CsrMatrix
{
public:
    CsrMatrix() = default;
    CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
              std::vector<double> values);

    /// Sums duplicates in input order, so the result is independent of how the
    /// triplet list was produced as long as its order is.
    static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static CsrMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    /// Stored value at (row, col), zero if the position is not in the pattern.
    double at(int row, int col) const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y = A^T x
    void multiply_transpose(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;

    CsrMatrix transpose() const;
    CsrMatrix scaled(double factor) const;

    double max_abs() const;
    /// Maximum absolute row sum.
    double norm_inf() const;

    std::vector<std::vector<double>> to_dense() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Assembles [[a, b], [c, d]]; a null block is treated as zero. Block shapes must agree.
CsrMatrix block_matrix(const CsrMatrix* a, const CsrMatrix* b, const CsrMatrix* c, const CsrMatrix* d,
                       int top_rows, int left_cols, int bottom_rows, int right_cols);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// MatrixMarket coordinate format (real general); the reader also accepts symmetric files.
void write_matrix_market(std::ostream& out, const CsrMatrix& matrix);
CsrMatrix read_matrix_market(std::istream& in);

/// Length-prefixed little-endian binary dump: uint64 count, then count IEEE doubles.
void write_vector_binary(std::ostream& out, std::span<const double> values);
std::vector<double> read_vector_binary(std::istream& in);

} // namespace stwave
