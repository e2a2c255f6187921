#include "stwave/sparse.hpp"

#include "stwave/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace stwave {

CsrMatrix::CsrMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : rows_(rows)
    , cols_(cols)
    , row_ptr_(std::move(row_ptr))
    , col_idx_(std::move(col_idx))
    , values_(std::move(values))
{
    if (rows_ < 0 || cols_ < 0 || static_cast<int>(row_ptr_.size()) != rows_ + 1 || row_ptr_.front() != 0
        || col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<int>(values_.size()))
        throw DimensionMismatch("CsrMatrix: inconsistent storage arrays");
    for (int r = 0; r < rows_; ++r) {
        if (row_ptr_[r] > row_ptr_[r + 1])
            throw DimensionMismatch("CsrMatrix: row offsets are not monotone");
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            if (col_idx_[k] < 0 || col_idx_[k] >= cols_)
                throw DimensionMismatch("CsrMatrix: column index out of range");
            if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
                throw DimensionMismatch("CsrMatrix: column indices not strictly increasing");
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
    // counting sort by row keeps the input order inside each row
    std::vector<int> count(rows + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw DimensionMismatch("from_triplets: entry outside the matrix shape");
        ++count[t.row + 1];
    }
    for (int r = 0; r < rows; ++r)
        count[r + 1] += count[r];
    std::vector<Triplet> by_row(triplets.size());
    {
        std::vector<int> next(count.begin(), count.end() - 1);
        for (const auto& t : triplets)
            by_row[next[t.row]++] = t;
    }

    std::vector<int> row_ptr(rows + 1, 0);
    std::vector<int> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    for (int r = 0; r < rows; ++r) {
        auto first = by_row.begin() + count[r];
        auto last = by_row.begin() + count[r + 1];
        std::stable_sort(first, last, [](const Triplet& a, const Triplet& b) { return a.col < b.col; });
        for (auto it = first; it != last; ++it) {
            if (static_cast<int>(col_idx.size()) > row_ptr[r] && col_idx.back() == it->col)
                values.back() += it->value;
            else {
                col_idx.push_back(it->col);
                values.push_back(it->value);
            }
        }
        row_ptr[r + 1] = static_cast<int>(col_idx.size());
    }
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(int n)
{
    std::vector<int> row_ptr(n + 1), col_idx(n);
    for (int i = 0; i < n; ++i) {
        row_ptr[i + 1] = i + 1;
        col_idx[i] = i;
    }
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

double CsrMatrix::at(int row, int col) const
{
    const auto first = col_idx_.begin() + row_ptr_[row];
    const auto last = col_idx_.begin() + row_ptr_[row + 1];
    const auto it = std::lower_bound(first, last, col);
    return (it != last && *it == col) ? values_[it - col_idx_.begin()] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
        throw DimensionMismatch("multiply: vector length does not match matrix shape");
    for (int r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            sum += values_[k] * x[col_idx_[k]];
        y[r] = sum;
    }
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const
{
    if (static_cast<int>(x.size()) != rows_ || static_cast<int>(y.size()) != cols_)
        throw DimensionMismatch("multiply_transpose: vector length does not match matrix shape");
    std::fill(y.begin(), y.end(), 0.0);
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            y[col_idx_[k]] += values_[k] * x[r];
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const
{
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
}

CsrMatrix CsrMatrix::transpose() const
{
    std::vector<int> row_ptr(cols_ + 1, 0);
    for (int c : col_idx_)
        ++row_ptr[c + 1];
    for (int c = 0; c < cols_; ++c)
        row_ptr[c + 1] += row_ptr[c];
    std::vector<int> next(row_ptr.begin(), row_ptr.end() - 1);
    std::vector<int> col_idx(values_.size());
    std::vector<double> values(values_.size());
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int slot = next[col_idx_[k]]++;
            col_idx[slot] = r;
            values[slot] = values_[k];
        }
    }
    return CsrMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::scaled(double factor) const
{
    CsrMatrix result = *this;
    for (double& v : result.values_)
        v *= factor;
    return result;
}

double CsrMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

double CsrMatrix::norm_inf() const
{
    double m = 0.0;
    for (int r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            sum += std::abs(values_[k]);
        m = std::max(m, sum);
    }
    return m;
}

std::vector<std::vector<double>> CsrMatrix::to_dense() const
{
    std::vector<std::vector<double>> dense(rows_, std::vector<double>(cols_, 0.0));
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            dense[r][col_idx_[k]] = values_[k];
    return dense;
}

CsrMatrix block_matrix(const CsrMatrix* a, const CsrMatrix* b, const CsrMatrix* c, const CsrMatrix* d,
                       int top_rows, int left_cols, int bottom_rows, int right_cols)
{
    auto check = [](const CsrMatrix* m, int rows, int cols) {
        if (m && (m->rows() != rows || m->cols() != cols))
            throw DimensionMismatch("block_matrix: block shape mismatch");
    };
    check(a, top_rows, left_cols);
    check(b, top_rows, right_cols);
    check(c, bottom_rows, left_cols);
    check(d, bottom_rows, right_cols);

    const int rows = top_rows + bottom_rows;
    std::vector<int> row_ptr(rows + 1, 0);
    std::vector<int> col_idx;
    std::vector<double> values;
    auto append_row = [&](const CsrMatrix* m, int r, int offset) {
        if (!m)
            return;
        for (int k = m->row_ptr()[r]; k < m->row_ptr()[r + 1]; ++k) {
            col_idx.push_back(m->col_idx()[k] + offset);
            values.push_back(m->values()[k]);
        }
    };
    for (int r = 0; r < top_rows; ++r) {
        append_row(a, r, 0);
        append_row(b, r, left_cols);
        row_ptr[r + 1] = static_cast<int>(col_idx.size());
    }
    for (int r = 0; r < bottom_rows; ++r) {
        append_row(c, r, 0);
        append_row(d, r, left_cols);
        row_ptr[top_rows + r + 1] = static_cast<int>(col_idx.size());
    }
    return CsrMatrix(rows, left_cols + right_cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("dot: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += a[i] * b[i];
    return sum;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& matrix)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nnz() << '\n';
    out << std::setprecision(17);
    for (int r = 0; r < matrix.rows(); ++r)
        for (int k = matrix.row_ptr()[r]; k < matrix.row_ptr()[r + 1]; ++k)
            out << r + 1 << ' ' << matrix.col_idx()[k] + 1 << ' ' << matrix.values()[k] << '\n';
}

CsrMatrix read_matrix_market(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw IoError("MatrixMarket: missing banner");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || (field != "real" && field != "integer"))
        throw IoError("MatrixMarket: only real coordinate matrices are supported");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw IoError("MatrixMarket: unsupported symmetry '" + symmetry + "'");

    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%')
            break;
    std::istringstream size_line(line);
    long rows = -1, cols = -1, entries = -1;
    if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
        throw IoError("MatrixMarket: bad size line");

    std::vector<Triplet> triplets;
    triplets.reserve(symmetric ? 2 * entries : entries);
    for (long k = 0; k < entries; ++k) {
        long r = 0, c = 0;
        double v = 0.0;
        if (!(in >> r >> c >> v))
            throw IoError("MatrixMarket: truncated entry list");
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw IoError("MatrixMarket: entry index out of range");
        triplets.push_back({static_cast<int>(r - 1), static_cast<int>(c - 1), v});
        if (symmetric && r != c)
            triplets.push_back({static_cast<int>(c - 1), static_cast<int>(r - 1), v});
    }
    return CsrMatrix::from_triplets(static_cast<int>(rows), static_cast<int>(cols), std::move(triplets));
}

namespace {

template <typename T>
T to_little_endian(T value)
{
    if constexpr (std::endian::native == std::endian::little)
        return value;
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace

void write_vector_binary(std::ostream& out, std::span<const double> values)
{
    const std::uint64_t count = to_little_endian<std::uint64_t>(values.size());
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (double v : values) {
        const double le = to_little_endian(v);
        out.write(reinterpret_cast<const char*>(&le), sizeof(le));
    }
    if (!out)
        throw IoError("vector dump: write failed");
}

std::vector<double> read_vector_binary(std::istream& in)
{
    std::uint64_t count = 0;
    if (!in.read(reinterpret_cast<char*>(&count), sizeof(count)))
        throw IoError("vector dump: missing length prefix");
    count = to_little_endian(count);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
    for (std::uint64_t i = 0; i < count; ++i) {
        double v = 0.0;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
            throw IoError("vector dump: truncated payload");
        values.push_back(to_little_endian(v));
    }
    return values;
}

} // namespace stwave
