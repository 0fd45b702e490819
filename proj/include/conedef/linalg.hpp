#pragma once

#include <optional>
#include <vector>

#include "rational.hpp"

namespace conedef {

using DenseVec = std::vector<Rational>;

inline bool dv_is_zero(const DenseVec& v)
{
    for (const auto& c : v)
        if (c != 0)
            return false;
    return true;
}

// Dense matrix over Q. Everything at desk scale; exact Gaussian elimination.
struct Mat {
    int nrows = 0;
    int ncols = 0;
    std::vector<Rational> a; // row-major

    Mat() = default;
    Mat(int r, int c) : nrows(r), ncols(c), a(static_cast<size_t>(r) * c, Rational(0)) {}

    Rational& at(int i, int j) { return a[static_cast<size_t>(i) * ncols + j]; }
    const Rational& at(int i, int j) const { return a[static_cast<size_t>(i) * ncols + j]; }

    static Mat from_columns(const std::vector<DenseVec>& cols, int nrows)
    {
        Mat m(nrows, static_cast<int>(cols.size()));
        for (int j = 0; j < m.ncols; ++j)
            for (int i = 0; i < nrows; ++i)
                m.at(i, j) = cols[j][i];
        return m;
    }

    DenseVec apply(const DenseVec& v) const
    {
        DenseVec out(nrows, Rational(0));
        for (int i = 0; i < nrows; ++i)
            for (int j = 0; j < ncols; ++j)
                if (at(i, j) != 0 && v[j] != 0)
                    out[i] += at(i, j) * v[j];
        return out;
    }
};

// In-place Gauss-Jordan to reduced row echelon form; returns pivot columns.
inline std::vector<int> rref(Mat& m)
{
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.ncols && row < m.nrows; ++col) {
        int sel = -1;
        for (int i = row; i < m.nrows; ++i)
            if (m.at(i, col) != 0) {
                sel = i;
                break;
            }
        if (sel < 0)
            continue;
        if (sel != row)
            for (int j = 0; j < m.ncols; ++j)
                std::swap(m.at(sel, j), m.at(row, j));
        Rational inv = Rational(1) / m.at(row, col);
        for (int j = col; j < m.ncols; ++j)
            m.at(row, j) *= inv;
        for (int i = 0; i < m.nrows; ++i) {
            if (i == row || m.at(i, col) == 0)
                continue;
            Rational f = m.at(i, col);
            for (int j = col; j < m.ncols; ++j)
                m.at(i, j) -= f * m.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline int rank(Mat m)
{
    return static_cast<int>(rref(m).size());
}

// Basis of ker(m), one vector per free column, in column order.
inline std::vector<DenseVec> kernel_basis(Mat m)
{
    std::vector<int> pivots = rref(m);
    std::vector<char> is_pivot(m.ncols, 0);
    for (int p : pivots)
        is_pivot[p] = 1;
    std::vector<DenseVec> out;
    for (int free = 0; free < m.ncols; ++free) {
        if (is_pivot[free])
            continue;
        DenseVec v(m.ncols, Rational(0));
        v[free] = 1;
        for (size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m.at(static_cast<int>(r), free);
        out.push_back(std::move(v));
    }
    return out;
}

// One particular solution of m x = b, if any.
inline std::optional<DenseVec> solve(const Mat& m, const DenseVec& b)
{
    Mat aug(m.nrows, m.ncols + 1);
    for (int i = 0; i < m.nrows; ++i) {
        for (int j = 0; j < m.ncols; ++j)
            aug.at(i, j) = m.at(i, j);
        aug.at(i, m.ncols) = b[i];
    }
    std::vector<int> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == m.ncols)
        return std::nullopt; // inconsistent
    DenseVec x(m.ncols, Rational(0));
    for (size_t r = 0; r < pivots.size(); ++r)
        x[pivots[r]] = aug.at(static_cast<int>(r), m.ncols);
    return x;
}

// A subspace maintained in RREF row form. Supports canonical reduction of a
// vector against the span, membership tests and incremental growth.
struct RowSpace {
    int ncols = 0;
    std::vector<DenseVec> rows;  // in RREF
    std::vector<int> pivots;     // pivot column of each row

    RowSpace() = default;
    explicit RowSpace(int n) : ncols(n) {}

    int dim() const { return static_cast<int>(rows.size()); }

    DenseVec reduce(DenseVec v) const
    {
        for (size_t r = 0; r < rows.size(); ++r) {
            const Rational& c = v[pivots[r]];
            if (c != 0) {
                Rational f = c;
                for (int j = 0; j < ncols; ++j)
                    if (rows[r][j] != 0)
                        v[j] -= f * rows[r][j];
            }
        }
        return v;
    }

    bool contains(const DenseVec& v) const { return dv_is_zero(reduce(v)); }

    // Returns true if the vector enlarged the span.
    bool insert(DenseVec v)
    {
        v = reduce(std::move(v));
        int piv = -1;
        for (int j = 0; j < ncols; ++j)
            if (v[j] != 0) {
                piv = j;
                break;
            }
        if (piv < 0)
            return false;
        Rational inv = Rational(1) / v[piv];
        for (int j = 0; j < ncols; ++j)
            v[j] *= inv;
        // back-substitute into existing rows, keep RREF
        for (size_t r = 0; r < rows.size(); ++r) {
            Rational f = rows[r][piv];
            if (f != 0)
                for (int j = 0; j < ncols; ++j)
                    rows[r][j] -= f * v[j];
        }
        size_t pos = 0;
        while (pos < rows.size() && pivots[pos] < piv)
            ++pos;
        rows.insert(rows.begin() + pos, std::move(v));
        pivots.insert(pivots.begin() + pos, piv);
        return true;
    }

    bool equals(const RowSpace& o) const
    {
        if (dim() != o.dim())
            return false;
        for (const auto& r : rows)
            if (!o.contains(r))
                return false;
        return true;
    }
};

} // namespace conedef
