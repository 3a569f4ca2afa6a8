#include "tvar/linalg.hpp"

#include <algorithm>
#include <cassert>

namespace tvar {

int rank(QMat a) {
    size_t rows = a.size();
    size_t cols = rows ? a[0].size() : 0;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c] / a[r][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return static_cast<int>(r);
}

namespace {

// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<size_t> rref(QMat& a, size_t cols) {
    std::vector<size_t> pivots;
    size_t rows = a.size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Rat inv = 1 / a[r][c];
        for (size_t j = c; j < a[r].size(); ++j) a[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (size_t j = c; j < a[i].size(); ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

std::optional<QVec> solve(const QMat& a, const QVec& b) {
    size_t rows = a.size();
    if (rows != b.size()) throw std::invalid_argument("solve: size mismatch");
    size_t cols = rows ? a[0].size() : 0;
    QMat aug(rows);
    for (size_t i = 0; i < rows; ++i) {
        aug[i] = a[i];
        aug[i].push_back(b[i]);
    }
    std::vector<size_t> pivots = rref(aug, cols);
    for (size_t i = pivots.size(); i < rows; ++i)
        if (aug[i][cols] != 0) return std::nullopt;
    QVec x(cols, Rat(0));
    for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug[i][cols];
    return x;
}

std::vector<QVec> kernel_basis(const QMat& a, size_t ncols) {
    QMat m = a;
    for (QVec& row : m)
        if (row.size() != ncols) throw std::invalid_argument("kernel_basis: ragged matrix");
    std::vector<size_t> pivots = rref(m, ncols);
    std::vector<bool> is_pivot(ncols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (size_t c = 0; c < ncols; ++c) {
        if (is_pivot[c]) continue;
        QVec v(ncols, Rat(0));
        v[c] = 1;
        for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

int affine_dim(const std::vector<QVec>& points) {
    if (points.empty()) return -1;
    QMat diffs;
    for (size_t i = 1; i < points.size(); ++i) diffs.push_back(vec_sub(points[i], points[0]));
    return diffs.empty() ? 0 : rank(diffs);
}

namespace {

// Column Hermite-style reduction: returns unimodular U with A*U in column
// echelon form. pivot[r] = column index of the pivot in row r, or -1.
void column_echelon(ZMat& a, ZMat& u, std::vector<int>& pivot_col) {
    size_t rows = a.size();
    size_t cols = rows ? a[0].size() : 0;
    u.assign(cols, ZVec(cols, 0));
    for (size_t i = 0; i < cols; ++i) u[i][i] = 1;
    pivot_col.assign(rows, -1);
    size_t next = 0;

    auto col_addmul = [&](size_t dst, size_t src, const Int& f) {
        for (size_t i = 0; i < rows; ++i) a[i][dst] += f * a[i][src];
        for (size_t i = 0; i < cols; ++i) u[i][dst] += f * u[i][src];
    };
    auto col_swap = [&](size_t x, size_t y) {
        if (x == y) return;
        for (size_t i = 0; i < rows; ++i) std::swap(a[i][x], a[i][y]);
        for (size_t i = 0; i < cols; ++i) std::swap(u[i][x], u[i][y]);
    };
    auto col_neg = [&](size_t x) {
        for (size_t i = 0; i < rows; ++i) a[i][x] = -a[i][x];
        for (size_t i = 0; i < cols; ++i) u[i][x] = -u[i][x];
    };

    for (size_t r = 0; r < rows && next < cols; ++r) {
        // Euclidean reduction across active columns in row r.
        while (true) {
            size_t best = cols;
            for (size_t c = next; c < cols; ++c) {
                if (a[r][c] == 0) continue;
                if (best == cols || mpz_cmpabs(a[r][c].get_mpz_t(), a[r][best].get_mpz_t()) < 0)
                    best = c;
            }
            if (best == cols) break;
            col_swap(next, best);
            if (a[r][next] < 0) col_neg(next);
            bool clean = true;
            for (size_t c = next + 1; c < cols; ++c) {
                if (a[r][c] == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), a[r][c].get_mpz_t(), a[r][next].get_mpz_t());
                col_addmul(c, next, -q);
                if (a[r][c] != 0) clean = false;
            }
            if (clean) {
                pivot_col[r] = static_cast<int>(next);
                ++next;
                break;
            }
        }
    }
}

}  // namespace

std::optional<IntSolveResult> solve_integer(ZMat a, ZVec b) {
    size_t rows = a.size();
    if (rows != b.size()) throw std::invalid_argument("solve_integer: size mismatch");
    size_t cols = rows ? a[0].size() : 0;
    if (cols == 0) {
        for (const Int& x : b)
            if (x != 0) return std::nullopt;
        return IntSolveResult{{}, {}};
    }
    ZMat u;
    std::vector<int> pivot_col;
    column_echelon(a, u, pivot_col);

    // Forward substitution on the echelon columns.
    ZVec y(cols, 0);
    std::vector<bool> used(cols, false);
    for (size_t r = 0; r < rows; ++r) {
        Int residual = b[r];
        for (size_t c = 0; c < cols; ++c)
            if (used[c]) residual -= a[r][c] * y[c];
        if (pivot_col[r] < 0) {
            if (residual != 0) return std::nullopt;
            continue;
        }
        size_t pc = static_cast<size_t>(pivot_col[r]);
        Int q, rem;
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), residual.get_mpz_t(),
                    a[r][pc].get_mpz_t());
        if (rem != 0) return std::nullopt;
        y[pc] = q;
        used[pc] = true;
    }

    IntSolveResult res;
    res.particular.assign(cols, 0);
    for (size_t i = 0; i < cols; ++i)
        for (size_t c = 0; c < cols; ++c)
            if (used[c] && y[c] != 0) res.particular[i] += u[i][c] * y[c];
    for (size_t c = 0; c < cols; ++c) {
        if (used[c]) continue;
        ZVec col(cols);
        for (size_t i = 0; i < cols; ++i) col[i] = u[i][c];
        res.lattice.push_back(std::move(col));
    }
    return res;
}

}  // namespace tvar
