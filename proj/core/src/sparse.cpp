#include "thoraxfem/sparse.hpp"

#include "thoraxfem/errors.hpp"

#include <algorithm>
#include <cmath>

#ifdef THORAXFEM_HAVE_OPENMP
#include <omp.h>
#endif

namespace tfem {

namespace {
int g_threads = 1;
}

void set_num_threads(int n)
{
    g_threads = std::max(1, n);
}

int num_threads()
{
    return g_threads;
}

CsrMatrix CsrMatrix::from_adjacency(const std::vector<std::vector<int>>& columns)
{
    CsrMatrix m;
    m.n = static_cast<int>(columns.size());
    m.row_ptr.resize(static_cast<std::size_t>(m.n) + 1, 0);
    std::int64_t nnz = 0;
    for (int i = 0; i < m.n; ++i) {
        nnz += static_cast<std::int64_t>(columns[static_cast<std::size_t>(i)].size());
        m.row_ptr[static_cast<std::size_t>(i) + 1] = nnz;
    }
    m.col_idx.reserve(static_cast<std::size_t>(nnz));
    for (const auto& row : columns) {
        m.col_idx.insert(m.col_idx.end(), row.begin(), row.end());
    }
    m.values.assign(static_cast<std::size_t>(nnz), 0.0);
    return m;
}

double* CsrMatrix::find(int row, int col)
{
    const auto begin = col_idx.begin() + row_ptr[static_cast<std::size_t>(row)];
    const auto end = col_idx.begin() + row_ptr[static_cast<std::size_t>(row) + 1];
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return nullptr;
    return &values[static_cast<std::size_t>(it - col_idx.begin())];
}

const double* CsrMatrix::find(int row, int col) const
{
    return const_cast<CsrMatrix*>(this)->find(row, col);
}

double CsrMatrix::at(int row, int col) const
{
    const double* p = find(row, col);
    return p ? *p : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n) {
        throw Error("csr multiply: size mismatch");
    }
#ifdef THORAXFEM_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(g_threads) if (g_threads > 1)
#endif
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::int64_t k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            sum += values[static_cast<std::size_t>(k)]
                * x[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(i)] = sum;
    }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const
{
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
    return d;
}

double CsrMatrix::frobenius_norm() const
{
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

double CsrMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double CsrMatrix::max_asymmetry() const
{
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (std::int64_t k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            const int j = col_idx[static_cast<std::size_t>(k)];
            const double vij = values[static_cast<std::size_t>(k)];
            const double* vji = find(j, i);
            worst = std::max(worst, std::abs(vij - (vji ? *vji : 0.0)));
        }
    }
    return worst;
}

// Dot products stay sequential; summation order is part of the
// deterministic-mode contract.
double dot(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

} // namespace tfem
