#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tfem {

// Number of threads used by row-parallel matrix-vector products.
// Per-row results are computed sequentially, so the product is
// bit-identical for any thread count.
void set_num_threads(int n);
int num_threads();

// Square CSR matrix with sorted column indices per row.
struct CsrMatrix {
    int n = 0;
    std::vector<std::int64_t> row_ptr; // size n+1
    std::vector<int> col_idx;
    std::vector<double> values;

    std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

    // Pattern from sorted, unique adjacency lists; values zeroed.
    static CsrMatrix from_adjacency(const std::vector<std::vector<int>>& columns);

    // Entry accessor by binary search; returns nullptr when the entry
    // is not in the pattern.
    double* find(int row, int col);
    const double* find(int row, int col) const;
    double at(int row, int col) const; // 0 outside the pattern

    void multiply(std::span<const double> x, std::span<double> y) const; // y = A x
    std::vector<double> multiply(const std::vector<double>& x) const;

    std::vector<double> diagonal() const;
    double frobenius_norm() const;
    double max_abs() const;
    // max |A_ij - A_ji| over the stored pattern (entries missing from the
    // transposed position count with full magnitude).
    double max_asymmetry() const;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

} // namespace tfem
