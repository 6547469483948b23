#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "poromfe/types.hpp"

namespace poromfe {

/// Compressed-sparse-row matrix. Column indices are sorted and unique within
/// each row; explicit zeros are kept so a pattern can be reused.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values);

    static SparseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Position of (i, j) in values(), or -1 if outside the pattern.
    int find(int i, int j) const;
    double at(int i, int j) const;

    bool same_pattern(const SparseMatrix& other) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// y = A x, each row accumulated left to right.
Vector spmv(const SparseMatrix& a, std::span<const double> x);

/// Coordinate-format accumulator. Duplicates are summed in insertion order.
class TripletAccumulator {
public:
    TripletAccumulator(int rows, int cols) : rows_(rows), cols_(cols) {}

    void add(int i, int j, double v);
    void reserve(std::size_t n) { entries_.reserve(n); }
    SparseMatrix to_csr() const;

private:
    struct Entry {
        int row, col;
        double value;
    };
    int rows_, cols_;
    std::vector<Entry> entries_;
};

/// Sparse direct solver. The symbolic analysis is kept while the sparsity
/// pattern stays the same, so a sequence of Newton systems only pays for
/// the numeric factorization.
class LinearSolver {
public:
    /// tol: relative residual target; max_refine: iterative refinement passes.
    explicit LinearSolver(double tol = 1e-12, int max_refine = 3);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    /// Throws SolverError if the matrix is structurally or numerically singular.
    void factorize(const SparseMatrix& a);
    /// Throws SolverError when the relative residual stays above tol.
    Vector solve(std::span<const double> b) const;
    /// Relative residual reached by the last solve.
    double last_residual() const { return last_residual_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double tol_;
    int max_refine_;
    mutable double last_residual_ = 0.0;
};

/// One-shot solve of A x = b to relative residual tol.
Vector solve(const SparseMatrix& a, std::span<const double> b, double tol = 1e-12, int max_iter = 3);

double norm2(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

/// MatrixMarket coordinate real general.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);

}  // namespace poromfe
