#include "poromfe/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "poromfe/errors.hpp"

namespace poromfe {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
    if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1 || col_idx_.size() != values_.size() ||
        static_cast<std::size_t>(row_ptr_.back()) != values_.size())
        throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
    for (int i = 0; i < rows_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1]) throw std::invalid_argument("SparseMatrix: row offsets not monotone");
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (col_idx_[k] < 0 || col_idx_[k] >= cols_) throw std::invalid_argument("SparseMatrix: column out of range");
            if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
                throw std::invalid_argument("SparseMatrix: columns not sorted/unique");
        }
    }
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<int> ptr(n + 1), idx(n);
    std::iota(ptr.begin(), ptr.end(), 0);
    std::iota(idx.begin(), idx.end(), 0);
    return SparseMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

int SparseMatrix::find(int i, int j) const {
    const auto begin = col_idx_.begin() + row_ptr_[i];
    const auto end = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return -1;
    return static_cast<int>(it - col_idx_.begin());
}

double SparseMatrix::at(int i, int j) const {
    const int k = find(i, j);
    return k < 0 ? 0.0 : values_[k];
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(a.cols()))
        throw std::invalid_argument("spmv: dimension mismatch");
    Vector y(a.rows(), 0.0);
    const auto& ptr = a.row_ptr();
    const auto& idx = a.col_idx();
    const auto& val = a.values();
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
        y[i] = s;
    }
    return y;
}

void TripletAccumulator::add(int i, int j, double v) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("TripletAccumulator: index out of range");
    entries_.push_back({i, j, v});
}

SparseMatrix TripletAccumulator::to_csr() const {
    std::vector<std::size_t> order(entries_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        const auto& ea = entries_[a];
        const auto& eb = entries_[b];
        return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
    });
    std::vector<int> ptr(rows_ + 1, 0), idx;
    std::vector<double> val;
    idx.reserve(entries_.size());
    val.reserve(entries_.size());
    int last_row = -1, last_col = -1;
    for (std::size_t k : order) {
        const auto& e = entries_[k];
        if (e.row == last_row && e.col == last_col) {
            val.back() += e.value;
            continue;
        }
        idx.push_back(e.col);
        val.push_back(e.value);
        ++ptr[e.row + 1];
        last_row = e.row;
        last_col = e.col;
    }
    for (int i = 0; i < rows_; ++i) ptr[i + 1] += ptr[i];
    return SparseMatrix(rows_, cols_, std::move(ptr), std::move(idx), std::move(val));
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct LinearSolver::Impl {
    using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
    SparseMatrix pattern;  // values unused; kept to detect pattern changes
    bool analyzed = false;
    ColMatrix eigen_matrix;
};

LinearSolver::LinearSolver(double tol, int max_refine)
    : impl_(std::make_unique<Impl>()), tol_(tol), max_refine_(max_refine) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("LinearSolver: matrix not square");
    using RowMap = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>>;
    RowMap view(a.rows(), a.cols(), static_cast<int>(a.nnz()), a.row_ptr().data(), a.col_idx().data(),
                a.values().data());
    impl_->eigen_matrix = view;
    impl_->eigen_matrix.makeCompressed();
    if (!impl_->analyzed || !impl_->pattern.same_pattern(a)) {
        impl_->lu.analyzePattern(impl_->eigen_matrix);
        impl_->pattern = SparseMatrix(a.rows(), a.cols(), a.row_ptr(), a.col_idx(), std::vector<double>(a.nnz(), 0.0));
        impl_->analyzed = true;
    }
    impl_->lu.factorize(impl_->eigen_matrix);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverError("LinearSolver: factorization failed: " + impl_->lu.lastErrorMessage(),
                          std::numeric_limits<double>::infinity());
}

Vector LinearSolver::solve(std::span<const double> b) const {
    const auto& A = impl_->eigen_matrix;
    if (b.size() != static_cast<std::size_t>(A.rows())) throw std::invalid_argument("LinearSolver: rhs size mismatch");
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    const double bnorm = rhs.norm();
    Eigen::VectorXd x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("LinearSolver: solve failed", 0.0);
    if (bnorm == 0.0) {
        last_residual_ = 0.0;
        return Vector(x.data(), x.data() + x.size());
    }
    Eigen::VectorXd r = rhs - A * x;
    double rel = r.norm() / bnorm;
    for (int pass = 0; pass < max_refine_ && rel > tol_; ++pass) {
        x += impl_->lu.solve(r);
        r = rhs - A * x;
        rel = r.norm() / bnorm;
    }
    last_residual_ = rel;
    if (!std::isfinite(rel) || rel > tol_)
        throw SolverError("LinearSolver: relative residual " + std::to_string(rel) + " above tolerance", rel);
    return Vector(x.data(), x.data() + x.size());
}

Vector solve(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter) {
    LinearSolver solver(tol, max_iter);
    solver.factorize(a);
    return solver.solve(b);
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    os.precision(17);
    for (int i = 0; i < a.rows(); ++i)
        for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
            os << i + 1 << ' ' << a.col_idx()[k] + 1 << ' ' << a.values()[k] << '\n';
}

}  // namespace poromfe
