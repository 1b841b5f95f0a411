#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcx {

using cd = std::complex<double>;

/// Dense complex matrix, row-major.  General (not necessarily Hermitian)
/// carrier used for rectangular inputs and intermediate products.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("Matrix: dimensions must be >= 1");
    }
    Matrix(int rows, int cols, std::vector<cd> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("Matrix: dimensions must be >= 1");
        if (a_.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("Matrix: entry count does not match shape");
    }

    static Matrix identity(int d) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cd& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const cd& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    std::span<const cd> entries() const { return a_; }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(cd s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cd s) { return a *= s; }
    friend Matrix operator*(cd s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                cd aik = a(i, k);
                if (aik == cd{}) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    cd trace() const {
        if (rows_ != cols_) throw std::invalid_argument("trace: matrix is not square");
        cd t{};
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0;
        for (const auto& x : a_) s += std::norm(x);
        return std::sqrt(s);
    }

    double max_abs_entry() const {
        double m = 0;
        for (const auto& x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    bool all_finite() const {
        for (const auto& x : a_)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
        return true;
    }

private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Matrix: shape mismatch");
    }

    int rows_, cols_;
    std::vector<cd> a_;
};

/// Dense d x d complex Hermitian matrix.  Hermiticity is enforced at
/// construction: entries within tolerance are symmetrized to (A + A*)/2,
/// larger residuals are rejected.
class HermitianMatrix {
public:
    static constexpr double kHermiticityTol = 1e-12;

    explicit HermitianMatrix(int d) : m_(d, d) {
        if (d < 1) throw std::invalid_argument("HermitianMatrix: dim must be >= 1");
    }

    /// Validating constructor from a square complex matrix.
    static HermitianMatrix from_matrix(const Matrix& m, double tol = kHermiticityTol) {
        if (m.rows() != m.cols())
            throw std::invalid_argument("HermitianMatrix: matrix is not square");
        if (!m.all_finite())
            throw std::invalid_argument("HermitianMatrix: non-finite entries");
        HermitianMatrix h(m.rows());
        for (int j = 0; j < m.rows(); ++j)
            for (int k = 0; k <= j; ++k) {
                cd a = m(j, k), b = std::conj(m(k, j));
                if (std::abs(a - b) > 2 * tol)
                    throw std::invalid_argument(
                        "HermitianMatrix: hermiticity residual " + std::to_string(std::abs(a - b)) +
                        " at entry (" + std::to_string(j) + "," + std::to_string(k) +
                        ") exceeds tolerance");
                cd v = 0.5 * (a + b);
                h.m_(j, k) = v;
                h.m_(k, j) = std::conj(v);
            }
        for (int j = 0; j < m.rows(); ++j) h.m_(j, j) = cd{h.m_(j, j).real(), 0.0};
        return h;
    }

    static HermitianMatrix diagonal(const std::vector<double>& diag) {
        HermitianMatrix h(static_cast<int>(diag.size()));
        for (size_t i = 0; i < diag.size(); ++i) h.m_(static_cast<int>(i), static_cast<int>(i)) = diag[i];
        return h;
    }

    static HermitianMatrix identity(int d) {
        return HermitianMatrix::diagonal(std::vector<double>(d, 1.0));
    }

    static HermitianMatrix zero(int d) { return HermitianMatrix(d); }

    int dim() const { return m_.rows(); }
    const Matrix& mat() const { return m_; }
    cd operator()(int j, int k) const { return m_(j, k); }

    HermitianMatrix& operator+=(const HermitianMatrix& o) {
        m_ += o.m_;
        return *this;
    }
    HermitianMatrix& operator-=(const HermitianMatrix& o) {
        m_ -= o.m_;
        return *this;
    }
    HermitianMatrix& operator*=(double s) {
        m_ *= cd{s, 0};
        return *this;
    }
    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
    friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

    /// A * A; Hermitian whenever A is.
    HermitianMatrix square() const {
        HermitianMatrix h(dim());
        h.m_ = m_ * m_;
        h.resymmetrize();
        return h;
    }

    double max_abs_entry() const { return m_.max_abs_entry(); }
    double frobenius_norm() const { return m_.frobenius_norm(); }

private:
    // Drops the O(eps) skew part that accumulates in products of exact Hermitians.
    void resymmetrize() {
        for (int j = 0; j < dim(); ++j) {
            for (int k = 0; k < j; ++k) {
                cd v = 0.5 * (m_(j, k) + std::conj(m_(k, j)));
                m_(j, k) = v;
                m_(k, j) = std::conj(v);
            }
            m_(j, j) = cd{m_(j, j).real(), 0.0};
        }
    }

    Matrix m_;
};

}  // namespace mcx
