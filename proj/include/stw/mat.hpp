#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace stw {

using cplx = std::complex<double>;

// Small dense square/rectangular matrix over double or complex<double>.
// Sizes here are tiny (2n x 2n with n <= 4), so everything is direct.
template <class T>
struct Mat {
    int rows_ = 0, cols_ = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(int r, int c) : rows_(r), cols_(c), a(static_cast<size_t>(r) * c, T{}) {}
    static Mat zero(int n) { return Mat(n, n); }
    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols_ + j]; }

    Mat& operator+=(const Mat& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (size_t k = 0; k < a.size(); ++k) a[k] -= o.a[k];
        return *this;
    }
    Mat& operator*=(T s) {
        for (auto& x : a) x *= s;
        return *this;
    }

    friend Mat operator+(Mat x, const Mat& y) { return x += y; }
    friend Mat operator-(Mat x, const Mat& y) { return x -= y; }
    friend Mat operator*(Mat x, T s) { return x *= s; }
    friend Mat operator*(T s, Mat x) { return x *= s; }
    friend Mat operator-(Mat x) { return x *= T{-1}; }

    friend Mat operator*(const Mat& x, const Mat& y) {
        assert(x.cols_ == y.rows_);
        Mat r(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                T xik = x(i, k);
                if (xik == T{}) continue;
                for (int j = 0; j < y.cols_; ++j) r(i, j) += xik * y(k, j);
            }
        return r;
    }

    std::vector<T> apply(const std::vector<T>& v) const {
        assert(static_cast<int>(v.size()) == cols_);
        std::vector<T> r(rows_, T{});
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Mat transposed() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    T trace() const {
        T s{};
        for (int i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
        return s;
    }

    double frob() const {
        double s = 0;
        for (const auto& x : a) s += std::norm(cplx(x));
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0;
        for (const auto& x : a) s = std::max(s, std::abs(cplx(x)));
        return s;
    }
};

using RMat = Mat<double>;
using CMat = Mat<cplx>;

template <class T>
Mat<T> commutator(const Mat<T>& x, const Mat<T>& y) {
    return x * y - y * x;
}

template <class T>
Mat<T> anticommutator(const Mat<T>& x, const Mat<T>& y) {
    return x * y + y * x;
}

inline CMat complexify(const RMat& m) {
    CMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

inline RMat real_part(const CMat& m) {
    RMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).real();
    return r;
}

inline double imag_norm(const CMat& m) {
    double s = 0;
    for (const auto& x : m.a) s += x.imag() * x.imag();
    return std::sqrt(s);
}

inline CMat conj_transpose(const CMat& m) {
    CMat r(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
    return r;
}

// Gauss-Jordan inverse with partial pivoting.
template <class T>
Mat<T> inverse(Mat<T> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
    const int n = m.rows();
    Mat<T> inv = Mat<T>::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(cplx(m(col, col)));
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(cplx(m(r, col)));
            if (v > best) { best = v; piv = r; }
        }
        if (best < 1e-300) throw std::runtime_error("inverse: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        T d = m(col, col);
        for (int j = 0; j < n; ++j) { m(col, j) /= d; inv(col, j) /= d; }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            T f = m(r, col);
            if (f == T{}) continue;
            for (int j = 0; j < n; ++j) {
                m(r, j) -= f * m(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

template <class T>
std::vector<T> solve(const Mat<T>& m, const std::vector<T>& b) {
    return inverse(m).apply(b);
}

// Cyclic Jacobi for real symmetric matrices. Returns eigenvalues ascending;
// eigenvectors (columns) optional.
std::vector<double> jacobi_eigensolve(RMat m, RMat* eigvecs = nullptr);

// Eigenvalues of a Hermitian matrix via the real symmetric embedding
// [[Re, -Im], [Im, Re]] whose spectrum is that of H doubled.
std::vector<double> hermitian_eigenvalues(const CMat& h);

// Orthonormal (euclidean) basis of the nullspace of a real matrix, detected
// as the eigenvectors of M^T M with eigenvalue below tol * max_eig.
std::vector<std::vector<double>> nullspace(const RMat& m, double tol = 1e-10);

}  // namespace stw
