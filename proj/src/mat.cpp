#include "stw/mat.hpp"

#include <algorithm>

namespace stw {

std::vector<double> jacobi_eigensolve(RMat m, RMat* eigvecs) {
    if (m.rows() != m.cols()) throw std::invalid_argument("jacobi: matrix not square");
    const int n = m.rows();
    RMat v = RMat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = m(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return m(i, i) < m(j, j); });
    std::vector<double> evals(n);
    for (int i = 0; i < n; ++i) evals[i] = m(order[i], order[i]);
    if (eigvecs) {
        *eigvecs = RMat(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) (*eigvecs)(i, j) = v(i, order[j]);
    }
    return evals;
}

std::vector<double> hermitian_eigenvalues(const CMat& h) {
    const int n = h.rows();
    if (n != h.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
    RMat e(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double re = 0.5 * (h(i, j).real() + h(j, i).real());
            double im = 0.5 * (h(i, j).imag() - h(j, i).imag());
            e(i, j) = re;
            e(n + i, n + j) = re;
            e(n + i, j) = im;
            e(i, n + j) = -im;
        }
    }
    std::vector<double> all = jacobi_eigensolve(e);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = 0.5 * (all[2 * i] + all[2 * i + 1]);
    return out;
}

std::vector<std::vector<double>> nullspace(const RMat& m, double tol) {
    const int c = m.cols();
    RMat g(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            double s = 0;
            for (int k = 0; k < m.rows(); ++k) s += m(k, i) * m(k, j);
            g(i, j) = s;
        }
    RMat vecs;
    std::vector<double> evals = jacobi_eigensolve(g, &vecs);
    double top = evals.empty() ? 0.0 : std::max(std::abs(evals.front()), std::abs(evals.back()));
    double cut = tol * std::max(top, 1.0);
    std::vector<std::vector<double>> out;
    for (int j = 0; j < c; ++j) {
        if (std::abs(evals[j]) < cut) {
            std::vector<double> v(c);
            for (int i = 0; i < c; ++i) v[i] = vecs(i, j);
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace stw
