#include "landscape/matrix.hpp"

#include <cmath>

namespace landscape {

namespace {

// Cyclic Jacobi eigendecomposition for small symmetric matrices.
// A is overwritten with the diagonalised matrix; V accumulates the rotations
// so that original A = V diag V^T.
void jacobi_eigen(Matrix& a, Matrix& v) {
    const int n = a.rows;
    v = Matrix(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-300) return;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
}

} // namespace

std::vector<double> solve_symmetric_min_norm(const Matrix& gram, const std::vector<double>& rhs,
                                             double rel_tol) {
    if (gram.rows != gram.cols || gram.rows != static_cast<int>(rhs.size()))
        throw ShapeError("solve_symmetric_min_norm: shape mismatch");
    const int n = gram.rows;
    Matrix a = gram, v;
    jacobi_eigen(a, v);
    double max_eig = 0.0;
    for (int i = 0; i < n; ++i) max_eig = std::max(max_eig, std::abs(a(i, i)));
    const double cutoff = max_eig * rel_tol;
    // pinv: x = V diag(1/lambda) V^T rhs, zeroing small eigenvalues
    std::vector<double> vt_rhs(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += v(k, i) * rhs[static_cast<std::size_t>(k)];
        vt_rhs[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < n; ++i) {
        const double lambda = a(i, i);
        vt_rhs[static_cast<std::size_t>(i)] =
            std::abs(lambda) > cutoff ? vt_rhs[static_cast<std::size_t>(i)] / lambda : 0.0;
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += v(k, i) * vt_rhs[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(k)] = acc;
    }
    return x;
}

} // namespace landscape
