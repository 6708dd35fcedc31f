#pragma once

#include <cstddef>
#include <vector>

#include "landscape/errors.hpp"

namespace landscape {

// Row-major dense matrix. The networks here are tiny (widths of a few), so a
// flat std::vector is all we need.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    // y = A x
    std::vector<double> apply(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != cols) throw ShapeError("matrix-vector size mismatch");
        std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
        for (int i = 0; i < rows; ++i) {
            double acc = 0.0;
            const double* row = data.data() + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    }

    // y = A^T x
    std::vector<double> apply_transposed(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != rows) throw ShapeError("matrix^T-vector size mismatch");
        std::vector<double> y(static_cast<std::size_t>(cols), 0.0);
        for (int i = 0; i < rows; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            const double* row = data.data() + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) y[static_cast<std::size_t>(j)] += row[j] * xi;
        }
        return y;
    }

    Matrix multiply(const Matrix& other) const {
        if (cols != other.rows) throw ShapeError("matrix-matrix size mismatch");
        Matrix out(rows, other.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < other.cols; ++j) out(i, j) += aik * other(k, j);
            }
        return out;
    }

    double frobenius_sq() const {
        double acc = 0.0;
        for (double v : data) acc += v * v;
        return acc;
    }
};

// Solves the symmetric system G t = r through a Jacobi eigendecomposition,
// dropping eigenvalues below a relative tolerance. Returns the minimum-norm
// solution, which is what we want for rank-deficient normal equations.
std::vector<double> solve_symmetric_min_norm(const Matrix& gram, const std::vector<double>& rhs,
                                             double rel_tol = 1e-12);

} // namespace landscape
