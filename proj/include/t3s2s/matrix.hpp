#pragma once

#include <cstddef>
#include <vector>

namespace t3s2s {

// Dense row-major double matrix. Small enough at desk scale that a plain
// vector beats pulling in a linear-algebra dependency, and keeps the
// floating-point evaluation order fully pinned.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    double* row_ptr(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const double* row_ptr(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    bool all_finite() const;
    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

// a (p x k) * b (k x q) -> p x q
Matrix matmul(const Matrix& a, const Matrix& b);

// a (p x k) * b^T where b is (q x k) -> p x q
Matrix matmul_nt(const Matrix& a, const Matrix& b);

double dot(const double* a, const double* b, int n);
double l2_norm(const double* v, int n);
double l2_norm(const std::vector<double>& v);

}  // namespace t3s2s
