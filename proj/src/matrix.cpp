#include "t3s2s/matrix.hpp"

#include <cmath>

#include "t3s2s/error.hpp"

namespace t3s2s {

bool Matrix::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw Error(ErrorKind::DimensionMismatch, "matmul: inner dimensions disagree");
    }
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* orow = out.row_ptr(i);
        for (int k = 0; k < a.cols; ++k) {
            double aik = arow[k];
            const double* brow = b.row_ptr(k);
            for (int j = 0; j < b.cols; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) {
        throw Error(ErrorKind::DimensionMismatch, "matmul_nt: inner dimensions disagree");
    }
    Matrix out(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* orow = out.row_ptr(i);
        for (int j = 0; j < b.rows; ++j) {
            orow[j] = dot(arow, b.row_ptr(j), a.cols);
        }
    }
    return out;
}

double dot(const double* a, const double* b, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double l2_norm(const double* v, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += v[i] * v[i];
    return std::sqrt(acc);
}

double l2_norm(const std::vector<double>& v) {
    return l2_norm(v.data(), static_cast<int>(v.size()));
}

}  // namespace t3s2s
