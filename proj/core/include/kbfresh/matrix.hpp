#pragma once
// Minimal row-major dense matrix. Sized for graphs of tens of nodes and
// feature dims in the hundreds; no BLAS, no views.

#include <cstddef>
#include <vector>

#include "kbfresh/error.hpp"

namespace kbfresh {

class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return Mat();
        Mat m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw InternalError("ragged row list");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

  private:
    void check_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw InternalError("shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw InternalError("matmul shape mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

// a^T * b without materializing the transpose.
inline Mat matmul_at_b(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw InternalError("matmul shape mismatch");
    Mat c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

// a * b^T without materializing the transpose.
inline Mat matmul_a_bt(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw InternalError("matmul shape mismatch");
    Mat c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(j, k);
            c(i, j) = sum;
        }
    }
    return c;
}

inline Mat relu(const Mat& m) {
    Mat out = m;
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
    return out;
}

// Elementwise grad * (act > 0); act is the pre-relu linear output, whose
// sign matches the relu output everywhere the gradient is nonzero.
inline Mat relu_backward(const Mat& grad, const Mat& act) {
    Mat out = grad;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        if (act.data()[i] <= 0.0) out.data()[i] = 0.0;
    }
    return out;
}

}  // namespace kbfresh
