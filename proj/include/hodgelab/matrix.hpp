#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "hodgelab/scalar.hpp"

namespace hodgelab {

// Dense row-major matrix over ExactC or FloatC.
template <class S>
class Mat {
    int rows_ = 0, cols_ = 0;
    std::vector<S> a_;

public:
    Mat() = default;
    Mat(int r, int c) : rows_(r), cols_(c), a_((size_t)r * c, scalar_traits<S>::zero()) {
        if (r < 0 || c < 0) throw dim_error("negative matrix dimension");
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = scalar_traits<S>::one();
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    S& operator()(int i, int j) { return a_[(size_t)i * cols_ + j]; }
    const S& operator()(int i, int j) const { return a_[(size_t)i * cols_ + j]; }

    S* data() { return a_.data(); }
    const S* data() const { return a_.data(); }

    Mat& operator+=(const Mat& o) {
        require_same_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        require_same_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Mat& operator*=(const S& c) {
        for (auto& v : a_) v = v * c;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, const S& c) { return a *= c; }
    friend Mat operator*(const S& c, Mat a) { return a *= c; }
    friend Mat operator-(const Mat& a) {
        Mat r(a.rows_, a.cols_);
        for (size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = -a.a_[k];
        return r;
    }

    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw dim_error("matrix product shape mismatch");
        Mat c(a.rows_, b.cols_);
        if constexpr (scalar_traits<S>::exact) {
            for (int i = 0; i < a.rows_; ++i)
                for (int k = 0; k < a.cols_; ++k) {
                    const S& aik = a(i, k);
                    if (aik.is_zero()) continue;
                    for (int j = 0; j < b.cols_; ++j) {
                        const S& bkj = b(k, j);
                        if (bkj.is_zero()) continue;
                        c(i, j) += aik * bkj;
                    }
                }
        } else {
            using ERow = Eigen::Matrix<FloatC, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
            Eigen::Map<const ERow> ma(a.data(), a.rows_, a.cols_);
            Eigen::Map<const ERow> mb(b.data(), b.rows_, b.cols_);
            Eigen::Map<ERow> mc(c.data(), c.rows_, c.cols_);
            mc.noalias() = ma * mb;
        }
        return c;
    }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

    Mat transpose() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Mat conjugate() const {
        Mat r(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(i, j) = scalar_conj((*this)(i, j));
        return r;
    }
    // Conjugate transpose.
    Mat hconj() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = scalar_conj((*this)(i, j));
        return r;
    }

    bool is_zero() const {
        for (const auto& v : a_)
            if (!scalar_is_zero(v)) return false;
        return true;
    }

    Mat col(int j) const { return cols_subset({j}); }

    Mat cols_subset(const std::vector<int>& idx) const {
        Mat r(rows_, (int)idx.size());
        for (int i = 0; i < rows_; ++i)
            for (size_t k = 0; k < idx.size(); ++k) r(i, (int)k) = (*this)(i, idx[k]);
        return r;
    }

    static Mat hstack(const std::vector<Mat>& parts) {
        int r = -1, c = 0;
        for (const auto& p : parts) {
            if (p.cols_ == 0) continue;
            if (r < 0) r = p.rows_;
            else if (p.rows_ != r) throw dim_error("hstack row mismatch");
            c += p.cols_;
        }
        if (r < 0) r = parts.empty() ? 0 : parts.front().rows_;
        Mat out(r, c);
        int off = 0;
        for (const auto& p : parts) {
            if (p.cols_ == 0) continue;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < p.cols_; ++j) out(i, off + j) = p(i, j);
            off += p.cols_;
        }
        return out;
    }

    static Mat vstack(const std::vector<Mat>& parts) {
        int c = -1, r = 0;
        for (const auto& p : parts) {
            if (p.rows_ == 0) continue;
            if (c < 0) c = p.cols_;
            else if (p.cols_ != c) throw dim_error("vstack column mismatch");
            r += p.rows_;
        }
        if (c < 0) c = parts.empty() ? 0 : parts.front().cols_;
        Mat out(r, c);
        int off = 0;
        for (const auto& p : parts) {
            if (p.rows_ == 0) continue;
            for (int i = 0; i < p.rows_; ++i)
                for (int j = 0; j < c; ++j) out(off + i, j) = p(i, j);
            off += p.rows_;
        }
        return out;
    }

private:
    void require_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw dim_error("matrix shape mismatch");
    }
};

using MatQ = Mat<ExactC>;
using MatF = Mat<FloatC>;

MatF to_float(const MatQ& m);
double max_abs(const MatF& m);
double fro_norm(const MatF& m);
void check_finite(const MatF& m);

// Column-major Eigen bridge used by the LAPACK-backed kernels.
Eigen::MatrixXcd to_eigen(const MatF& m);
MatF from_eigen(const Eigen::MatrixXcd& e);

} // namespace hodgelab
