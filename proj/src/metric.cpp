#include "hodgelab/metric.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <utility>

#include "hodgelab/error.hpp"
#include "hodgelab/lapack_bridge.hpp"

namespace hodgelab {

template <typename S>
S determinant(Mat<S> M) {
    if (M.rows() != M.cols()) throw dim_error("determinant of a non-square matrix");
    const int n = M.rows();
    S det = scalar_traits<S>::one();
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        if constexpr (scalar_traits<S>::exact) {
            for (int r = c; r < n; ++r)
                if (!scalar_is_zero(M(r, c))) {
                    piv = r;
                    break;
                }
        } else {
            double best = 0.0;
            for (int r = c; r < n; ++r) {
                double a = std::abs(M(r, c));
                if (a > best) {
                    best = a;
                    piv = r;
                }
            }
        }
        if (piv < 0 || scalar_is_zero(M(piv, c))) return scalar_traits<S>::zero();
        if (piv != c) {
            for (int j = c; j < n; ++j) std::swap(M(c, j), M(piv, j));
            det = S(0) - det;
        }
        det = det * M(c, c);
        for (int r = c + 1; r < n; ++r) {
            S f = M(r, c) / M(c, c);
            for (int j = c; j < n; ++j) M(r, j) = M(r, j) - f * M(c, j);
        }
    }
    return det;
}

namespace {

std::vector<int> mask_bits(uint32_t mask) {
    std::vector<int> out;
    while (mask) {
        out.push_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return out;
}

template <typename S>
Mat<S> submatrix(const Mat<S>& H, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat<S> out((int)rows.size(), (int)cols.size());
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out(i, j) = H(rows[i], cols[j]);
    return out;
}

} // namespace

template <typename S>
HermitianMetric<S>::HermitianMetric(const DoubleComplex& K, Mat<S> H) : K_(&K), H_(std::move(H)) {
    if (H_.rows() != K.n() || H_.cols() != K.n())
        throw dim_error("coframe metric must match the coframe dimension");
    build_grams();
    build_omega();
    build_wedge_blocks();
    check_conventions();
}

template <typename S>
const GramForm<S>& HermitianMetric<S>::gram(int p, int q) const {
    if (p < 0 || p > n() || q < 0 || q > n()) throw dim_error("gram out of range");
    return gram_[p][q];
}

template <typename S>
const Mat<S>& HermitianMetric<S>::omega_power(int k) const {
    if (k < 0 || k > n()) throw dim_error("omega power out of range");
    return pow_[k];
}

template <typename S>
const Mat<S>& HermitianMetric<S>::wedge_omega(int p, int q) const {
    if (p < 0 || p > n() || q < 0 || q > n()) throw dim_error("wedge_omega out of range");
    return wedge_[p][q];
}

template <typename S>
const Mat<S>& HermitianMetric<S>::contract_omega(int p, int q) const {
    if (p < 0 || p > n() || q < 0 || q > n()) throw dim_error("contract_omega out of range");
    return contract_[p][q];
}

template <typename S>
void HermitianMetric<S>::build_grams() {
    const SubsetTable& tab = K_->subsets();
    const int nn = n();

    // dets[k](i,j) = det of H restricted to the i-th and j-th k-subsets
    std::vector<Mat<S>> dets;
    for (int k = 0; k <= nn; ++k) {
        const auto& masks = tab.masks(k);
        Mat<S> D((int)masks.size(), (int)masks.size());
        for (int i = 0; i < D.rows(); ++i) {
            auto ri = mask_bits(masks[i]);
            for (int j = 0; j < D.cols(); ++j)
                D(i, j) = determinant(submatrix(H_, ri, mask_bits(masks[j])));
        }
        dets.push_back(std::move(D));
    }

    gram_.reserve(nn + 1);
    for (int p = 0; p <= nn; ++p) {
        std::vector<GramForm<S>> row;
        row.reserve(nn + 1);
        for (int q = 0; q <= nn; ++q) {
            const int d = K_->dim(p, q);
            Mat<S> G(d, d);
            for (int a = 0; a < d; ++a) {
                Monomial ma = K_->monomial_at(p, q, a);
                for (int b = 0; b < d; ++b) {
                    Monomial mb = K_->monomial_at(p, q, b);
                    G(a, b) = dets[p](tab.rank(mb.I), tab.rank(ma.I)) *
                              scalar_conj(dets[q](tab.rank(mb.J), tab.rank(ma.J)));
                }
            }
            row.push_back(GramForm<S>(std::move(G)));
        }
        gram_.push_back(std::move(row));
    }
}

template <typename S>
void HermitianMetric<S>::build_omega() {
    const int nn = n();
    Mat<S> W(nn, nn);
    if constexpr (scalar_traits<S>::exact) {
        Mat<S> inv = exact_inverse(H_);
        for (int j = 0; j < nn; ++j)
            for (int k = 0; k < nn; ++k) W(j, k) = scalar_conj(inv(j, k));
    } else {
        Eigen::MatrixXcd inv =
            lapackb::lu_solve(to_eigen(H_), Eigen::MatrixXcd::Identity(nn, nn));
        for (int j = 0; j < nn; ++j)
            for (int k = 0; k < nn; ++k) W(j, k) = std::conj(inv(j, k));
    }

    Mat<S> omega(K_->dim(1, 1), 1);
    for (int j = 0; j < nn; ++j)
        for (int k = 0; k < nn; ++k) {
            int idx = K_->index_of(Monomial{1u << j, 1u << k}, 1);
            omega(idx, 0) = scalar_traits<S>::imag_unit() * W(j, k);
        }

    pow_.clear();
    Mat<S> one(1, 1);
    one(0, 0) = scalar_traits<S>::one();
    pow_.push_back(std::move(one));
    pow_.push_back(std::move(omega));
    for (int k = 2; k <= nn; ++k)
        pow_.push_back(K_->wedge(1, 1, pow_[1], k - 1, k - 1, pow_[k - 1]));
}

template <typename S>
void HermitianMetric<S>::build_wedge_blocks() {
    const int nn = n();
    wedge_.assign(nn + 1, {});
    contract_.assign(nn + 1, {});
    for (int p = 0; p <= nn; ++p)
        for (int q = 0; q <= nn; ++q)
            wedge_[p].push_back(K_->wedge_matrix(1, 1, pow_[1], p, q));
    for (int p = 0; p <= nn; ++p) {
        for (int q = 0; q <= nn; ++q) {
            if (p >= 1 && q >= 1)
                contract_[p].push_back(
                    gram_adjoint(wedge_[p - 1][q - 1], gram_[p - 1][q - 1], gram_[p][q]));
            else
                contract_[p].push_back(Mat<S>(0, K_->dim(p, q)));
        }
    }
}

template <typename S>
void HermitianMetric<S>::check_conventions() const {
    const int nn = n();

    Mat<S> trace = contract_[1][1] * pow_[1];
    bool trace_ok;
    if constexpr (scalar_traits<S>::exact) {
        trace_ok = trace(0, 0) == S(nn);
    } else {
        trace_ok = std::abs(trace(0, 0) - S((double)nn)) <= 1e-12 * (1.0 + nn);
    }
    if (!trace_ok) throw theorem_violation("contraction of omega did not equal the dimension");

    for (int p = 0; p <= nn; ++p) {
        for (int q = 0; q <= nn; ++q) {
            const int d = K_->dim(p, q);
            Mat<S> C(d, d);
            if (p >= 1 && q >= 1) C = C + wedge_[p - 1][q - 1] * contract_[p][q];
            if (p < nn && q < nn) C = C - contract_[p + 1][q + 1] * wedge_[p][q];
            S c = S(p + q - nn);
            for (int i = 0; i < d; ++i) C(i, i) = C(i, i) - c;
            if constexpr (scalar_traits<S>::exact) {
                if (!C.is_zero())
                    throw theorem_violation("wedge/contraction commutator convention broken");
            } else {
                if (max_abs(C) > 1e-12 * (1.0 + std::abs(c) + (double)nn))
                    throw theorem_violation("wedge/contraction commutator convention broken");
            }
        }
    }
}

template class HermitianMetric<ExactC>;
template class HermitianMetric<FloatC>;
template ExactC determinant<ExactC>(MatQ);
template FloatC determinant<FloatC>(MatF);

} // namespace hodgelab
