#pragma once

#include <vector>

#include "hodgelab/double_complex.hpp"
#include "hodgelab/linalg.hpp"

namespace hodgelab {

// Gaussian elimination with pivoting; zero for singular input.
template <typename S>
S determinant(Mat<S> M);

// Hermitian coframe metric extended multiplicatively to every K^{p,q}:
//   <w^I^conj(w)^J, w^K^conj(w)^L> = det(H[I,K]) * conj(det(H[J,L]))
// with H_{jk} = <w^j, w^k>. Carries the fundamental (1,1)-form, its wedge
// powers, the wedge-by-omega blocks, and their Gram adjoints.
template <typename S>
class HermitianMetric {
public:
    HermitianMetric(const DoubleComplex& K, Mat<S> H);

    const DoubleComplex& complex() const { return *K_; }
    int n() const { return K_->n(); }
    const Mat<S>& coframe_gram() const { return H_; }
    const GramForm<S>& gram(int p, int q) const;

    // coefficient vector of omega in K^{1,1}
    const Mat<S>& omega() const { return pow_[1]; }
    // plain k-fold wedge power, 0 <= k <= n, no factorial normalization
    const Mat<S>& omega_power(int k) const;

    // u -> omega ^ u, K^{p,q} -> K^{p+1,q+1}
    const Mat<S>& wedge_omega(int p, int q) const;
    // Gram adjoint of wedge_omega, K^{p,q} -> K^{p-1,q-1}
    const Mat<S>& contract_omega(int p, int q) const;

private:
    const DoubleComplex* K_;
    Mat<S> H_;
    std::vector<std::vector<GramForm<S>>> gram_;
    std::vector<Mat<S>> pow_;
    std::vector<std::vector<Mat<S>>> wedge_, contract_;

    void build_grams();
    void build_omega();
    void build_wedge_blocks();
    void check_conventions() const;
};

using MetricQ = HermitianMetric<ExactC>;
using MetricF = HermitianMetric<FloatC>;

template <typename S>
HermitianMetric<S> build_metric(const DoubleComplex& K, Mat<S> H) {
    return HermitianMetric<S>(K, std::move(H));
}

} // namespace hodgelab
