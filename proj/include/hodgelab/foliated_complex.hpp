#pragma once

#include <vector>

#include "hodgelab/double_complex.hpp"

namespace hodgelab {

// The (•,0) column of a double complex regraded along a splitting of the
// coframe indices into two blocks N and F: E^{p,q} has basis w^S ^ w^T with
// S in N (|S| = p) and T in F (|T| = q), and the holomorphic differential
// splits as the sum of a (1,0) and a (0,1) part in the new grading.
class FoliatedComplex {
public:
    FoliatedComplex(const DoubleComplex& K, std::vector<int> N_idx, std::vector<int> F_idx);

    const DoubleComplex& complex() const { return *K_; }
    int r() const { return (int)N_.size(); }
    int f() const { return (int)F_.size(); }
    const std::vector<int>& N_indices() const { return N_; }
    const std::vector<int>& F_indices() const { return F_; }

    int dim(int p, int q) const; // C(r,p) * C(f,q), 0 out of range

    const MatQ& delN_block(int p, int q) const; // E^{p,q} -> E^{p+1,q}
    const MatQ& delF_block(int p, int q) const; // E^{p,q} -> E^{p,q+1}

    // Signed change of basis between E^{p,q} and the component of degree
    // p+q of the ambient (•,0) column.
    template <class S>
    Mat<S> embed(int p, int q, const Mat<S>& v) const;
    // Extract the E^{p,q} component of an ambient (p+q,0) vector.
    template <class S>
    Mat<S> component(int p, int q, const Mat<S>& ambient) const;

private:
    const DoubleComplex* K_;
    std::vector<int> N_, F_;
    uint32_t maskN_ = 0, maskF_ = 0;
    // lex-ordered subset masks within each block, and mask -> rank maps
    std::vector<std::vector<uint32_t>> subN_, subF_;
    std::vector<int> rankN_, rankF_;
    std::vector<std::vector<MatQ>> delN_, delF_; // [p][q]

    void check_integrability() const;
    void build();
};

FoliatedComplex foliated_split(const DoubleComplex& K, std::vector<int> N_idx,
                               std::vector<int> F_idx);

} // namespace hodgelab
