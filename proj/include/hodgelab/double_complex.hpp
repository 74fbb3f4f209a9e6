#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodgelab/matrix.hpp"
#include "hodgelab/structure.hpp"

namespace hodgelab {

// Strictly increasing index subsets of {0..n-1} as bitmasks, enumerated in
// lexicographic order of the index sequences, grouped by size.
class SubsetTable {
public:
    explicit SubsetTable(int n);

    int n() const { return n_; }
    int count(int k) const; // C(n,k), 0 outside [0,n]
    const std::vector<uint32_t>& masks(int k) const { return masks_[k]; }
    int rank(uint32_t mask) const { return rank_[mask]; }

private:
    int n_;
    std::vector<std::vector<uint32_t>> masks_;
    std::vector<int> rank_;
};

// Shuffle sign merging two disjoint ascending index blocks into one ascending
// sequence: (-1)^{#inversions}.
int merge_sign(uint32_t a, uint32_t b);

// Basis monomial w^I ^ conj(w)^J.
struct Monomial {
    uint32_t I = 0, J = 0;
};

struct MonomialProduct {
    int sign = 0; // 0 when factors overlap
    Monomial m;
};

MonomialProduct wedge_monomials(const Monomial& a, const Monomial& b);

// Bigraded components K^{p,q} spanned by w^I ^ conj(w)^J with the two
// anticommuting differentials generated from a Lie-algebra model by the
// graded Leibniz rule. Everything exact; float consumers convert blocks.
class DoubleComplex {
public:
    explicit DoubleComplex(StructureEquations eq);

    int n() const { return eq_.n; }
    const StructureEquations& equations() const { return eq_; }
    const SubsetTable& subsets() const { return tab_; }

    int dim(int p, int q) const;

    int index_of(const Monomial& m, int q) const; // q fixes the J stride
    Monomial monomial_at(int p, int q, int idx) const;
    std::string basis_label(int p, int q, int idx) const;

    // K^{p,q} -> K^{p+1,q}; valid for 0 <= p,q <= n
    const MatQ& del_block(int p, int q) const;
    // K^{p,q} -> K^{p,q+1}
    const MatQ& dbar_block(int p, int q) const;

    // coefficient-vector wedge; zero vector when degrees overflow
    template <class S>
    Mat<S> wedge(int pa, int qa, const Mat<S>& a, int pb, int qb, const Mat<S>& b) const;

    // matrix of u -> g ^ u for fixed g in K^{a,b}, from K^{p,q} to K^{p+a,q+b}
    template <class S>
    Mat<S> wedge_matrix(int a, int b, const Mat<S>& g, int p, int q) const;

    // complex conjugation K^{p,q} -> K^{q,p}
    template <class S>
    Mat<S> conjugate_form(int p, int q, const Mat<S>& v) const;

private:
    StructureEquations eq_;
    SubsetTable tab_;
    std::vector<std::vector<MatQ>> del_, dbar_; // [p][q]

    void build_blocks();
    void validate();
};

inline DoubleComplex build_double_complex(StructureEquations eq) {
    return DoubleComplex(std::move(eq));
}

} // namespace hodgelab
