#pragma once

#include <map>
#include <utility>
#include <vector>

#include "hodgelab/double_complex.hpp"
#include "hodgelab/foliated_complex.hpp"
#include "hodgelab/linalg.hpp"

namespace hodgelab {

// A bounded first-quadrant bicomplex handed over as raw differential blocks.
// horiz raises the first degree, vert the second. Blocks indexed [p][q] for
// 0 <= p <= pmax, 0 <= q <= qmax; blocks whose target lies outside have zero
// rows. The page engine works off this presentation alone, so the Frolicher
// and foliated complexes (and hand-built test complexes) share one code path.
template <typename S>
struct Bicomplex {
    int pmax = 0, qmax = 0;
    std::vector<std::vector<int>> dims;     // [p][q]
    std::vector<std::vector<Mat<S>>> horiz; // (p,q) -> (p+1,q)
    std::vector<std::vector<Mat<S>>> vert;  // (p,q) -> (p,q+1)

    int dim(int p, int q) const {
        if (p < 0 || p > pmax || q < 0 || q > qmax) return 0;
        return dims[p][q];
    }
};

using BicomplexQ = Bicomplex<ExactC>;
using BicomplexF = Bicomplex<FloatC>;

// horiz = del, vert = dbar
template <typename S>
Bicomplex<S> make_bicomplex(const DoubleComplex& K);

// horiz = delN, vert = delF
template <typename S>
Bicomplex<S> make_bicomplex(const FoliatedComplex& E);

template <typename S>
struct PageTable {
    int r = 1;
    std::map<std::pair<int, int>, int> dims; // (p,q) -> dim E_r^{p,q}
    // (cycles, boundaries) per bidegree; filled only on request
    std::map<std::pair<int, int>, std::pair<Subspace<S>, Subspace<S>>> representatives;
};

struct ConvergenceReport {
    int degeneration_index = 0;
    std::map<int, int> betti;                     // k -> b_k
    std::map<std::pair<int, int>, int> page_sums; // (r,k) -> sum over p+q=k
    // dims of every page computed on the way, r = 1 .. degeneration_index+1
    std::map<int, std::map<std::pair<int, int>, int>> page_dims;
};

// Cycle space Z_r^{p,q}: first-slot projection of the solutions of
//   vert a_0 = 0,  horiz a_{i-1} + vert a_i = 0   (i = 1..r-1)
// with slot i in degree (p+i, q-i) and out-of-range slots zero.
template <typename S>
Subspace<S> zigzag_space(const Bicomplex<S>& K, int p, int q, int r);

// Boundary space B_r^{p,q} = vert K^{p,q-1} + horiz * (last slot of the
// solution chains of length r-1 anchored at (p-r+1, q+r-2)).
template <typename S>
Subspace<S> boundary_space(const Bicomplex<S>& K, int p, int q, int r);

// All bidegrees of page r. Verifies boundaries sit inside cycles.
template <typename S>
PageTable<S> page_table(const Bicomplex<S>& K, int r, bool representatives = false);

// Betti numbers of the total complex with differential horiz + vert,
// indexed by total degree 0..pmax+qmax.
template <typename S>
std::vector<int> total_cohomology(const Bicomplex<S>& K);

// Least r whose page matches page r+1 in every bidegree and whose graded
// sums equal the total-complex betti numbers. Guaranteed to exist with
// r <= max(pmax, qmax) + 1; a miss past that bound is an engine bug and
// throws. Also enforces monotone page dims and the sum >= betti bound.
template <typename S>
ConvergenceReport degeneration_index(const Bicomplex<S>& K);

} // namespace hodgelab
