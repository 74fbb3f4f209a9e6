#pragma once

#include <memory>
#include <vector>

#include "hodgelab/foliated_complex.hpp"
#include "hodgelab/hodge.hpp"
#include "hodgelab/metric.hpp"
#include "hodgelab/pages.hpp"

namespace hodgelab {

// Constant Hermitian metric adapted to a coframe splitting: one positive
// definite block per index group, no cross terms. The assembled ambient
// coframe Gram is block diagonal, which makes the regraded summands of each
// total degree mutually orthogonal.
template <typename S>
struct ProductMetric {
    Mat<S> gN; // r x r block on the first index group
    Mat<S> gF; // f x f block on the second index group
};

using ProductMetricQ = ProductMetric<ExactC>;
using ProductMetricF = ProductMetric<FloatC>;

// Reads the two diagonal blocks out of an ambient coframe Gram. Any nonzero
// entry coupling the two index groups throws metric_error.
template <typename S>
ProductMetric<S> product_metric_from_ambient(const FoliatedComplex& E, const Mat<S>& H);

// Assembles the ambient n x n coframe Gram from the two blocks.
template <typename S>
Mat<S> assemble_product_metric(const FoliatedComplex& E, const ProductMetric<S>& m);

// Hodge-theoretic data of the regraded (•,0) column: the two graded pieces
// of the holomorphic differential, their Gram adjoints, the two Laplacians
// and the projected combinations, all indexed [p][q] for 0 <= p <= r,
// 0 <= q <= f. Every E^{p,q} carries the Gram pulled back from the ambient
// total-degree space, so the two differentials are adjoint to the restriction
// of the ambient adjoint. The grid Laplacian blocks of matching shift are
// cross-checked against the ambient column Laplacian at construction; the
// projectors and kernel identities are validated the same way. Blocks whose
// target bidegree leaves the grid have zero rows.
template <typename S>
struct FoliatedHodgePackage {
    const FoliatedComplex* E = nullptr;
    std::shared_ptr<const HermitianMetric<S>> ambient;
    Mat<S> gN, gF;

    std::vector<std::vector<GramForm<S>>> grams; // pulled back per bidegree

    std::vector<std::vector<Mat<S>>> delN, delF;         // (p,q) -> (p+1,q) / (p,q+1)
    std::vector<std::vector<Mat<S>>> delN_adj, delF_adj; // (p,q) -> (p-1,q) / (p,q-1)

    std::vector<std::vector<Mat<S>>> lapN, lapF; // the two grid Laplacians
    std::vector<std::vector<Mat<S>>> lap_sum;    // lapN + lapF

    // graded commutators of one differential with the other's adjoint
    std::vector<std::vector<Mat<S>>> cross_raise; // (p,q) -> (p+1,q-1)
    std::vector<std::vector<Mat<S>>> cross_lower; // (p,q) -> (p-1,q+1)

    std::vector<std::vector<Mat<S>>> harmN, harmF; // kernel bases
    std::vector<std::vector<Mat<S>>> projF, projF_perp;

    // delN projF delN_adj + delN_adj projF delN, and the page-two Laplacian
    // lapN_hproj + lapF together with its kernel basis
    std::vector<std::vector<Mat<S>>> lapN_hproj;
    std::vector<std::vector<Mat<S>>> lap_page2;
    std::vector<std::vector<Mat<S>>> harm_page2;

    // ambient column data, one block per total degree 0..n
    std::vector<Mat<S>> ambient_del, ambient_del_adj, ambient_lap;

    int r() const { return E->r(); }
    int f() const { return E->f(); }
    int dim(int p, int q) const { return E->dim(p, q); }
    const GramForm<S>& gram(int p, int q) const;
};

using FoliatedHodgeQ = FoliatedHodgePackage<ExactC>;
using FoliatedHodgeF = FoliatedHodgePackage<FloatC>;

template <typename S>
FoliatedHodgePackage<S> build_foliated_package(const FoliatedComplex& E,
                                               const ProductMetric<S>& m);

// Convenience overload: split an ambient Gram first (throws metric_error on
// cross-block entries), then build.
template <typename S>
FoliatedHodgePackage<S> build_foliated_package(const FoliatedComplex& E, const Mat<S>& H);

// Per-bidegree record of the kernel-sum condition ker lapN + ker lapF =
// E^{p,q}, together with the contraction data of projF on the orthogonal
// complement of ker lapN.
struct KernelSumRow {
    int p = 0, q = 0;
    int space_dim = 0;
    int sum_dim = 0;            // dim(ker lapN + ker lapF)
    bool holds = false;         // sum_dim == space_dim
    int perp_dim = 0;           // dim (ker lapN)^perp
    double sigma_min_sq = 1.0;  // least squared singular value of projF there
    int overlap_dim = 0;        // dim((ker lapN)^perp intersect (ker lapF)^perp)
};

struct KernelSumReport {
    std::vector<KernelSumRow> rows;
    bool holds_all = false;
    // one minus the worst projF contraction over all bidegrees with a
    // nontrivial complement; 0 when every complement is trivial
    double eps = 0.0;

    const KernelSumRow& at(int p, int q) const;
};

// Decides the kernel-sum condition at every bidegree and reports the global
// contraction constant. When the condition holds everywhere, the quadratic
// bound <lapN_hproj u, u> >= (1 - eps) <lapN u, u> is spot-checked on seeded
// random vectors and the complement-overlap criterion is required to agree;
// a disagreement throws theorem_violation.
KernelSumReport kernel_sum_hypothesis(const FoliatedHodgePackage<FloatC>& fp);

// Page tables of the regraded bicomplex (horiz = delN, vert = delF) for
// r = 1 .. degeneration_index + 1, plus the convergence report against the
// total-complex cohomology.
template <typename S>
struct NFPages {
    std::vector<PageTable<S>> pages;
    ConvergenceReport report;
};

template <typename S>
NFPages<S> nf_pages_and_degeneration(const FoliatedComplex& E);

struct NFHodgeIsoRow {
    int p = 0, q = 0;
    int dim_harm = 0;        // kernel of lap_page2
    int dim_page2 = 0;       // engine dimension at r = 2
    bool kernel_match = false; // cycle space equals harmonic + boundary sum
    bool decomp_spans = false; // three-space decomposition reassembles E^{p,q}
    double ortho_resid = 0.0;  // worst pairwise Gram inner product residual
};

struct NFHodgeIsoReport {
    bool applicable = false;       // kernel-sum holds everywhere and the
                                   // cross commutators vanish
    double anticommute_resid = 0.0;
    bool kernel_sum_holds = false;
    std::vector<NFHodgeIsoRow> rows;

    const NFHodgeIsoRow& at(int p, int q) const;
};

// Per bidegree: the kernel of projF . delN intersected with ker delF splits
// orthogonally as the page-two harmonic space plus boundaries, the harmonic
// dimension matches the engine page-two dimension, and the three-space
// decomposition of E^{p,q} holds with its orthogonality relations. The
// checks run on every metric; they only throw theorem_violation when both
// hypotheses are satisfied, otherwise the report is marked not applicable.
NFHodgeIsoReport nf_hodge_iso_check(const FoliatedHodgePackage<FloatC>& fp);

struct NFChainReport {
    double anticommute_resid = 0.0;  // [delN, delF_adj] and its adjoint pair
    double lap_commute_resid = 0.0;  // [delN, lapF]
    double proj_commute_resid = 0.0; // [delN, projF]
    double inclusion_resid = 0.0;    // lapN on the kernel of lap_page2
    bool antecedent = false;
    bool commutes = false;
    bool inclusion = false;
    bool kernel_sum_holds = false;
    bool kernels_coincide = false;   // ker lap_page2 == ker lap_sum everywhere
};

// Follows the implication chain: vanishing of [delN, delF_adj] forces delN
// to commute with lapF and projF, which in turn forces ker lap_page2 into
// ker lapN. Independently, the kernel-sum condition alone forces ker
// lap_page2 to coincide with ker lap_sum. A broken link throws
// theorem_violation.
NFChainReport nf_implication_chain_check(const FoliatedHodgePackage<FloatC>& fp);

} // namespace hodgelab
