#pragma once

#include <memory>
#include <vector>

#include "hodgelab/metric.hpp"
#include "hodgelab/pages.hpp"

namespace hodgelab {

// Differentials, their Gram adjoints, the three Laplacians, harmonic bases,
// harmonic projectors, and the projected-Laplacian combinations on every
// K^{p,q}. All blocks are indexed [p][q] for 0 <= p,q <= n, with zero-row
// blocks where the target degree leaves the range. Float harmonic bases are
// Gram-orthonormal; exact ones are plain kernel bases. The package keeps its
// own copy of the metric; the complex must outlive the package.
template <typename S>
struct HodgePackage {
    const DoubleComplex* K = nullptr;
    std::shared_ptr<const HermitianMetric<S>> metric;

    std::vector<std::vector<Mat<S>>> del, dbar;         // (p,q) -> (p+1,q) / (p,q+1)
    std::vector<std::vector<Mat<S>>> del_adj, dbar_adj; // (p,q) -> (p-1,q) / (p,q-1)

    std::vector<std::vector<Mat<S>>> lap_del;  // del del* + del* del
    std::vector<std::vector<Mat<S>>> lap_dbar; // dbar dbar* + dbar* dbar
    std::vector<std::vector<Mat<S>>> lap_sum;  // lap_del + lap_dbar

    std::vector<std::vector<Mat<S>>> harm_del, harm_dbar;   // kernel bases
    std::vector<std::vector<Mat<S>>> proj_del, proj_dbar;   // projectors onto them
    std::vector<std::vector<Mat<S>>> proj_del_perp, proj_dbar_perp;

    // del proj_dbar del* + del* proj_dbar del, and the perp variant
    std::vector<std::vector<Mat<S>>> lap_del_hproj, lap_del_hproj_perp;
    // lap_del_hproj + lap_dbar; its kernel computes second-page classes
    std::vector<std::vector<Mat<S>>> lap_page2;
    std::vector<std::vector<Mat<S>>> harm_page2;

    int n() const { return K->n(); }
    int dim(int p, int q) const { return K->dim(p, q); }
    const GramForm<S>& gram(int p, int q) const { return metric->gram(p, q); }
};

using HodgeQ = HodgePackage<ExactC>;
using HodgeF = HodgePackage<FloatC>;

// Absolute eigenvalue cutoff separating harmonic directions, scaled by the
// operator norm.
double harmonic_threshold(double sigma_max);

// Kernel basis of a PSD operator block: exact kernel for the exact backend,
// thresholded Gram-orthonormal eigenvectors for the float backend.
template <typename S>
Mat<S> harmonic_basis(const Mat<S>& op, const GramForm<S>& G);

// Projector onto the span of basis columns, orthogonal w.r.t. G.
template <typename S>
Mat<S> span_projector(const Mat<S>& basis, const GramForm<S>& G);

template <typename S>
HodgePackage<S> build_hodge_package(const DoubleComplex& K, const HermitianMetric<S>& m);

// Evaluates del proj_dbar del* u + del* proj_dbar del u through the
// orthonormal harmonic frames of the neighbouring bidegrees instead of the
// assembled operator block. Float backend only.
template <typename S>
Mat<S> hproj_laplacian_via_frames(const HodgePackage<S>& pkg, int p, int q, const Mat<S>& u);

struct HodgeIsoRow {
    int p = 0, q = 0;
    int dim_harm = 0;    // kernel of lap_page2
    int dim_page2 = 0;   // engine dimension at r = 2
    double ortho_resid = 0.0;
};

struct HodgeIsoReport {
    std::vector<HodgeIsoRow> rows;
};

// Per bidegree: the harmonic space equals the four-condition kernel, the
// closed-cycle space splits orthogonally as harmonic + second-page
// boundaries, the harmonic dimension equals the engine's page-two dimension,
// and the three-space decomposition of K^{p,q} holds. Any failure throws.
template <typename S>
HodgeIsoReport hodge_iso_e2_check(const HodgePackage<S>& pkg);

struct MetricFlags {
    bool kahler = false;
    bool skt = false;             // del dbar omega = 0
    bool gauduchon = false;       // del dbar omega^{n-1} = 0
    bool super_skt = false;       // del omega in Im dbar
    bool sg = false;              // del omega^{n-1} in Im dbar
    bool harmonic_omega = false;        // lap_del_hproj kills omega
    bool harmonic_omega_power = false;  // lap_del_hproj kills omega^{n-1}
};

// Classifies the metric and cross-checks the subspace characterizations of
// the two harmonicity flags plus the equivalences that tie the flags
// together; a cross-check mismatch throws.
template <typename S>
MetricFlags metric_classify(const HodgePackage<S>& pkg);

} // namespace hodgelab
