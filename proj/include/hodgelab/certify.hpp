#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hodgelab/hodge.hpp"

namespace hodgelab {

// Order-zero operators built from the derivatives of the metric form. Every
// grid is indexed by the source bidegree; a block maps K^{p,q} to the shifted
// bidegree and has zero rows when the target falls off the grid.
template <typename S>
struct TorsionPackage {
    const HodgePackage<S>* pkg = nullptr;

    // wedge with del(omega): (p,q) -> (p+2,q+1), and with dbar(omega):
    // (p,q) -> (p+1,q+2); adjoints go the other way
    std::vector<std::vector<Mat<S>>> wdel, wdbar;
    std::vector<std::vector<Mat<S>>> wdel_adj, wdbar_adj;

    // torsion operator: graded bracket of the omega-contraction with the
    // wedge above, bidegree (1,0); its conjugate has bidegree (0,1)
    std::vector<std::vector<Mat<S>>> tau, tau_adj;
    std::vector<std::vector<Mat<S>>> taubar, taubar_adj;

    // square order-zero blocks per bidegree
    std::vector<std::vector<Mat<S>>> sbar_omega; // [wdbar, wdbar*], Gram-PSD
    std::vector<std::vector<Mat<S>>> z_omega;    // [tau,tau*] + [wdel,wdel*], Gram-PSD
    std::vector<std::vector<Mat<S>>> rbar_omega; // [taubar,taubar*] - sbar_omega
    // defect between the dbar-Laplacian and the torsion-twisted del-Laplacian,
    // self-adjoint; tbar_omega is its conjugate partner
    std::vector<std::vector<Mat<S>>> t_omega, tbar_omega;
};

using TorsionQ = TorsionPackage<ExactC>;
using TorsionF = TorsionPackage<FloatC>;

// Materializes every torsion block and verifies self-adjointness of the
// square operators plus positivity of sbar_omega and z_omega.
template <typename S>
TorsionPackage<S> torsion_operators(const HodgePackage<S>& pkg);

struct IdentityRow {
    std::string id;
    double residual = 0.0; // max over bidegrees (and trials where sampled)
    bool holds = true;
};

struct IdentityReport {
    std::vector<IdentityRow> rows;
    const IdentityRow& at(const std::string& id) const;
};

// Commutation-relation suite at the model level. Operator identities compare
// whole blocks; the quadratic-form rows sample `trials` random vectors per
// bidegree. Exact backend: any nonzero residual throws.
template <typename S>
IdentityReport identity_suite(const TorsionPackage<S>& tp, int trials, std::uint64_t seed);

struct GapAndBound {
    double rho = 0.0;     // least positive eigenvalue of lap_sum, +inf if none
    double cbound = 0.0;  // largest eigenvalue of z_omega
    double lambda0 = 0.0; // least positive eigenvalue of lap_del, +inf if none
    double mu0 = 0.0;     // least positive eigenvalue of lap_dbar, +inf if none
};

GapAndBound gap_and_bound(const TorsionF& tp, int p, int q);

struct CertificateReport {
    std::string name;
    bool applicable = false;
    // named hypothesis scalars; boolean hypotheses stored as 0/1
    std::map<std::string, double> hypothesis_values;
    bool verdict = false;
    int cross_check = 0; // independently computed degeneration index
};

// Sufficient conditions for the second page to carry the limit. A fired
// certificate cross-checked against an engine index above 2 throws.
std::vector<CertificateReport> certify_e2(const TorsionF& tp);

// Sufficient conditions for the first page to carry the limit; soundness
// threshold is an index above 1.
std::vector<CertificateReport> certify_e1(const TorsionF& tp);

struct SharpGapRow {
    int p = 0, q = 0;
    double lambda0 = 0.0;  // least positive eigenvalue of lap_del
    double rbar_sup = 0.0; // largest eigenvalue of rbar_omega
    bool hypothesis = false;
    int dim_perp = 0;    // complement of ker lap_del
    int overlap_dim = 0; // ker lap_dbar meeting that complement
    bool lower_bound = false;     // squared-norm bound with eps1 < 1
    bool injective = false;       // restricted projector has full rank
    bool trivial_overlap = false; // the overlap above is zero
    double eps1 = 0.0;
};

struct SharpGapReport {
    bool applicable = false; // the quantitative layer needs del dbar omega = 0
    std::vector<SharpGapRow> rows;
    bool hypothesis_all = false;
    double eps1 = 0.0;      // worst row with a valid hypothesis
    bool domination = false; // lap_del_hproj_perp >= (1-eps1) lap_del
};

// Per-bidegree comparison of the del-spectral gap against the conjugate
// torsion bound. The three restricted-projector statements are evaluated by
// independent routes and must agree; under the gap hypothesis they must all
// hold and the Laplacian domination must follow.
SharpGapReport sharp_gap_analysis(const TorsionF& tp);

} // namespace hodgelab
