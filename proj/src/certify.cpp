#include "hodgelab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "hodgelab/lapack_bridge.hpp"
#include "hodgelab/pages.hpp"
#include "hodgelab/rng.hpp"

namespace hodgelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Padding around the [0,n] grid so that composed operators can look up
// shifted blocks without range bookkeeping. Off-grid blocks have at least
// one zero dimension and cost nothing; 8 covers every shift that occurs
// (the largest single factor moves a bidegree by 2).
constexpr int kPad = 8;

// Operator of fixed bidegree shift (dp,dq) stored as one block per source
// bidegree. The block at (p,q) maps K^{p,q} to K^{p+dp,q+dq}.
template <typename S>
struct Op {
    const HodgePackage<S>* pkg = nullptr;
    int dp = 0, dq = 0;
    std::vector<std::vector<Mat<S>>> blocks;

    int n() const { return pkg->n(); }
    int parity() const { return ((dp + dq) % 2 + 2) % 2; }

    bool stored(int p, int q) const {
        return p >= -kPad && p <= n() + kPad && q >= -kPad && q <= n() + kPad;
    }
    const Mat<S>& at(int p, int q) const {
        if (!stored(p, q)) throw dim_error("operator block outside padded range");
        return blocks[p + kPad][q + kPad];
    }
    Mat<S>& slot(int p, int q) {
        if (!stored(p, q)) throw dim_error("operator block outside padded range");
        return blocks[p + kPad][q + kPad];
    }
};

template <typename S>
Op<S> zero_op(const HodgePackage<S>& pkg, int dp, int dq) {
    Op<S> op;
    op.pkg = &pkg;
    op.dp = dp;
    op.dq = dq;
    int side = pkg.n() + 2 * kPad + 1;
    op.blocks.resize(side);
    for (int pi = 0; pi < side; ++pi) {
        int p = pi - kPad;
        op.blocks[pi].reserve(side);
        for (int qi = 0; qi < side; ++qi) {
            int q = qi - kPad;
            op.blocks[pi].emplace_back(pkg.dim(p + dp, q + dq), pkg.dim(p, q));
        }
    }
    return op;
}

template <typename S>
Op<S> grid_op(const HodgePackage<S>& pkg, const std::vector<std::vector<Mat<S>>>& grid,
              int dp, int dq) {
    Op<S> op = zero_op(pkg, dp, dq);
    for (int p = 0; p <= pkg.n(); ++p)
        for (int q = 0; q <= pkg.n(); ++q) op.slot(p, q) = grid[p][q];
    return op;
}

template <typename S>
Op<S> lefschetz_op(const HodgePackage<S>& pkg) {
    Op<S> op = zero_op(pkg, 1, 1);
    for (int p = 0; p <= pkg.n(); ++p)
        for (int q = 0; q <= pkg.n(); ++q) op.slot(p, q) = pkg.metric->wedge_omega(p, q);
    return op;
}

template <typename S>
Op<S> contraction_op(const HodgePackage<S>& pkg) {
    Op<S> op = zero_op(pkg, -1, -1);
    for (int p = 0; p <= pkg.n(); ++p)
        for (int q = 0; q <= pkg.n(); ++q) op.slot(p, q) = pkg.metric->contract_omega(p, q);
    return op;
}

template <typename S>
Op<S> wedge_form_op(const HodgePackage<S>& pkg, int a, int b, const Mat<S>& g) {
    Op<S> op = zero_op(pkg, a, b);
    for (int p = 0; p <= pkg.n(); ++p)
        for (int q = 0; q <= pkg.n(); ++q) op.slot(p, q) = pkg.K->wedge_matrix(a, b, g, p, q);
    return op;
}

template <typename S>
Op<S> add(Op<S> A, const Op<S>& B) {
    if (A.dp != B.dp || A.dq != B.dq) throw dim_error("operator shift mismatch in sum");
    int n = A.n();
    for (int p = -kPad; p <= n + kPad; ++p)
        for (int q = -kPad; q <= n + kPad; ++q) A.slot(p, q) += B.at(p, q);
    return A;
}

template <typename S>
Op<S> sub(Op<S> A, const Op<S>& B) {
    if (A.dp != B.dp || A.dq != B.dq) throw dim_error("operator shift mismatch in difference");
    int n = A.n();
    for (int p = -kPad; p <= n + kPad; ++p)
        for (int q = -kPad; q <= n + kPad; ++q) A.slot(p, q) -= B.at(p, q);
    return A;
}

template <typename S>
Op<S> scale(const S& c, Op<S> A) {
    int n = A.n();
    for (int p = -kPad; p <= n + kPad; ++p)
        for (int q = -kPad; q <= n + kPad; ++q) A.slot(p, q) *= c;
    return A;
}

template <typename S>
Op<S> compose(const Op<S>& A, const Op<S>& B) {
    Op<S> out = zero_op(*A.pkg, A.dp + B.dp, A.dq + B.dq);
    int n = out.n();
    for (int p = -kPad; p <= n + kPad; ++p)
        for (int q = -kPad; q <= n + kPad; ++q) {
            Mat<S>& dst = out.slot(p, q);
            if (dst.empty()) continue;
            // a block of nonzero size has both endpoints inside [0,n]^2, so
            // the intermediate bidegree stays within the padded store
            dst = A.at(p + B.dp, q + B.dq) * B.at(p, q);
        }
    return out;
}

template <typename S>
Op<S> adjoint(const Op<S>& A) {
    const HodgePackage<S>& pkg = *A.pkg;
    Op<S> out = zero_op(pkg, -A.dp, -A.dq);
    int n = out.n();
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            int sp = p - A.dp, sq = q - A.dq;
            if (sp < 0 || sp > n || sq < 0 || sq > n) continue;
            out.slot(p, q) = gram_adjoint(A.at(sp, sq), pkg.gram(sp, sq), pkg.gram(p, q));
        }
    return out;
}

// Graded bracket: anticommutator exactly when both shifts have odd total
// degree, commutator otherwise.
template <typename S>
Op<S> bracket(const Op<S>& A, const Op<S>& B) {
    Op<S> AB = compose(A, B);
    Op<S> BA = compose(B, A);
    if ((A.parity() & B.parity()) != 0) return add(std::move(AB), BA);
    return sub(std::move(AB), BA);
}

template <typename S>
std::vector<std::vector<Mat<S>>> unpad(const Op<S>& op) {
    int n = op.n();
    std::vector<std::vector<Mat<S>>> grid(n + 1);
    for (int p = 0; p <= n; ++p) {
        grid[p].reserve(n + 1);
        for (int q = 0; q <= n; ++q) grid[p].push_back(op.at(p, q));
    }
    return grid;
}

double op_scale(const Op<FloatC>& A) {
    double s = 0.0;
    for (int p = 0; p <= A.n(); ++p)
        for (int q = 0; q <= A.n(); ++q) s = std::max(s, max_abs(A.at(p, q)));
    return s;
}

// Exact backend: 0.0 when every block agrees, 1.0 otherwise. Float backend:
// worst entrywise deviation relative to the joint operator scale.
template <typename S>
double op_residual(const Op<S>& A, const Op<S>& B) {
    if (A.dp != B.dp || A.dq != B.dq) throw dim_error("operator shift mismatch in residual");
    int n = A.n();
    if constexpr (scalar_traits<S>::exact) {
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q)
                if (!(A.at(p, q) == B.at(p, q))) return 1.0;
        return 0.0;
    } else {
        double s = 1.0 + std::max(op_scale(A), op_scale(B));
        double worst = 0.0;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) worst = std::max(worst, max_abs(A.at(p, q) - B.at(p, q)));
        return worst / s;
    }
}

template <typename S>
S int_scalar(int k) {
    if constexpr (scalar_traits<S>::exact) return ExactC((long)k);
    else return FloatC((double)k, 0.0);
}

bool negligible(const MatF& M, double scale) { return max_abs(M) <= 1e-9 * (1.0 + scale); }

template <typename S>
void require_self_adjoint(const HodgePackage<S>& pkg, const Op<S>& X, const char* name) {
    for (int p = 0; p <= pkg.n(); ++p)
        for (int q = 0; q <= pkg.n(); ++q) {
            const Mat<S>& B = X.at(p, q);
            if (B.rows() == 0) continue;
            Mat<S> Badj = gram_adjoint(B, pkg.gram(p, q), pkg.gram(p, q));
            if constexpr (scalar_traits<S>::exact) {
                if (!(B == Badj))
                    throw theorem_violation(std::string(name) + " is not self-adjoint");
            } else {
                if (max_abs(B - Badj) > 1e-10 * (1.0 + max_abs(B)))
                    throw theorem_violation(std::string(name) + " is not self-adjoint");
            }
        }
}

void require_psd(const HodgePackage<FloatC>& pkg, const Op<FloatC>& X, const char* name) {
    for (int p = 0; p <= pkg.n(); ++p)
        for (int q = 0; q <= pkg.n(); ++q) {
            const MatF& B = X.at(p, q);
            if (B.rows() == 0) continue;
            auto vals = hermitian_eigvals(B, pkg.gram(p, q));
            double hi = std::max(std::abs(vals.front()), std::abs(vals.back()));
            if (vals.front() < -1e-10 * (1.0 + hi))
                throw theorem_violation(std::string(name) + " has a negative eigenvalue");
        }
}

// The operators the identity suite needs, rebuilt from a torsion package.
template <typename S>
struct OpSet {
    Op<S> del, dbar, del_adj, dbar_adj;
    Op<S> L, Lam;
    Op<S> wdel, wdbar, wdel_adj, wdbar_adj;
    Op<S> tau, tau_adj, taubar, taubar_adj;
    Op<S> sbar, z, rbar, t, tbar;
    Op<S> lap_del, lap_dbar;
};

template <typename S>
OpSet<S> wrap_ops(const TorsionPackage<S>& tp) {
    const HodgePackage<S>& pkg = *tp.pkg;
    OpSet<S> o{
        grid_op(pkg, pkg.del, 1, 0),        grid_op(pkg, pkg.dbar, 0, 1),
        grid_op(pkg, pkg.del_adj, -1, 0),   grid_op(pkg, pkg.dbar_adj, 0, -1),
        lefschetz_op(pkg),                  contraction_op(pkg),
        grid_op(pkg, tp.wdel, 2, 1),        grid_op(pkg, tp.wdbar, 1, 2),
        grid_op(pkg, tp.wdel_adj, -2, -1),  grid_op(pkg, tp.wdbar_adj, -1, -2),
        grid_op(pkg, tp.tau, 1, 0),         grid_op(pkg, tp.tau_adj, -1, 0),
        grid_op(pkg, tp.taubar, 0, 1),      grid_op(pkg, tp.taubar_adj, 0, -1),
        grid_op(pkg, tp.sbar_omega, 0, 0),  grid_op(pkg, tp.z_omega, 0, 0),
        grid_op(pkg, tp.rbar_omega, 0, 0),  grid_op(pkg, tp.t_omega, 0, 0),
        grid_op(pkg, tp.tbar_omega, 0, 0),  grid_op(pkg, pkg.lap_del, 0, 0),
        grid_op(pkg, pkg.lap_dbar, 0, 0)};
    return o;
}

} // namespace

template <typename S>
TorsionPackage<S> torsion_operators(const HodgePackage<S>& pkg) {
    const HermitianMetric<S>& m = *pkg.metric;

    Op<S> del = grid_op(pkg, pkg.del, 1, 0);
    Op<S> dbar = grid_op(pkg, pkg.dbar, 0, 1);

    // derivatives of the metric form and the order-zero wedge operators
    Mat<S> domega = del.at(1, 1) * m.omega();
    Mat<S> dbomega = dbar.at(1, 1) * m.omega();
    S two = scalar_traits<S>::one() + scalar_traits<S>::one();
    Mat<S> chi = (del.at(1, 2) * dbomega) * (scalar_traits<S>::imag_unit() / two);

    Op<S> L = lefschetz_op(pkg);
    Op<S> Lam = contraction_op(pkg);
    Op<S> wdel = wedge_form_op(pkg, 2, 1, domega);
    Op<S> wdbar = wedge_form_op(pkg, 1, 2, dbomega);
    Op<S> wchi = wedge_form_op(pkg, 2, 2, chi);
    Op<S> wdel_adj = adjoint(wdel);
    Op<S> wdbar_adj = adjoint(wdbar);

    Op<S> tau = bracket(Lam, wdel);
    Op<S> taubar = bracket(Lam, wdbar);
    Op<S> tau_adj = adjoint(tau);
    Op<S> taubar_adj = adjoint(taubar);

    Op<S> sbar = bracket(wdbar, wdbar_adj);
    Op<S> z = add(bracket(tau, tau_adj), bracket(wdel, wdel_adj));
    Op<S> rbar = sub(bracket(taubar, taubar_adj), sbar);
    Op<S> lamlam_chi = bracket(Lam, bracket(Lam, wchi));
    Op<S> t = sub(lamlam_chi, bracket(wdel, wdel_adj));
    Op<S> tbar = sub(lamlam_chi, sbar);

    require_self_adjoint(pkg, sbar, "sbar_omega");
    require_self_adjoint(pkg, z, "z_omega");
    require_self_adjoint(pkg, rbar, "rbar_omega");
    require_self_adjoint(pkg, t, "t_omega");
    require_self_adjoint(pkg, tbar, "tbar_omega");
    if constexpr (!scalar_traits<S>::exact) {
        require_psd(pkg, sbar, "sbar_omega");
        require_psd(pkg, z, "z_omega");
    }

    TorsionPackage<S> tp;
    tp.pkg = &pkg;
    tp.wdel = unpad(wdel);
    tp.wdbar = unpad(wdbar);
    tp.wdel_adj = unpad(wdel_adj);
    tp.wdbar_adj = unpad(wdbar_adj);
    tp.tau = unpad(tau);
    tp.tau_adj = unpad(tau_adj);
    tp.taubar = unpad(taubar);
    tp.taubar_adj = unpad(taubar_adj);
    tp.sbar_omega = unpad(sbar);
    tp.z_omega = unpad(z);
    tp.rbar_omega = unpad(rbar);
    tp.t_omega = unpad(t);
    tp.tbar_omega = unpad(tbar);
    return tp;
}

const IdentityRow& IdentityReport::at(const std::string& id) const {
    for (const auto& r : rows)
        if (r.id == id) return r;
    throw precondition_error("unknown identity id: " + id);
}

template <typename S>
IdentityReport identity_suite(const TorsionPackage<S>& tp, int trials, std::uint64_t seed) {
    if (trials < 1) throw precondition_error("identity_suite needs at least one trial");
    const HodgePackage<S>& pkg = *tp.pkg;
    int n = pkg.n();
    OpSet<S> o = wrap_ops(tp);
    S iu = scalar_traits<S>::imag_unit();
    S three = int_scalar<S>(3);

    IdentityReport rep;
    auto push = [&](const char* id, double resid) {
        if constexpr (scalar_traits<S>::exact) {
            if (resid != 0.0)
                throw theorem_violation(std::string("identity ") + id +
                                        " has a nonzero exact residual");
            rep.rows.push_back({id, 0.0, true});
        } else {
            rep.rows.push_back({id, resid, resid <= 1e-8});
        }
    };

    push("COMM1", op_residual(add(o.del_adj, o.tau_adj), scale(iu, bracket(o.Lam, o.dbar))));
    push("COMM2", op_residual(add(o.dbar_adj, o.taubar_adj), scale(-iu, bracket(o.Lam, o.del))));
    push("COMM3", op_residual(add(o.del, o.tau), scale(-iu, bracket(o.dbar_adj, o.L))));
    push("COMM4", op_residual(add(o.dbar, o.taubar), scale(iu, bracket(o.del_adj, o.L))));

    push("BKN1", op_residual(o.lap_dbar, sub(add(o.lap_del, bracket(o.del, o.tau_adj)),
                                             bracket(o.dbar, o.taubar_adj))));
    Op<S> twisted = add(o.del, o.tau);
    Op<S> twisted_adj = add(o.del_adj, o.tau_adj);
    push("BKN2", op_residual(o.lap_dbar, add(bracket(twisted, twisted_adj), o.t)));
    push("BKN2c", op_residual(o.lap_del, add(bracket(add(o.dbar, o.taubar),
                                                     add(o.dbar_adj, o.taubar_adj)),
                                             o.tbar)));

    push("AUX1", op_residual(bracket(o.L, o.tau), scale(three, o.wdel)));
    push("AUX2", op_residual(bracket(o.Lam, o.tau), scale(-(iu + iu), o.taubar_adj)));
    {
        Op<S> mid = scale(-scalar_traits<S>::one(), bracket(o.del, o.dbar_adj));
        double r = std::max(op_residual(bracket(o.del, o.taubar_adj), mid),
                            op_residual(mid, bracket(o.tau, o.dbar_adj)));
        push("AUX3", r);
    }
    push("AUX4", op_residual(scale(-scalar_traits<S>::one(), bracket(o.dbar, o.taubar_adj)),
                             add(bracket(o.tau, twisted_adj), o.t)));

    {
        Op<S> z1 = bracket(o.del, add(o.dbar_adj, o.taubar_adj));
        Op<S> z2 = bracket(o.dbar, add(o.del_adj, o.tau_adj));
        double r = std::max(op_residual(z1, zero_op(pkg, 1, -1)),
                            op_residual(z2, zero_op(pkg, -1, 1)));
        push("ANTI", r);
    }

    push("L54", op_residual(sub(bracket(o.taubar, o.taubar_adj), o.sbar),
                            add(scale(int_scalar<S>(2), o.sbar),
                                bracket(bracket(o.Lam, o.sbar), o.L))));

    // quadratic-form rows, sampled
    {
        Op<S> lsl = bracket(bracket(o.Lam, o.sbar), o.L);
        Rng rng(seed);
        auto inner_at = [&](int p, int q, const Mat<S>& a, const Mat<S>& b) -> S {
            if (p < 0 || p > n || q < 0 || q > n) return scalar_traits<S>::zero();
            if (a.rows() == 0) return scalar_traits<S>::zero();
            return pkg.gram(p, q).inner(a, b);
        };
        auto sample = [&](int d) -> Mat<S> {
            if constexpr (scalar_traits<S>::exact) return rng.vector_exact(d);
            else return rng.vector(d);
        };
        auto scalar_resid = [](const S& lhs, const S& rhs) -> double {
            if constexpr (scalar_traits<S>::exact) {
                return (lhs - rhs).is_zero() ? 0.0 : 1.0;
            } else {
                double s = 1.0 + std::max(std::abs(lhs), std::abs(rhs));
                return std::abs(lhs - rhs) / s;
            }
        };
        double worst = 0.0;
        for (int t = 0; t < trials; ++t)
            for (int p = 0; p <= n; ++p)
                for (int q = 0; q <= n; ++q) {
                    int d = pkg.dim(p, q);
                    Mat<S> u = sample(d);
                    Mat<S> v = sample(d);
                    Mat<S> Lu = o.L.at(p, q) * u;
                    Mat<S> Lv = o.L.at(p, q) * v;
                    Mat<S> Cu = o.Lam.at(p, q) * u;
                    Mat<S> Cv = o.Lam.at(p, q) * v;
                    Mat<S> Su = o.sbar.at(p, q) * u;
                    S pqn = int_scalar<S>(p + q - n);

                    S lhs = inner_at(p, q, lsl.at(p, q) * u, u);
                    S cross = inner_at(p - 1, q - 1, o.Lam.at(p, q) * Su, Cu);
                    S rhs = inner_at(p + 1, q + 1, o.sbar.at(p + 1, q + 1) * Lu, Lu) +
                            inner_at(p - 1, q - 1, o.sbar.at(p - 1, q - 1) * Cu, Cu) +
                            pqn * inner_at(p, q, Su, u) - (cross + scalar_conj(cross));
                    worst = std::max(worst, scalar_resid(lhs, rhs));

                    S wlhs = inner_at(p + 1, q + 1, Lu, Lv);
                    S wrhs = inner_at(p - 1, q - 1, Cu, Cv) - pqn * inner_at(p, q, u, v);
                    worst = std::max(worst, scalar_resid(wlhs, wrhs));
                }
        push("L54q", worst);
    }

    // conditional row: commutation of del with the dbar-Laplacian forces
    // commutation with the dbar-harmonic projector, which is equivalent to
    // stability of the dbar-harmonic space under del and its adjoint
    {
        double r1 = op_residual(compose(o.del, o.lap_dbar), compose(o.lap_dbar, o.del));
        Op<S> pdbar = grid_op(pkg, pkg.proj_dbar, 0, 0);
        double r2 = op_residual(compose(o.del, pdbar), compose(pdbar, o.del));
        double r3 = 0.0;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
                if (p + 1 <= n) {
                    Mat<S> A = pkg.proj_dbar_perp[p + 1][q] *
                               (pkg.del[p][q] * pkg.harm_dbar[p][q]);
                    if constexpr (scalar_traits<S>::exact) {
                        if (!A.is_zero()) r3 = 1.0;
                    } else {
                        double s = 1.0 + max_abs(pkg.del[p][q]);
                        r3 = std::max(r3, max_abs(A) / s);
                    }
                }
                if (p - 1 >= 0) {
                    Mat<S> B = pkg.proj_dbar_perp[p - 1][q] *
                               (pkg.del_adj[p][q] * pkg.harm_dbar[p][q]);
                    if constexpr (scalar_traits<S>::exact) {
                        if (!B.is_zero()) r3 = 1.0;
                    } else {
                        double s = 1.0 + max_abs(pkg.del_adj[p][q]);
                        r3 = std::max(r3, max_abs(B) / s);
                    }
                }
            }
        bool c1, c2, c3;
        if constexpr (scalar_traits<S>::exact) {
            c1 = r1 == 0.0;
            c2 = r2 == 0.0;
            c3 = r3 == 0.0;
        } else {
            c1 = r1 <= 1e-9;
            c2 = r2 <= 1e-9;
            c3 = r3 <= 1e-9;
        }
        if (c1 && !c2)
            throw theorem_violation("laplacian commutation without projector commutation");
        if (c2 != c3)
            throw theorem_violation("projector commutation and kernel stability disagree");
        rep.rows.push_back({"L55", 0.0, true});
    }

    return rep;
}

GapAndBound gap_and_bound(const TorsionF& tp, int p, int q) {
    const HodgeF& pkg = *tp.pkg;
    if (p < 0 || p > pkg.n() || q < 0 || q > pkg.n())
        throw dim_error("gap_and_bound bidegree outside grid");
    const GramC& G = pkg.gram(p, q);

    auto least_positive = [&](const MatF& A) -> double {
        if (A.rows() == 0) return kInf;
        auto vals = hermitian_eigvals(A, G);
        double amax = 0.0;
        for (double v : vals) amax = std::max(amax, std::abs(v));
        double cut = harmonic_threshold(amax);
        double best = kInf;
        for (double v : vals)
            if (v > cut) best = std::min(best, v);
        return best;
    };

    GapAndBound gb;
    gb.rho = least_positive(pkg.lap_sum[p][q]);
    gb.lambda0 = least_positive(pkg.lap_del[p][q]);
    gb.mu0 = least_positive(pkg.lap_dbar[p][q]);
    const MatF& Z = tp.z_omega[p][q];
    if (Z.rows() == 0) {
        gb.cbound = 0.0;
    } else {
        auto vals = hermitian_eigvals(Z, G);
        gb.cbound = std::max(0.0, vals.back());
    }
    return gb;
}

namespace {

int engine_index(const DoubleComplex& K) {
    return degeneration_index(make_bicomplex<FloatC>(K)).degeneration_index;
}

// One clause pair of the commutator condition at (p,q): the bracket kills
// the dbar-harmonic space, and maps the complement sourced one q up into
// the complement at (p+1,q).
bool commute_clause(const HodgeF& pkg, const Op<FloatC>& C, int p, int q) {
    int n = pkg.n();
    MatF K1 = C.at(p, q) * pkg.harm_dbar[p][q];
    bool ok = negligible(K1, max_abs(C.at(p, q)));
    if (p + 1 <= n && q + 1 <= n) {
        MatF K2 = pkg.proj_dbar[p + 1][q] * (C.at(p, q + 1) * pkg.proj_dbar_perp[p][q + 1]);
        ok = ok && negligible(K2, max_abs(C.at(p, q + 1)));
    }
    return ok;
}

} // namespace

std::vector<CertificateReport> certify_e2(const TorsionF& tp) {
    const HodgeF& pkg = *tp.pkg;
    int n = pkg.n();
    int index = engine_index(*pkg.K);
    MetricFlags flags = metric_classify(pkg);
    std::vector<CertificateReport> reports;

    {
        CertificateReport r;
        r.name = "GAP";
        r.applicable = flags.skt;
        r.cross_check = index;
        double rho_min = kInf, c_max = 0.0, margin = kInf;
        bool bound = true;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
                GapAndBound gb = gap_and_bound(tp, p, q);
                rho_min = std::min(rho_min, gb.rho);
                c_max = std::max(c_max, gb.cbound);
                margin = std::min(margin, gb.rho / 3.0 - gb.cbound);
                if (!(gb.cbound <= gb.rho / 3.0 + 1e-9 * (1.0 + gb.cbound))) bound = false;
            }
        r.hypothesis_values["skt"] = flags.skt ? 1.0 : 0.0;
        r.hypothesis_values["rho_min"] = rho_min;
        r.hypothesis_values["c_max"] = c_max;
        r.hypothesis_values["margin"] = margin;
        r.hypothesis_values["bound_holds"] = bound ? 1.0 : 0.0;
        r.verdict = r.applicable && bound;
        reports.push_back(std::move(r));
    }

    {
        CertificateReport r;
        r.name = "COMMUTE";
        r.applicable = true;
        r.cross_check = index;
        Op<FloatC> del = grid_op(pkg, pkg.del, 1, 0);
        Op<FloatC> Cb = bracket(del, grid_op(pkg, pkg.dbar_adj, 0, -1));
        Op<FloatC> Cc = bracket(del, grid_op(pkg, tp.taubar_adj, 0, -1));
        bool all = true;
        double worst = 0.0;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
                double ra = 0.0;
                if (p + 1 <= n) {
                    MatF D = pkg.del[p][q] * pkg.proj_dbar[p][q] -
                             pkg.proj_dbar[p + 1][q] * pkg.del[p][q];
                    ra = max_abs(D) / (1.0 + max_abs(pkg.del[p][q]));
                }
                bool a_pq = ra <= 1e-9;
                bool b_pq = commute_clause(pkg, Cb, p, q);
                bool c_pq = commute_clause(pkg, Cc, p, q);
                if (a_pq != b_pq || b_pq != c_pq)
                    throw theorem_violation("commutation conditions disagree at (" +
                                            std::to_string(p) + "," + std::to_string(q) + ")");
                all = all && a_pq;
                worst = std::max(worst, ra);
            }
        r.hypothesis_values["max_commutator_resid"] = worst;
        r.hypothesis_values["conditions_agree"] = 1.0;
        r.verdict = all;
        reports.push_back(std::move(r));
    }

    {
        CertificateReport r;
        r.name = "RBAR";
        r.applicable = flags.skt;
        r.cross_check = index;
        double worst = 0.0;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
                const MatF& P = pkg.harm_page2[p][q];
                if (P.cols() == 0) continue;
                const MatF& R = tp.rbar_omega[p][q];
                MatF M = P.hconj() * pkg.gram(p, q).apply(R * P);
                worst = std::max(worst, max_abs(M) / (1.0 + max_abs(R)));
            }
        r.hypothesis_values["skt"] = flags.skt ? 1.0 : 0.0;
        r.hypothesis_values["max_restricted_form"] = worst;
        r.verdict = r.applicable && worst <= 1e-9;
        reports.push_back(std::move(r));
    }

    {
        CertificateReport r;
        r.name = "KERINC";
        r.applicable = true;
        r.cross_check = index;
        double worst = 0.0;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
                MatF M = pkg.lap_del[p][q] * pkg.harm_page2[p][q];
                worst = std::max(worst, max_abs(M) / (1.0 + max_abs(pkg.lap_del[p][q])));
            }
        r.hypothesis_values["max_lap_del_on_kernel"] = worst;
        r.verdict = worst <= 1e-9;
        reports.push_back(std::move(r));
    }

    for (const auto& r : reports)
        if (r.verdict && index > 2)
            throw theorem_violation("certificate " + r.name +
                                    " fired with degeneration index " + std::to_string(index));
    return reports;
}

std::vector<CertificateReport> certify_e1(const TorsionF& tp) {
    const HodgeF& pkg = *tp.pkg;
    int n = pkg.n();
    int index = engine_index(*pkg.K);
    MetricFlags flags = metric_classify(pkg);
    std::vector<CertificateReport> reports;

    {
        CertificateReport r;
        r.name = "R0";
        r.applicable = flags.skt;
        r.cross_check = index;
        Op<FloatC> tau = grid_op(pkg, tp.tau, 1, 0);
        Op<FloatC> tau_adj = grid_op(pkg, tp.tau_adj, -1, 0);
        Op<FloatC> wdel = grid_op(pkg, tp.wdel, 2, 1);
        Op<FloatC> wdel_adj = grid_op(pkg, tp.wdel_adj, -2, -1);
        double resid = op_residual(bracket(tau, tau_adj), bracket(wdel, wdel_adj));
        r.hypothesis_values["skt"] = flags.skt ? 1.0 : 0.0;
        r.hypothesis_values["torsion_identity_resid"] = resid;
        r.verdict = r.applicable && resid <= 1e-9;
        reports.push_back(std::move(r));
    }

    {
        CertificateReport r;
        r.name = "DOMINATION";
        r.applicable = true;
        r.cross_check = index;
        double worst = 0.0;
        for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
                MatF M = pkg.lap_del[p][q] * pkg.harm_dbar[p][q];
                worst = std::max(worst, max_abs(M) / (1.0 + max_abs(pkg.lap_del[p][q])));
            }
        r.hypothesis_values["max_lap_del_on_dbar_kernel"] = worst;
        r.verdict = worst <= 1e-9;
        reports.push_back(std::move(r));
    }

    for (const auto& r : reports)
        if (r.verdict && index > 1)
            throw theorem_violation("certificate " + r.name +
                                    " fired with degeneration index " + std::to_string(index));
    return reports;
}

namespace {

MatF snap_noise(const MatF& M) {
    double cut = 1e-12 * (1.0 + max_abs(M));
    MatF out = M;
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j)
            if (std::abs(out(i, j)) <= cut) out(i, j) = FloatC(0.0, 0.0);
    return out;
}

} // namespace

SharpGapReport sharp_gap_analysis(const TorsionF& tp) {
    const HodgeF& pkg = *tp.pkg;
    int n = pkg.n();
    MetricFlags flags = metric_classify(pkg);

    SharpGapReport rep;
    rep.applicable = flags.skt;
    rep.hypothesis_all = true;

    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            SharpGapRow row;
            row.p = p;
            row.q = q;
            const GramC& G = pkg.gram(p, q);

            EigResult ed = hermitian_eigs(pkg.lap_del[p][q], G);
            double amax = 0.0;
            for (double v : ed.values) amax = std::max(amax, std::abs(v));
            double cut = harmonic_threshold(amax);
            std::vector<int> keep;
            double l0 = kInf;
            for (int i = 0; i < (int)ed.values.size(); ++i)
                if (ed.values[i] > cut) {
                    keep.push_back(i);
                    l0 = std::min(l0, ed.values[i]);
                }
            MatF V = ed.vectors.cols_subset(keep);
            row.lambda0 = l0;
            row.dim_perp = V.cols();

            auto rvals = hermitian_eigvals(tp.rbar_omega[p][q], G);
            row.rbar_sup = rvals.empty() ? 0.0 : rvals.back();
            row.hypothesis = row.lambda0 > row.rbar_sup;

            if (row.dim_perp == 0) {
                row.lower_bound = true;
                row.injective = true;
                row.trivial_overlap = true;
                row.overlap_dim = 0;
                row.eps1 = 0.0;
            } else {
                // squared-norm bound via the restricted projector expressed in
                // the orthonormal frames of the two complements
                EigResult eb = hermitian_eigs(pkg.lap_dbar[p][q], G);
                double bmax = 0.0;
                for (double v : eb.values) bmax = std::max(bmax, std::abs(v));
                double bcut = harmonic_threshold(bmax);
                std::vector<int> bkeep;
                for (int i = 0; i < (int)eb.values.size(); ++i)
                    if (eb.values[i] > bcut) bkeep.push_back(i);
                MatF W = eb.vectors.cols_subset(bkeep);
                MatF M = W.hconj() * G.apply(V);
                auto sv = lapackb::svd(to_eigen(M), false);
                double smax = sv.sigma.size() > 0 ? sv.sigma(0) : 0.0;
                double scut = 1e-8 * (1.0 + smax);
                int srank = 0;
                for (int i = 0; i < sv.sigma.size(); ++i)
                    if (sv.sigma(i) > scut) ++srank;
                bool full = M.rows() >= M.cols() && srank == M.cols();
                row.lower_bound = full;
                if (full) {
                    double smin = sv.sigma(sv.sigma.size() - 1);
                    row.eps1 = std::clamp(1.0 - smin * smin, 0.0, 1.0);
                } else {
                    row.eps1 = 1.0;
                }

                // injectivity via the rank of the ambient projected basis
                MatF PV = pkg.proj_dbar_perp[p][q] * V;
                auto sv2 = lapackb::svd(to_eigen(PV), false);
                double s2max = sv2.sigma.size() > 0 ? sv2.sigma(0) : 0.0;
                double s2cut = 1e-8 * (1.0 + s2max);
                int rank2 = 0;
                for (int i = 0; i < sv2.sigma.size(); ++i)
                    if (sv2.sigma(i) > s2cut) ++rank2;
                row.injective = rank2 == V.cols();

                // overlap via the joint kernel of dbar, its adjoint, and the
                // projector onto the del-harmonic space
                MatF B = MatF::vstack({snap_noise(pkg.dbar[p][q]), snap_noise(pkg.dbar_adj[p][q]),
                                       snap_noise(pkg.proj_del[p][q])});
                row.overlap_dim = float_kernel_basis(B).cols();
                row.trivial_overlap = row.overlap_dim == 0;
            }

            if (row.lower_bound != row.injective || row.injective != row.trivial_overlap)
                throw theorem_violation("restricted projector statements disagree at (" +
                                        std::to_string(p) + "," + std::to_string(q) + ")");
            if (rep.applicable && row.hypothesis && !row.trivial_overlap)
                throw theorem_violation("spectral gap hypothesis failed to separate kernels at (" +
                                        std::to_string(p) + "," + std::to_string(q) + ")");

            rep.hypothesis_all = rep.hypothesis_all && row.hypothesis;
            rep.eps1 = std::max(rep.eps1, row.eps1);
            rep.rows.push_back(row);
        }

    bool dom = true;
    FloatC keep(1.0 - rep.eps1, 0.0);
    for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
            MatF bound = pkg.lap_del[p][q] * keep;
            if (!psd_domination_check(pkg.lap_del_hproj_perp[p][q], bound, pkg.gram(p, q)))
                dom = false;
        }
    rep.domination = dom;
    if (rep.applicable && rep.hypothesis_all && !dom)
        throw theorem_violation("projected laplacian fails the certified lower bound");
    return rep;
}

template TorsionPackage<ExactC> torsion_operators(const HodgePackage<ExactC>&);
template TorsionPackage<FloatC> torsion_operators(const HodgePackage<FloatC>&);
template IdentityReport identity_suite(const TorsionPackage<ExactC>&, int, std::uint64_t);
template IdentityReport identity_suite(const TorsionPackage<FloatC>&, int, std::uint64_t);

} // namespace hodgelab
