#include "hodgelab/double_complex.hpp"

#include <bit>

#include "hodgelab/error.hpp"

namespace hodgelab {

SubsetTable::SubsetTable(int n) : n_(n) {
    if (n < 0 || n > 16) throw dim_error("coframe dimension out of range");
    masks_.resize(n + 1);
    rank_.assign(size_t(1) << n, -1);
    for (int k = 0; k <= n; ++k) {
        // lex enumeration of increasing k-tuples
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            uint32_t m = 0;
            for (int i : idx) m |= (1u << i);
            rank_[m] = (int)masks_[k].size();
            masks_[k].push_back(m);
            int t = k - 1;
            while (t >= 0 && idx[t] == n - k + t) --t;
            if (t < 0) break;
            ++idx[t];
            for (int s = t + 1; s < k; ++s) idx[s] = idx[s - 1] + 1;
        }
    }
}

int SubsetTable::count(int k) const {
    if (k < 0 || k > n_) return 0;
    return (int)masks_[k].size();
}

int merge_sign(uint32_t a, uint32_t b) {
    int inv = 0;
    uint32_t bb = b;
    while (bb) {
        int y = std::countr_zero(bb);
        bb &= bb - 1;
        inv += std::popcount(a >> (y + 1));
    }
    return (inv & 1) ? -1 : 1;
}

MonomialProduct wedge_monomials(const Monomial& a, const Monomial& b) {
    MonomialProduct r;
    if ((a.I & b.I) || (a.J & b.J)) return r;
    int qa = std::popcount(a.J), pb = std::popcount(b.I);
    int s = ((qa * pb) & 1) ? -1 : 1;
    s *= merge_sign(a.I, b.I) * merge_sign(a.J, b.J);
    r.sign = s;
    r.m = {a.I | b.I, a.J | b.J};
    return r;
}

DoubleComplex::DoubleComplex(StructureEquations eq) : eq_(std::move(eq)), tab_(eq_.n) {
    if ((int)eq_.a2.size() != eq_.n || (int)eq_.a11.size() != eq_.n)
        throw input_error("structure equations: coefficient tables do not match n");
    build_blocks();
    validate();
}

int DoubleComplex::dim(int p, int q) const {
    return tab_.count(p) * tab_.count(q);
}

int DoubleComplex::index_of(const Monomial& m, int q) const {
    return tab_.rank(m.I) * tab_.count(q) + tab_.rank(m.J);
}

Monomial DoubleComplex::monomial_at(int p, int q, int idx) const {
    int cq = tab_.count(q);
    return {tab_.masks(p)[idx / cq], tab_.masks(q)[idx % cq]};
}

std::string DoubleComplex::basis_label(int p, int q, int idx) const {
    Monomial m = monomial_at(p, q, idx);
    std::string out;
    auto app = [&](uint32_t mask, bool bar) {
        while (mask) {
            int i = std::countr_zero(mask);
            mask &= mask - 1;
            if (!out.empty()) out += "^";
            out += eq_.names[i];
            if (bar) out += "bar";
        }
    };
    app(m.I, false);
    app(m.J, true);
    return out.empty() ? "1" : out;
}

const MatQ& DoubleComplex::del_block(int p, int q) const {
    if (p < 0 || p > n() || q < 0 || q > n()) throw dim_error("del_block out of range");
    return del_[p][q];
}

const MatQ& DoubleComplex::dbar_block(int p, int q) const {
    if (p < 0 || p > n() || q < 0 || q > n()) throw dim_error("dbar_block out of range");
    return dbar_[p][q];
}

void DoubleComplex::build_blocks() {
    const int nn = n();
    del_.assign(nn + 1, std::vector<MatQ>(nn + 1));
    dbar_.assign(nn + 1, std::vector<MatQ>(nn + 1));
    for (int p = 0; p <= nn; ++p)
        for (int q = 0; q <= nn; ++q) {
            del_[p][q] = MatQ(dim(p + 1, q), dim(p, q));
            dbar_[p][q] = MatQ(dim(p, q + 1), dim(p, q));
        }

    // One Leibniz pass per basis monomial: differentiate each letter, wedge
    // the result back between the surrounding letters.
    for (int p = 0; p <= nn; ++p)
        for (int q = 0; q <= nn; ++q) {
            const int d = dim(p, q);
            for (int col = 0; col < d; ++col) {
                Monomial m = monomial_at(p, q, col);
                int t = 0;
                auto emit = [&](MatQ& block, int out_q, const ExactC& c, Monomial pre,
                                Monomial dterm, Monomial post) {
                    auto w1 = wedge_monomials(pre, dterm);
                    if (w1.sign == 0) return;
                    auto w2 = wedge_monomials(w1.m, post);
                    if (w2.sign == 0) return;
                    ExactC v = c;
                    if (((t & 1) ? -1 : 1) * w1.sign * w2.sign < 0) v = -v;
                    block(index_of(w2.m, out_q), col) += v;
                };
                uint32_t rest = m.I;
                while (rest) {
                    int i = std::countr_zero(rest);
                    rest &= rest - 1;
                    uint32_t below = m.I & ((1u << i) - 1);
                    Monomial pre{below, 0};
                    Monomial post{m.I & ~below & ~(1u << i), m.J};
                    for (const auto& [jk, c] : eq_.a2[i])
                        emit(del_[p][q], q, c, pre,
                             {(1u << jk.first) | (1u << jk.second), 0}, post);
                    for (const auto& [jk, c] : eq_.a11[i])
                        emit(dbar_[p][q], q + 1, c, pre,
                             {1u << jk.first, 1u << jk.second}, post);
                    ++t;
                }
                rest = m.J;
                while (rest) {
                    int j = std::countr_zero(rest);
                    rest &= rest - 1;
                    uint32_t below = m.J & ((1u << j) - 1);
                    Monomial pre{m.I, below};
                    Monomial post{0, m.J & ~below & ~(1u << j)};
                    // differentials of conjugate letters mirror the model data
                    for (const auto& [jk, c] : eq_.a2[j])
                        emit(dbar_[p][q], q + 1, scalar_conj(c), pre,
                             {0, (1u << jk.first) | (1u << jk.second)}, post);
                    for (const auto& [jk, c] : eq_.a11[j])
                        emit(del_[p][q], q, -scalar_conj(c), pre,
                             {1u << jk.second, 1u << jk.first}, post);
                    ++t;
                }
            }
        }
}

void DoubleComplex::validate() {
    const int nn = n();
    auto first_bad_col = [](const MatQ& M) {
        for (int j = 0; j < M.cols(); ++j)
            for (int i = 0; i < M.rows(); ++i)
                if (!M(i, j).is_zero()) return j;
        return -1;
    };
    for (int p = 0; p <= nn; ++p)
        for (int q = 0; q <= nn; ++q) {
            if (dim(p, q) == 0) continue;
            if (p + 2 <= nn) {
                int c = first_bad_col(del_[p + 1][q] * del_[p][q]);
                if (c >= 0)
                    throw integrability_error("d^2 != 0 on " + basis_label(p, q, c) +
                                              " (holomorphic square)");
            }
            if (q + 2 <= nn) {
                int c = first_bad_col(dbar_[p][q + 1] * dbar_[p][q]);
                if (c >= 0)
                    throw integrability_error("d^2 != 0 on " + basis_label(p, q, c) +
                                              " (antiholomorphic square)");
            }
            if (p + 1 <= nn && q + 1 <= nn) {
                MatQ mix = dbar_[p + 1][q] * del_[p][q] + del_[p][q + 1] * dbar_[p][q];
                int c = first_bad_col(mix);
                if (c >= 0)
                    throw integrability_error("d^2 != 0 on " + basis_label(p, q, c) +
                                              " (mixed term)");
            }
        }
}

template <class S>
Mat<S> DoubleComplex::wedge(int pa, int qa, const Mat<S>& a, int pb, int qb,
                            const Mat<S>& b) const {
    if (a.rows() != dim(pa, qa) || b.rows() != dim(pb, qb) || a.cols() != 1 || b.cols() != 1)
        throw dim_error("wedge: operand shape mismatch");
    Mat<S> out(dim(pa + pb, qa + qb), 1);
    if (out.rows() == 0) return out; // degree overflow
    for (int ia = 0; ia < a.rows(); ++ia) {
        if (scalar_is_zero(a(ia, 0))) continue;
        Monomial ma = monomial_at(pa, qa, ia);
        for (int ib = 0; ib < b.rows(); ++ib) {
            if (scalar_is_zero(b(ib, 0))) continue;
            auto w = wedge_monomials(ma, monomial_at(pb, qb, ib));
            if (w.sign == 0) continue;
            S term = a(ia, 0) * b(ib, 0);
            if (w.sign < 0) term = -term;
            out(index_of(w.m, qa + qb), 0) += term;
        }
    }
    return out;
}

template <class S>
Mat<S> DoubleComplex::wedge_matrix(int a, int b, const Mat<S>& g, int p, int q) const {
    if (g.rows() != dim(a, b) || g.cols() != 1) throw dim_error("wedge_matrix: bad form shape");
    Mat<S> M(dim(p + a, q + b), dim(p, q));
    if (M.rows() == 0) return M;
    for (int col = 0; col < M.cols(); ++col) {
        Monomial mu = monomial_at(p, q, col);
        for (int ig = 0; ig < g.rows(); ++ig) {
            if (scalar_is_zero(g(ig, 0))) continue;
            auto w = wedge_monomials(monomial_at(a, b, ig), mu);
            if (w.sign == 0) continue;
            S term = g(ig, 0);
            if (w.sign < 0) term = -term;
            M(index_of(w.m, q + b), col) += term;
        }
    }
    return M;
}

template <class S>
Mat<S> DoubleComplex::conjugate_form(int p, int q, const Mat<S>& v) const {
    if (v.rows() != dim(p, q) || v.cols() != 1) throw dim_error("conjugate_form: bad shape");
    Mat<S> out(dim(q, p), 1);
    const bool flip = (p * q) & 1;
    for (int i = 0; i < v.rows(); ++i) {
        if (scalar_is_zero(v(i, 0))) continue;
        Monomial m = monomial_at(p, q, i);
        S c = scalar_conj(v(i, 0));
        if (flip) c = -c;
        out(index_of({m.J, m.I}, p), 0) = c;
    }
    return out;
}

template MatQ DoubleComplex::wedge(int, int, const MatQ&, int, int, const MatQ&) const;
template MatF DoubleComplex::wedge(int, int, const MatF&, int, int, const MatF&) const;
template MatQ DoubleComplex::wedge_matrix(int, int, const MatQ&, int, int) const;
template MatF DoubleComplex::wedge_matrix(int, int, const MatF&, int, int) const;
template MatQ DoubleComplex::conjugate_form(int, int, const MatQ&) const;
template MatF DoubleComplex::conjugate_form(int, int, const MatF&) const;

} // namespace hodgelab
