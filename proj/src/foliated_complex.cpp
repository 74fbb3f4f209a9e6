#include "hodgelab/foliated_complex.hpp"

#include <algorithm>
#include <bit>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

// lex-ordered size-k subsets of an ascending global index list, as global masks
std::vector<std::vector<uint32_t>> block_subsets(const std::vector<int>& idx) {
    const int m = (int)idx.size();
    std::vector<std::vector<uint32_t>> out(m + 1);
    for (int k = 0; k <= m; ++k) {
        std::vector<int> pos(k);
        for (int i = 0; i < k; ++i) pos[i] = i;
        while (true) {
            uint32_t mask = 0;
            for (int i : pos) mask |= (1u << idx[i]);
            out[k].push_back(mask);
            int t = k - 1;
            while (t >= 0 && pos[t] == m - k + t) --t;
            if (t < 0) break;
            ++pos[t];
            for (int s = t + 1; s < k; ++s) pos[s] = pos[s - 1] + 1;
        }
    }
    return out;
}

} // namespace

FoliatedComplex::FoliatedComplex(const DoubleComplex& K, std::vector<int> N_idx,
                                 std::vector<int> F_idx)
    : K_(&K), N_(std::move(N_idx)), F_(std::move(F_idx)) {
    std::sort(N_.begin(), N_.end());
    std::sort(F_.begin(), F_.end());
    for (int i : N_) maskN_ |= (1u << i);
    for (int i : F_) maskF_ |= (1u << i);
    const int n = K.n();
    if ((maskN_ & maskF_) || std::popcount(maskN_ | maskF_) != n ||
        (maskN_ | maskF_) != (n >= 32 ? ~0u : ((1u << n) - 1)))
        throw input_error("foliation sets must partition the coframe indices");

    check_integrability();

    subN_ = block_subsets(N_);
    subF_ = block_subsets(F_);
    rankN_.assign(size_t(1) << n, -1);
    rankF_.assign(size_t(1) << n, -1);
    for (const auto& level : subN_)
        for (size_t i = 0; i < level.size(); ++i) rankN_[level[i]] = (int)i;
    for (const auto& level : subF_)
        for (size_t i = 0; i < level.size(); ++i) rankF_[level[i]] = (int)i;

    build();
}

void FoliatedComplex::check_integrability() const {
    const auto& eq = K_->equations();
    auto offending = [&](int i, const std::pair<int, int>& jk) {
        return "d(" + eq.names[i] + ") contains " + eq.names[jk.first] + "^" +
               eq.names[jk.second];
    };
    for (int i : N_)
        for (const auto& [jk, c] : eq.a2[i]) {
            if (c.is_zero()) continue;
            if ((maskF_ >> jk.first & 1) && (maskF_ >> jk.second & 1))
                throw integrability_error("foliation split rejected: " + offending(i, jk) +
                                          " with both factors in F");
        }
    for (int i : F_)
        for (const auto& [jk, c] : eq.a2[i]) {
            if (c.is_zero()) continue;
            if ((maskN_ >> jk.first & 1) && (maskN_ >> jk.second & 1))
                throw integrability_error("foliation split rejected: " + offending(i, jk) +
                                          " with both factors in N");
        }
}

int FoliatedComplex::dim(int p, int q) const {
    if (p < 0 || p > r() || q < 0 || q > f()) return 0;
    return (int)(subN_[p].size() * subF_[q].size());
}

const MatQ& FoliatedComplex::delN_block(int p, int q) const {
    if (p < 0 || p > r() || q < 0 || q > f()) throw dim_error("delN_block out of range");
    return delN_[p][q];
}

const MatQ& FoliatedComplex::delF_block(int p, int q) const {
    if (p < 0 || p > r() || q < 0 || q > f()) throw dim_error("delF_block out of range");
    return delF_[p][q];
}

void FoliatedComplex::build() {
    const int rr = r(), ff = f();
    delN_.assign(rr + 1, std::vector<MatQ>(ff + 1));
    delF_.assign(rr + 1, std::vector<MatQ>(ff + 1));
    for (int p = 0; p <= rr; ++p)
        for (int q = 0; q <= ff; ++q) {
            delN_[p][q] = MatQ(dim(p + 1, q), dim(p, q));
            delF_[p][q] = MatQ(dim(p, q + 1), dim(p, q));
        }

    for (int p = 0; p <= rr; ++p)
        for (int q = 0; q <= ff; ++q) {
            const int k = p + q;
            if (k > K_->n()) continue;
            const MatQ& del = K_->del_block(k, 0);
            const int cf = (int)subF_[q].size();
            for (int col = 0; col < dim(p, q); ++col) {
                uint32_t S = subN_[p][col / cf], T = subF_[q][col % cf];
                int s0 = merge_sign(S, T);
                int kcol = K_->index_of({S | T, 0}, 0);
                for (int row = 0; row < del.rows(); ++row) {
                    const ExactC& c = del(row, kcol);
                    if (c.is_zero()) continue;
                    uint32_t V = K_->monomial_at(k + 1, 0, row).I;
                    uint32_t S2 = V & maskN_, T2 = V & maskF_;
                    int s1 = merge_sign(S2, T2);
                    ExactC v = c;
                    if (s0 * s1 < 0) v = -v;
                    if (std::popcount(S2) == p + 1) {
                        int dst = rankN_[S2] * (int)subF_[q].size() + rankF_[T2];
                        delN_[p][q](dst, col) += v;
                    } else if (std::popcount(S2) == p) {
                        int dst = rankN_[S2] * (int)subF_[q + 1].size() + rankF_[T2];
                        delF_[p][q](dst, col) += v;
                    } else {
                        throw integrability_error(
                            "differential term crosses the splitting by more than one degree");
                    }
                }
            }
        }

    // The split parts must themselves square to zero and anticommute.
    for (int p = 0; p <= rr; ++p)
        for (int q = 0; q <= ff; ++q) {
            if (dim(p, q) == 0) continue;
            if (p + 2 <= rr && !(delN_[p + 1][q] * delN_[p][q]).is_zero())
                throw integrability_error("split differential does not square to zero (N part)");
            if (q + 2 <= ff && !(delF_[p][q + 1] * delF_[p][q]).is_zero())
                throw integrability_error("split differential does not square to zero (F part)");
            if (p + 1 <= rr && q + 1 <= ff) {
                MatQ mix = delF_[p + 1][q] * delN_[p][q] + delN_[p][q + 1] * delF_[p][q];
                if (!mix.is_zero())
                    throw integrability_error("split differential parts do not anticommute");
            }
        }
}

template <class S>
Mat<S> FoliatedComplex::embed(int p, int q, const Mat<S>& v) const {
    if (v.rows() != dim(p, q) || v.cols() != 1) throw dim_error("embed: bad shape");
    Mat<S> out(K_->dim(p + q, 0), 1);
    const int cf = (int)subF_[q].size();
    for (int i = 0; i < v.rows(); ++i) {
        if (scalar_is_zero(v(i, 0))) continue;
        uint32_t Sm = subN_[p][i / cf], Tm = subF_[q][i % cf];
        S c = v(i, 0);
        if (merge_sign(Sm, Tm) < 0) c = -c;
        out(K_->index_of({Sm | Tm, 0}, 0), 0) += c;
    }
    return out;
}

template <class S>
Mat<S> FoliatedComplex::component(int p, int q, const Mat<S>& ambient) const {
    if (ambient.rows() != K_->dim(p + q, 0) || ambient.cols() != 1)
        throw dim_error("component: bad shape");
    Mat<S> out(dim(p, q), 1);
    const int cf = (int)subF_[q].size();
    for (int i = 0; i < out.rows(); ++i) {
        uint32_t Sm = subN_[p][i / cf], Tm = subF_[q][i % cf];
        S c = ambient(K_->index_of({Sm | Tm, 0}, 0), 0);
        if (merge_sign(Sm, Tm) < 0) c = -c;
        out(i, 0) = c;
    }
    return out;
}

template MatQ FoliatedComplex::embed(int, int, const MatQ&) const;
template MatF FoliatedComplex::embed(int, int, const MatF&) const;
template MatQ FoliatedComplex::component(int, int, const MatQ&) const;
template MatF FoliatedComplex::component(int, int, const MatF&) const;

FoliatedComplex foliated_split(const DoubleComplex& K, std::vector<int> N_idx,
                               std::vector<int> F_idx) {
    return FoliatedComplex(K, std::move(N_idx), std::move(F_idx));
}

} // namespace hodgelab
