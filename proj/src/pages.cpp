#include "hodgelab/pages.hpp"

#include <string>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

template <typename S>
Mat<S> take_block(const MatQ& M) {
    if constexpr (scalar_traits<S>::exact) {
        return M;
    } else {
        return to_float(M);
    }
}

template <typename S>
Mat<S> kernel_of(const Mat<S>& M) {
    if constexpr (scalar_traits<S>::exact) {
        return exact_kernel_basis(M);
    } else {
        return float_kernel_basis(M);
    }
}

template <typename S>
int rank_of(const Mat<S>& M) {
    if constexpr (scalar_traits<S>::exact) {
        return exact_rank(M);
    } else {
        return float_rank(M);
    }
}

struct ChainShape {
    std::vector<int> scol; // columns per slot
    std::vector<int> soff; // column offsets
    int cols = 0;
};

// Stacked solutions of the chain system anchored at (a,b) with `len` slots:
//   vert a_0 = 0,  horiz a_{i-1} + vert a_i = 0,
// slot i living in degree (a+i, b-i). Out-of-range slots contribute no
// columns, which silently zeroes their terms; that matches the convention
// that components outside the first quadrant vanish.
template <typename S>
Mat<S> chain_solutions(const Bicomplex<S>& K, int a, int b, int len, ChainShape& shape) {
    shape.scol.assign(len, 0);
    shape.soff.assign(len, 0);
    int cols = 0;
    for (int i = 0; i < len; ++i) {
        shape.soff[i] = cols;
        shape.scol[i] = K.dim(a + i, b - i);
        cols += shape.scol[i];
    }
    shape.cols = cols;

    std::vector<int> erow(len, 0), eoff(len, 0);
    int rows = 0;
    for (int j = 0; j < len; ++j) {
        eoff[j] = rows;
        erow[j] = K.dim(a + j, b - j + 1);
        rows += erow[j];
    }

    Mat<S> M(rows, cols);
    for (int j = 0; j < len; ++j) {
        if (erow[j] == 0) continue;
        if (j >= 1 && shape.scol[j - 1] > 0) {
            const Mat<S>& H = K.horiz[a + j - 1][b - j + 1];
            for (int rr = 0; rr < H.rows(); ++rr)
                for (int cc = 0; cc < H.cols(); ++cc)
                    M(eoff[j] + rr, shape.soff[j - 1] + cc) = H(rr, cc);
        }
        if (shape.scol[j] > 0) {
            const Mat<S>& V = K.vert[a + j][b - j];
            for (int rr = 0; rr < V.rows(); ++rr)
                for (int cc = 0; cc < V.cols(); ++cc)
                    M(eoff[j] + rr, shape.soff[j] + cc) = V(rr, cc);
        }
    }
    return kernel_of(M);
}

template <typename S>
Mat<S> slot_rows(const Mat<S>& sols, const ChainShape& shape, int slot) {
    Mat<S> out(shape.scol[slot], sols.cols());
    for (int rr = 0; rr < out.rows(); ++rr)
        for (int cc = 0; cc < out.cols(); ++cc) out(rr, cc) = sols(shape.soff[slot] + rr, cc);
    return out;
}

std::string at_bidegree(int p, int q, int r) {
    return "(" + std::to_string(p) + "," + std::to_string(q) + ") on page " + std::to_string(r);
}

} // namespace

template <typename S>
Bicomplex<S> make_bicomplex(const DoubleComplex& K) {
    Bicomplex<S> B;
    B.pmax = B.qmax = K.n();
    B.dims.assign(B.pmax + 1, std::vector<int>(B.qmax + 1, 0));
    B.horiz.resize(B.pmax + 1);
    B.vert.resize(B.pmax + 1);
    for (int p = 0; p <= B.pmax; ++p) {
        for (int q = 0; q <= B.qmax; ++q) {
            B.dims[p][q] = K.dim(p, q);
            B.horiz[p].push_back(take_block<S>(K.del_block(p, q)));
            B.vert[p].push_back(take_block<S>(K.dbar_block(p, q)));
        }
    }
    return B;
}

template <typename S>
Bicomplex<S> make_bicomplex(const FoliatedComplex& E) {
    Bicomplex<S> B;
    B.pmax = E.r();
    B.qmax = E.f();
    B.dims.assign(B.pmax + 1, std::vector<int>(B.qmax + 1, 0));
    B.horiz.resize(B.pmax + 1);
    B.vert.resize(B.pmax + 1);
    for (int p = 0; p <= B.pmax; ++p) {
        for (int q = 0; q <= B.qmax; ++q) {
            B.dims[p][q] = E.dim(p, q);
            B.horiz[p].push_back(take_block<S>(E.delN_block(p, q)));
            B.vert[p].push_back(take_block<S>(E.delF_block(p, q)));
        }
    }
    return B;
}

template <typename S>
Subspace<S> zigzag_space(const Bicomplex<S>& K, int p, int q, int r) {
    if (r < 1) throw precondition_error("page index must be at least 1");
    const int d = K.dim(p, q);
    if (d == 0) return Subspace<S>::zero(0);
    ChainShape shape;
    Mat<S> sols = chain_solutions(K, p, q, r, shape);
    return Subspace<S>::span(slot_rows(sols, shape, 0));
}

template <typename S>
Subspace<S> boundary_space(const Bicomplex<S>& K, int p, int q, int r) {
    if (r < 1) throw precondition_error("page index must be at least 1");
    const int d = K.dim(p, q);
    if (d == 0) return Subspace<S>::zero(0);

    std::vector<Mat<S>> parts;
    if (q >= 1 && K.dim(p, q - 1) > 0) parts.push_back(K.vert[p][q - 1]);
    if (r >= 2 && p >= 1 && K.dim(p - 1, q) > 0) {
        const int len = r - 1;
        ChainShape shape;
        Mat<S> sols = chain_solutions(K, p - r + 1, q + r - 2, len, shape);
        if (shape.scol[len - 1] > 0 && sols.cols() > 0)
            parts.push_back(K.horiz[p - 1][q] * slot_rows(sols, shape, len - 1));
    }
    if (parts.empty()) return Subspace<S>::zero(d);
    Mat<S> all = Mat<S>::hstack(parts);
    if (all.rows() != d) throw dim_error("boundary assembly shape mismatch");
    return Subspace<S>::span(all);
}

template <typename S>
PageTable<S> page_table(const Bicomplex<S>& K, int r, bool representatives) {
    PageTable<S> T;
    T.r = r;
    for (int p = 0; p <= K.pmax; ++p) {
        for (int q = 0; q <= K.qmax; ++q) {
            Subspace<S> Z = zigzag_space(K, p, q, r);
            Subspace<S> B = boundary_space(K, p, q, r);
            if (!subspace_contains_all(Z, B))
                throw theorem_violation("boundary space escapes cycle space at " +
                                        at_bidegree(p, q, r));
            T.dims[{p, q}] = Z.dim() - B.dim();
            if (representatives) T.representatives[{p, q}] = {std::move(Z), std::move(B)};
        }
    }
    return T;
}

template <typename S>
std::vector<int> total_cohomology(const Bicomplex<S>& K) {
    const int kmax = K.pmax + K.qmax;

    // dims and in-degree column offsets of the total complex
    std::vector<int> tot(kmax + 2, 0);
    std::vector<std::map<int, int>> off(kmax + 2); // k -> (p -> offset)
    for (int k = 0; k <= kmax; ++k) {
        int c = 0;
        for (int p = 0; p <= K.pmax; ++p) {
            int q = k - p;
            if (K.dim(p, q) == 0) continue;
            off[k][p] = c;
            c += K.dim(p, q);
        }
        tot[k] = c;
    }

    std::vector<int> rank(kmax + 1, 0);
    for (int k = 0; k < kmax; ++k) {
        Mat<S> D(tot[k + 1], tot[k]);
        for (auto [p, co] : off[k]) {
            int q = k - p;
            const Mat<S>& H = K.horiz[p][q];
            if (H.rows() > 0) {
                int ro = off[k + 1].at(p + 1);
                for (int rr = 0; rr < H.rows(); ++rr)
                    for (int cc = 0; cc < H.cols(); ++cc) D(ro + rr, co + cc) = H(rr, cc);
            }
            const Mat<S>& V = K.vert[p][q];
            if (V.rows() > 0) {
                int ro = off[k + 1].at(p);
                for (int rr = 0; rr < V.rows(); ++rr)
                    for (int cc = 0; cc < V.cols(); ++cc) D(ro + rr, co + cc) = V(rr, cc);
            }
        }
        rank[k] = rank_of(D);
    }

    std::vector<int> betti(kmax + 1, 0);
    for (int k = 0; k <= kmax; ++k)
        betti[k] = tot[k] - rank[k] - (k > 0 ? rank[k - 1] : 0);
    return betti;
}

template <typename S>
ConvergenceReport degeneration_index(const Bicomplex<S>& K) {
    ConvergenceReport rep;
    std::vector<int> betti = total_cohomology<S>(K);
    for (int k = 0; k < (int)betti.size(); ++k) rep.betti[k] = betti[k];

    auto graded_sums = [&](const PageTable<S>& T) {
        std::vector<int> s(betti.size(), 0);
        for (auto& [pq, d] : T.dims) s[pq.first + pq.second] += d;
        return s;
    };
    auto record = [&](int r, const std::vector<int>& s) {
        for (int k = 0; k < (int)s.size(); ++k) rep.page_sums[{r, k}] = s[k];
    };

    const int rmax = std::max(K.pmax, K.qmax) + 1;
    PageTable<S> cur = page_table<S>(K, 1);
    std::vector<int> cur_sums = graded_sums(cur);
    record(1, cur_sums);
    rep.page_dims[1] = cur.dims;
    for (int r = 1; r <= rmax; ++r) {
        for (int k = 0; k < (int)betti.size(); ++k)
            if (cur_sums[k] < betti[k])
                throw theorem_violation("page " + std::to_string(r) +
                                        " graded sum fell below total cohomology");
        PageTable<S> next = page_table<S>(K, r + 1);
        for (auto& [pq, d] : next.dims)
            if (d > cur.dims.at(pq))
                throw theorem_violation("page dimension grew at " +
                                        at_bidegree(pq.first, pq.second, r + 1));
        std::vector<int> next_sums = graded_sums(next);
        record(r + 1, next_sums);
        rep.page_dims[r + 1] = next.dims;
        if (cur.dims == next.dims && cur_sums == betti) {
            rep.degeneration_index = r;
            return rep;
        }
        cur = std::move(next);
        cur_sums = std::move(next_sums);
    }
    throw theorem_violation("stabilized pages disagree with total cohomology");
}

template Bicomplex<ExactC> make_bicomplex<ExactC>(const DoubleComplex&);
template Bicomplex<FloatC> make_bicomplex<FloatC>(const DoubleComplex&);
template Bicomplex<ExactC> make_bicomplex<ExactC>(const FoliatedComplex&);
template Bicomplex<FloatC> make_bicomplex<FloatC>(const FoliatedComplex&);
template Subspace<ExactC> zigzag_space<ExactC>(const BicomplexQ&, int, int, int);
template Subspace<FloatC> zigzag_space<FloatC>(const BicomplexF&, int, int, int);
template Subspace<ExactC> boundary_space<ExactC>(const BicomplexQ&, int, int, int);
template Subspace<FloatC> boundary_space<FloatC>(const BicomplexF&, int, int, int);
template PageTable<ExactC> page_table<ExactC>(const BicomplexQ&, int, bool);
template PageTable<FloatC> page_table<FloatC>(const BicomplexF&, int, bool);
template std::vector<int> total_cohomology<ExactC>(const BicomplexQ&);
template std::vector<int> total_cohomology<FloatC>(const BicomplexF&);
template ConvergenceReport degeneration_index<ExactC>(const BicomplexQ&);
template ConvergenceReport degeneration_index<FloatC>(const BicomplexF&);

} // namespace hodgelab
