#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hodgelab/matrix.hpp"

namespace hodgelab {

// Seeded random data for tests and reports. The raw stream is mt19937_64;
// doubles are mapped from the bits directly so a seed pins every byte of
// downstream output, independent of library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return std::ldexp((double)(gen_() >> 11), -53); }
    double symmetric() { return 2.0 * uniform01() - 1.0; }
    int below(int n) { return (int)(gen_() % (std::uint64_t)n); }

    FloatC cplx() {
        double re = symmetric();
        double im = symmetric();
        return FloatC(re, im);
    }

    MatF matrix(int r, int c) {
        MatF m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = cplx();
        return m;
    }

    MatF vector(int r) { return matrix(r, 1); }

    MatQ vector_exact(int r) {
        MatQ v(r, 1);
        for (int i = 0; i < r; ++i) {
            long re = below(7) - 3;
            long im = below(7) - 3;
            v(i, 0) = ExactC(mpq_class(re), mpq_class(im));
        }
        return v;
    }

    // Hermitian positive definite, eigenvalues in [1, 1 + 2n]
    MatF pd_matrix(int n) {
        MatF A = matrix(n, n);
        return A * A.hconj() + MatF::identity(n);
    }

    // Gaussian-integer analogue of pd_matrix
    MatQ pd_matrix_exact(int n) {
        MatQ A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long re = below(5) - 2;
                long im = below(5) - 2;
                A(i, j) = ExactC(mpq_class(re), mpq_class(im));
            }
        return A * A.hconj() + MatQ::identity(n);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace hodgelab
