#pragma once

#include <complex>
#include <string>
#include <gmpxx.h>

#include "hodgelab/error.hpp"

namespace hodgelab {

using FloatC = std::complex<double>;

// Exact complex scalar with rational real and imaginary parts.
struct ExactC {
    mpq_class re, im;

    ExactC() : re(0), im(0) {}
    ExactC(long r) : re(r), im(0) {}
    ExactC(long num, long den) : re(num, den), im(0) { re.canonicalize(); }
    ExactC(mpq_class r) : re(std::move(r)), im(0) {}
    ExactC(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static ExactC i() { return ExactC(mpq_class(0), mpq_class(1)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    ExactC conj() const { return ExactC(re, -im); }

    FloatC to_float() const { return FloatC(re.get_d(), im.get_d()); }

    ExactC& operator+=(const ExactC& o) { re += o.re; im += o.im; return *this; }
    ExactC& operator-=(const ExactC& o) { re -= o.re; im -= o.im; return *this; }
    ExactC& operator*=(const ExactC& o) {
        mpq_class r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    ExactC& operator/=(const ExactC& o) {
        mpq_class n = o.re * o.re + o.im * o.im;
        if (sgn(n) == 0) throw numeric_error("exact division by zero");
        mpq_class r = (re * o.re + im * o.im) / n;
        im = (im * o.re - re * o.im) / n;
        re = std::move(r);
        return *this;
    }

    friend ExactC operator+(ExactC a, const ExactC& b) { return a += b; }
    friend ExactC operator-(ExactC a, const ExactC& b) { return a -= b; }
    friend ExactC operator*(ExactC a, const ExactC& b) { return a *= b; }
    friend ExactC operator/(ExactC a, const ExactC& b) { return a /= b; }
    friend ExactC operator-(const ExactC& a) { return ExactC(-a.re, -a.im); }
    friend bool operator==(const ExactC& a, const ExactC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const ExactC& a, const ExactC& b) { return !(a == b); }
};

// Parses "a/b+c/d*i" style literals: signs, bare rationals, "i", "3*i", "-1/2-3/4*i".
ExactC parse_exact(const std::string& text);

// Round-trip format matching parse_exact.
std::string format_exact(const ExactC& v);

// Scalar-compatibility shims so templated code can treat both backends alike.
inline ExactC scalar_conj(const ExactC& v) { return v.conj(); }
inline FloatC scalar_conj(const FloatC& v) { return std::conj(v); }
inline bool scalar_is_zero(const ExactC& v) { return v.is_zero(); }
inline bool scalar_is_zero(const FloatC& v) { return v == FloatC(0.0, 0.0); }
inline FloatC scalar_to_float(const ExactC& v) { return v.to_float(); }
inline FloatC scalar_to_float(const FloatC& v) { return v; }

template <class S> struct scalar_traits;
template <> struct scalar_traits<ExactC> {
    static constexpr bool exact = true;
    static ExactC zero() { return ExactC(); }
    static ExactC one() { return ExactC(1); }
    static ExactC imag_unit() { return ExactC::i(); }
};
template <> struct scalar_traits<FloatC> {
    static constexpr bool exact = false;
    static FloatC zero() { return FloatC(0.0, 0.0); }
    static FloatC one() { return FloatC(1.0, 0.0); }
    static FloatC imag_unit() { return FloatC(0.0, 1.0); }
};

} // namespace hodgelab
