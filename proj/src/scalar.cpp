#include "hodgelab/scalar.hpp"

#include <cctype>
#include <sstream>

namespace hodgelab {

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    void skip_ws() { while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos; }
    bool done() { skip_ws(); return pos >= s.size(); }
    char peek() { skip_ws(); return pos < s.size() ? s[pos] : '\0'; }
    char take() { skip_ws(); return s[pos++]; }
};

mpq_class parse_rational(Cursor& c) {
    c.skip_ws();
    size_t start = c.pos;
    while (c.pos < c.s.size() && std::isdigit((unsigned char)c.s[c.pos])) ++c.pos;
    if (c.pos == start) throw input_error("expected digits in scalar literal '" + c.s + "'");
    mpz_class num(c.s.substr(start, c.pos - start));
    if (c.peek() == '/') {
        c.take();
        c.skip_ws();
        size_t dstart = c.pos;
        while (c.pos < c.s.size() && std::isdigit((unsigned char)c.s[c.pos])) ++c.pos;
        if (c.pos == dstart) throw input_error("expected denominator in scalar literal '" + c.s + "'");
        mpz_class den(c.s.substr(dstart, c.pos - dstart));
        if (den == 0) throw input_error("zero denominator in scalar literal '" + c.s + "'");
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
    return mpq_class(num);
}

} // namespace

ExactC parse_exact(const std::string& text) {
    Cursor c{text};
    ExactC out;
    bool any_term = false;
    while (!c.done()) {
        int sign = 1;
        char p = c.peek();
        if (p == '+' || p == '-') {
            if (p == '-') sign = -1;
            c.take();
        } else if (any_term) {
            throw input_error("expected '+' or '-' between terms in scalar literal '" + text + "'");
        }
        bool imag = false;
        mpq_class mag;
        if (c.peek() == 'i' || c.peek() == 'I') {
            c.take();
            imag = true;
            mag = 1;
        } else {
            mag = parse_rational(c);
            if (c.peek() == '*') {
                c.take();
                if (c.peek() != 'i' && c.peek() != 'I')
                    throw input_error("expected 'i' after '*' in scalar literal '" + text + "'");
                c.take();
                imag = true;
            } else if (c.peek() == 'i' || c.peek() == 'I') {
                c.take();
                imag = true;
            }
        }
        if (sign < 0) mag = -mag;
        if (imag) out.im += mag; else out.re += mag;
        any_term = true;
    }
    if (!any_term) throw input_error("empty scalar literal");
    return out;
}

std::string format_exact(const ExactC& v) {
    if (v.is_zero()) return "0";
    std::ostringstream os;
    bool have_re = sgn(v.re) != 0;
    if (have_re) os << v.re.get_str();
    if (sgn(v.im) != 0) {
        mpq_class a = abs(v.im);
        if (sgn(v.im) < 0) os << "-";
        else if (have_re) os << "+";
        if (a != 1) os << a.get_str() << "*";
        os << "i";
    }
    return os.str();
}

} // namespace hodgelab
