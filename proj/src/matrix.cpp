#include "hodgelab/matrix.hpp"

namespace hodgelab {

MatF to_float(const MatQ& m) {
    MatF r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).to_float();
    return r;
}

double max_abs(const MatF& m) {
    double mx = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) mx = std::max(mx, std::abs(m(i, j)));
    return mx;
}

double fro_norm(const MatF& m) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

void check_finite(const MatF& m) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const FloatC& v = m(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numeric_error("non-finite matrix entry");
        }
}

Eigen::MatrixXcd to_eigen(const MatF& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

MatF from_eigen(const Eigen::MatrixXcd& e) {
    MatF m((int)e.rows(), (int)e.cols());
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < e.cols(); ++j) m((int)i, (int)j) = e(i, j);
    return m;
}

} // namespace hodgelab
