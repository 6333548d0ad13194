#include "qumera/random.hpp"

#include <cmath>

namespace qumera {

double Rng::uniform() {
    // 53-bit mantissa from the top bits
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

cplx Rng::gaussian_cplx() {
    double re = gaussian();
    double im = gaussian();
    return cplx(re, im) / std::sqrt(2.0);
}

Eigen::MatrixXcd Rng::gaussian_matrix(std::size_t rows, std::size_t cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gaussian_cplx();
    return m;
}

Eigen::MatrixXcd Rng::hermitian(std::size_t n) {
    Eigen::MatrixXcd g = gaussian_matrix(n, n);
    return (g + g.adjoint()) / 2.0;
}

Eigen::MatrixXcd Rng::haar_unitary(std::size_t n) {
    Eigen::MatrixXcd g = gaussian_matrix(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        cplx rii = r(i, i);
        double a = std::abs(rii);
        cplx phase = (a > 0.0) ? rii / a : cplx(1.0, 0.0);
        q.col(i) *= phase;
    }
    return q;
}

} // namespace qumera
