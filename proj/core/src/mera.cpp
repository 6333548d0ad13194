#include "qumera/mera.hpp"

#include <cmath>

#include "qumera/random.hpp"

namespace qumera {

namespace {

void check_shapes(const MeraSpec& spec) {
    const std::size_t d = spec.d;
    if (d < 2) throw structural_error("local dimension must be >= 2");
    std::vector<std::size_t> four{d, d, d, d}, three{d, d, d};
    if (spec.chi.shape() != four)
        throw structural_error("chi must have shape (d,d,d,d)");
    if (spec.lam.shape() != three)
        throw structural_error("lam must have shape (d,d,d)");
    if (spec.hat.shape() != four)
        throw structural_error("hat must have shape (d,d,d,d)");
    if (!spec.chi.all_finite() || !spec.lam.all_finite() || !spec.hat.all_finite())
        throw structural_error("spec tensors contain non-finite entries");
}

} // namespace

ValidationReport validate(const MeraSpec& spec, double tol) {
    check_shapes(spec);
    const std::size_t d = spec.d;

    Eigen::MatrixXcd u = matrix_view(spec.chi, {0, 1}, {2, 3}).mat;
    Eigen::MatrixXcd v = matrix_view(spec.lam, {1, 2}, {0}).mat; // rows (l1 l2), cols u
    Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(d * d, d * d);
    Eigen::MatrixXcd id1 = Eigen::MatrixXcd::Identity(d, d);

    ValidationReport r;
    r.tol = tol;
    r.chi_left = (u.adjoint() * u - id2).norm();
    r.chi_right = (u * u.adjoint() - id2).norm();
    r.lam_iso = (v.adjoint() * v - id1).norm();
    r.hat_norm = std::abs(spec.hat.norm() - 1.0);
    r.pass = r.chi_left <= tol && r.chi_right <= tol && r.lam_iso <= tol && r.hat_norm <= tol;
    return r;
}

void require_valid(const MeraSpec& spec, double tol) {
    ValidationReport r = validate(spec, tol);
    if (!r.pass)
        throw validation_error("spec fails constraints: ||chi^dag chi - I|| = " +
                               std::to_string(r.chi_left) + ", ||chi chi^dag - I|| = " +
                               std::to_string(r.chi_right) + ", ||V^dag V - I|| = " +
                               std::to_string(r.lam_iso) + ", | ||hat|| - 1 | = " +
                               std::to_string(r.hat_norm));
}

HatDensities hat_densities(const MeraSpec& spec) {
    require_valid(spec);
    const std::size_t d = spec.d;
    const std::size_t d3 = d * d * d;

    HatDensities out;
    out.avg = Eigen::MatrixXcd::Zero(d3, d3);

    for (std::size_t e = 0; e < 4; ++e) { // e = excluded leg, 0-based
        std::array<std::size_t, 3> kept{(e + 1) % 4, (e + 2) % 4, (e + 3) % 4};
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d3, d3);
        std::vector<std::size_t> xi(4, 0), yi(4, 0);
        for (std::size_t x = 0; x < d3; ++x) {
            xi[kept[0]] = x / (d * d);
            xi[kept[1]] = (x / d) % d;
            xi[kept[2]] = x % d;
            for (std::size_t y = 0; y < d3; ++y) {
                yi[kept[0]] = y / (d * d);
                yi[kept[1]] = (y / d) % d;
                yi[kept[2]] = y % d;
                cplx acc(0.0, 0.0);
                for (std::size_t t = 0; t < d; ++t) {
                    xi[e] = t;
                    yi[e] = t;
                    acc += spec.hat.at(xi) * std::conj(spec.hat.at(yi));
                }
                rho(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = acc;
            }
        }
        double trace_err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
        if (trace_err > kDefaultTol)
            throw validation_error("hat reduced density has trace off by " +
                                   std::to_string(trace_err));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((rho + rho.adjoint()) / 2.0);
        if (es.eigenvalues().minCoeff() < -kDefaultTol)
            throw validation_error("hat reduced density not positive semidefinite");
        out.rho[e] = rho;
        out.avg += rho / 4.0;
    }
    return out;
}

namespace {

ComplexTensor chi_from_matrix(const Eigen::MatrixXcd& u, std::size_t d) {
    return from_matrix(u, {d, d}, {d, d}); // legs (u1,u2,l1,l2)
}

ComplexTensor lam_from_isometry(const Eigen::MatrixXcd& v, std::size_t d) {
    // v is d^2 x d with rows (l1 l2); lam legs are (u,l1,l2)
    ComplexTensor lam({d, d, d});
    for (std::size_t u = 0; u < d; ++u)
        for (std::size_t l1 = 0; l1 < d; ++l1)
            for (std::size_t l2 = 0; l2 < d; ++l2)
                lam.at({u, l1, l2}) = v(static_cast<Eigen::Index>(l1 * d + l2),
                                        static_cast<Eigen::Index>(u));
    return lam;
}

} // namespace

MeraSpec random_spec(std::size_t d, std::uint64_t seed) {
    if (d < 2) throw structural_error("local dimension must be >= 2");
    Rng rng(seed);

    MeraSpec spec;
    spec.d = d;
    spec.chi = chi_from_matrix(rng.haar_unitary(d * d), d);
    Eigen::MatrixXcd u = rng.haar_unitary(d * d);
    spec.lam = lam_from_isometry(u.leftCols(static_cast<Eigen::Index>(d)), d);

    ComplexTensor hat({d, d, d, d});
    for (cplx& v : hat.data()) v = rng.gaussian_cplx();
    double n = hat.norm();
    for (cplx& v : hat.data()) v /= n;
    spec.hat = hat;
    return spec;
}

MeraSpec with_random_hat(const MeraSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    MeraSpec out = spec;
    ComplexTensor hat({spec.d, spec.d, spec.d, spec.d});
    for (cplx& v : hat.data()) v = rng.gaussian_cplx();
    double n = hat.norm();
    for (cplx& v : hat.data()) v /= n;
    out.hat = hat;
    return out;
}

MeraSpec embedding_spec(std::size_t d) {
    MeraSpec spec;
    spec.d = d;
    spec.chi = ComplexTensor({d, d, d, d});
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) spec.chi.at({a, b, a, b}) = 1.0;
    spec.lam = ComplexTensor({d, d, d});
    for (std::size_t u = 0; u < d; ++u) spec.lam.at({u, u, 0}) = 1.0;
    spec.hat = ComplexTensor({d, d, d, d});
    spec.hat.at({0, 0, 0, 0}) = 1.0;
    return spec;
}

MeraSpec copy_spec(std::size_t d) {
    MeraSpec spec = embedding_spec(d);
    spec.lam = ComplexTensor({d, d, d});
    for (std::size_t u = 0; u < d; ++u) spec.lam.at({u, u, u}) = 1.0;
    return spec;
}

MeraSpec mirror_symmetric_spec(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t d2 = d * d;

    Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(d2, d2);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            swap(static_cast<Eigen::Index>(a * d + b), static_cast<Eigen::Index>(b * d + a)) = 1.0;

    // chi = exp(iH) with H swap-covariant, so chi commutes with mirroring
    Eigen::MatrixXcd g = rng.hermitian(d2);
    Eigen::MatrixXcd h = (g + swap * g * swap) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(d2);
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(cplx(0.0, es.eigenvalues()(i)));
    Eigen::MatrixXcd chi_mat =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    // lam columns drawn inside the symmetric subspace, then orthonormalized
    Eigen::MatrixXcd w = ((Eigen::MatrixXcd::Identity(d2, d2) + swap) / 2.0) *
                         rng.gaussian_matrix(d2, d);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
    Eigen::MatrixXcd v = qr.householderQ() * Eigen::MatrixXcd::Identity(d2, d);

    MeraSpec spec;
    spec.d = d;
    spec.chi = chi_from_matrix(chi_mat, d);
    spec.lam = lam_from_isometry(v, d);

    ComplexTensor hat({d, d, d, d});
    for (cplx& x : hat.data()) x = rng.gaussian_cplx();
    double n = hat.norm();
    for (cplx& x : hat.data()) x /= n;
    spec.hat = hat;
    return spec;
}

MeraSpec symmetric_transfer_spec(std::uint64_t seed) {
    const std::size_t d = 3;
    Rng rng(seed);

    double t[3][3][3];
    for (auto& p : t)
        for (auto& q : p)
            for (double& v : q) v = rng.gaussian();

    auto symmetrize = [&]() {
        double s[3][3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    s[a][b][c] = (t[a][b][c] + t[a][c][b] + t[b][a][c] + t[b][c][a] +
                                  t[c][a][b] + t[c][b][a]) /
                                 6.0;
        std::copy(&s[0][0][0], &s[0][0][0] + 27, &t[0][0][0]);
    };

    // alternate full symmetrization with the polar retraction onto isometries;
    // both sets are smooth and generically transversal, so this converges
    Eigen::MatrixXd v(9, 3);
    for (int it = 0; it < 2000; ++it) {
        symmetrize();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int u = 0; u < 3; ++u) v(3 * a + b, u) = t[a][b][u];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::MatrixXd p = svd.matrixU() * svd.matrixV().transpose();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int u = 0; u < 3; ++u) t[a][b][u] = p(3 * a + b, u);
    }
    double sym_res = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                sym_res = std::max(sym_res, std::abs(t[a][b][c] - t[b][a][c]) +
                                                std::abs(t[a][b][c] - t[a][c][b]));
    if (sym_res > 1e-12)
        throw structural_error("symmetric isometry construction did not converge");

    MeraSpec spec;
    spec.d = d;
    spec.chi = ComplexTensor({d, d, d, d});
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) spec.chi.at({x, y, y, x}) = 1.0; // SWAP

    spec.lam = ComplexTensor({d, d, d});
    for (std::size_t u = 0; u < d; ++u)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) spec.lam.at({u, a, b}) = t[a][b][u];

    Rng hr(seed + 1);
    ComplexTensor hat({d, d, d, d});
    for (cplx& x : hat.data()) x = hr.gaussian_cplx();
    double n = hat.norm();
    for (cplx& x : hat.data()) x /= n;
    spec.hat = hat;
    return spec;
}

} // namespace qumera
