#include "qumera/channels.hpp"

#include <algorithm>
#include <cmath>

namespace qumera {

Channel single_channel(const MeraSpec& spec, Modality modality, Picture picture) {
    Channel ch;
    ch.picture = picture;
    ch.d = spec.d;
    ch.families.emplace_back(1.0, kraus_set(spec, modality, picture));
    return ch;
}

Channel averaged_channel(const MeraSpec& spec, Picture picture) {
    Channel ch;
    ch.picture = picture;
    ch.d = spec.d;
    ch.families.emplace_back(0.5, kraus_set(spec, Modality::L, picture));
    ch.families.emplace_back(0.5, kraus_set(spec, Modality::R, picture));
    return ch;
}

Eigen::MatrixXcd Channel::apply(const Eigen::MatrixXcd& x) const {
    const auto n = static_cast<Eigen::Index>(dim());
    if (x.rows() != n || x.cols() != n)
        throw structural_error("channel input dimension mismatch");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [w, set] : families)
        for (const Eigen::MatrixXcd& k : set.ops) out.noalias() += w * (k * x * k.adjoint());
    return out;
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& a) {
    const Eigen::Index n = a.rows();
    Eigen::VectorXcd v(n * a.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
    return v;
}

Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) throw structural_error("devectorize needs a square length");
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = v(i * n + j);
    return a;
}

std::string to_string(MixingVerdict v) {
    switch (v) {
        case MixingVerdict::Mixing: return "mixing";
        case MixingVerdict::NonMixing: return "non-mixing";
        default: return "indeterminate";
    }
}

TransferMatrix::TransferMatrix(Eigen::MatrixXcd mat, Channel source)
    : mat_(std::move(mat)), source_(std::move(source)) {}

const SpectralData& TransferMatrix::spectral(double tol) const {
    if (!cache_ || cache_tol_ != tol) {
        cache_ = std::make_shared<const SpectralData>(spectrum(*this, tol));
        cache_tol_ = tol;
    }
    return *cache_;
}

TransferMatrix transfer_matrix(const Channel& ch) {
    const auto n = static_cast<Eigen::Index>(ch.dim());
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (const auto& [w, set] : ch.families)
        for (const Eigen::MatrixXcd& k : set.ops) e.noalias() += w * kron(k, k.conjugate());
    return TransferMatrix(std::move(e), ch);
}

SpectralData spectrum(const TransferMatrix& tm, double tol) {
    const Eigen::MatrixXcd& e = tm.mat();
    const Eigen::Index n = e.rows();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(e, true);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("transfer matrix eigensolver failed");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    const auto& ev = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        double ma = std::abs(ev(a)), mb = std::abs(ev(b));
        if (ma != mb) return ma > mb;
        if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
        return ev(a).imag() > ev(b).imag();
    });

    SpectralData sd;
    sd.tol = tol;
    sd.eigenvalues.reserve(static_cast<std::size_t>(n));
    sd.right_vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sd.eigenvalues.push_back(ev(order[static_cast<std::size_t>(i)]));
        sd.right_vectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    }

    // rows of the inverse of the right-vector matrix are left eigenvectors
    // with matching order; skip when the eigenbasis is too ill-conditioned
    {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sd.right_vectors);
        Eigen::MatrixXcd inv = lu.inverse();
        if ((sd.right_vectors * inv - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-6)
            sd.left_vectors = inv;
    }

    sd.unit_circle_ok = true;
    for (const cplx& eta : sd.eigenvalues)
        if (std::abs(eta) > 1.0 + 1e-9) sd.unit_circle_ok = false;

    std::vector<std::size_t> cluster;
    double max_other = 0.0;
    bool other_near_circle = false;
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
        if (std::abs(sd.eigenvalues[i] - cplx(1.0, 0.0)) <= tol) {
            cluster.push_back(i);
        } else {
            double mod = std::abs(sd.eigenvalues[i]);
            max_other = std::max(max_other, mod);
            if (mod >= 1.0 - tol) other_near_circle = true;
        }
    }
    sd.one_in_spectrum = !cluster.empty();
    sd.subleading_modulus = max_other;

    // geometric multiplicity of the unit eigenvalue from the rank of E - I
    std::size_t geo_mult = 0;
    if (!cluster.empty()) {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(e - Eigen::MatrixXcd::Identity(n, n));
        const auto& s = svd.singularValues();
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) <= tol) ++geo_mult;
    }
    sd.ergodic = (cluster.size() == 1 && geo_mult == 1);

    if (!sd.one_in_spectrum) {
        sd.verdict = MixingVerdict::Indeterminate;
    } else if (!sd.ergodic) {
        sd.verdict = MixingVerdict::NonMixing;
    } else if (other_near_circle) {
        sd.verdict = MixingVerdict::Indeterminate;
    } else {
        sd.verdict = MixingVerdict::Mixing;
    }

    sd.self_adjoint = (e - e.adjoint()).norm() <= 1e-10 * std::max(1.0, e.norm());

    if (sd.ergodic) {
        Eigen::VectorXcd v = sd.right_vectors.col(static_cast<Eigen::Index>(cluster.front()));
        Eigen::MatrixXcd x = devectorize(v);
        Eigen::MatrixXcd h = (x + x.adjoint()) / 2.0;
        cplx tr = h.trace();
        if (std::abs(tr) < 1e-12)
            throw refusal("unit eigenvector has vanishing trace", to_string(sd.verdict));
        h /= tr;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        if (es.eigenvalues().minCoeff() < -1e-8)
            throw refusal("fixed point not positive semidefinite", to_string(sd.verdict));
        sd.fixed_point = h;
        Eigen::VectorXcd fv = vectorize(h);
        sd.fixed_point_residual = (e * fv - fv).norm();
    }
    return sd;
}

Eigen::MatrixXcd power(const TransferMatrix& tm, unsigned m) {
    const Eigen::Index n = tm.mat().rows();
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd base = tm.mat();
    while (m > 0) {
        if (m & 1u) result = (result * base).eval();
        base = (base * base).eval();
        m >>= 1u;
    }
    return result;
}

Eigen::MatrixXcd asymptote(const TransferMatrix& tm) {
    const SpectralData& sd = tm.spectral();
    if (sd.verdict != MixingVerdict::Mixing)
        throw refusal("asymptote requires a mixing channel", to_string(sd.verdict));
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(tm.dim()))));
    Eigen::VectorXcd rho = vectorize(*sd.fixed_point);
    Eigen::VectorXcd one = vectorize(Eigen::MatrixXcd::Identity(n, n));
    return rho * one.adjoint();
}

} // namespace qumera
