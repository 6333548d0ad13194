#include "qumera/oracle.hpp"

#include <cmath>

namespace qumera {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t digit(std::size_t index, std::size_t stride, std::size_t d) {
    return (index / stride) % d;
}

// amp over n equal digits, site j replaced by two digits weighted by
// lam^u_{a,b}; digit order becomes (..., a, b, ...).
std::vector<cplx> split_site(const std::vector<cplx>& amp, std::size_t n, std::size_t d,
                             std::size_t j, const ComplexTensor& lam) {
    std::size_t post = ipow(d, n - 1 - j);
    std::size_t pre = amp.size() / (post * d);
    std::vector<cplx> out(amp.size() * d, cplx(0.0, 0.0));
    for (std::size_t p = 0; p < pre; ++p)
        for (std::size_t u = 0; u < d; ++u)
            for (std::size_t s = 0; s < post; ++s) {
                cplx v = amp[(p * d + u) * post + s];
                if (v == cplx(0.0, 0.0)) continue;
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = 0; b < d; ++b) {
                        cplx w = lam.at({u, a, b});
                        if (w != cplx(0.0, 0.0))
                            out[((p * d + a) * d + b) * post + s] += w * v;
                    }
            }
    return out;
}

// In-place two-site linear map: new(l1,l2) = sum_{u1,u2} W[(l1 l2),(u1 u2)] old(u1,u2)
// on digits at positions p and q (distinct, possibly wrapped order).
void apply_two_site(std::vector<cplx>& amp, std::size_t n, std::size_t d, std::size_t p,
                    std::size_t q, const Eigen::MatrixXcd& w) {
    std::size_t sp = ipow(d, n - 1 - p);
    std::size_t sq = ipow(d, n - 1 - q);
    std::vector<cplx> buf(d * d);
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if (digit(i, sp, d) != 0 || digit(i, sq, d) != 0) continue;
        for (std::size_t u1 = 0; u1 < d; ++u1)
            for (std::size_t u2 = 0; u2 < d; ++u2) buf[u1 * d + u2] = amp[i + u1 * sp + u2 * sq];
        for (std::size_t l1 = 0; l1 < d; ++l1)
            for (std::size_t l2 = 0; l2 < d; ++l2) {
                cplx acc(0.0, 0.0);
                for (std::size_t u = 0; u < d * d; ++u)
                    acc += w(static_cast<Eigen::Index>(l1 * d + l2), static_cast<Eigen::Index>(u)) *
                           buf[u];
                amp[i + l1 * sp + l2 * sq] = acc;
            }
    }
}

Eigen::MatrixXcd chi_matrix(const MeraSpec& spec) {
    const std::size_t d = spec.d;
    Eigen::MatrixXcd w(d * d, d * d); // rows (l1 l2), cols (u1 u2)
    for (std::size_t u1 = 0; u1 < d; ++u1)
        for (std::size_t u2 = 0; u2 < d; ++u2)
            for (std::size_t l1 = 0; l1 < d; ++l1)
                for (std::size_t l2 = 0; l2 < d; ++l2)
                    w(static_cast<Eigen::Index>(l1 * d + l2),
                      static_cast<Eigen::Index>(u1 * d + u2)) = spec.chi.at({u1, u2, l1, l2});
    return w;
}

} // namespace

FullState build_state(const MeraSpec& spec, std::size_t N) {
    require_valid(spec);
    if (!is_power_of_two(N) || N < 8)
        throw structural_error("site count must be a power of two, at least 8");
    double amps = std::pow(static_cast<double>(spec.d), static_cast<double>(N));
    if (amps > static_cast<double>(kOracleAmplitudeGuard))
        throw refusal("oracle state would need d^N > 2^24 amplitudes",
                      "resource guard: d^N <= 2^24");

    const std::size_t d = spec.d;
    std::size_t m = 0;
    while ((std::size_t{4} << m) < N) ++m;

    FullState psi;
    psi.N = N;
    psi.d = d;
    psi.amp = spec.hat.data(); // 4-site top row

    Eigen::MatrixXcd w = chi_matrix(spec);
    std::size_t t = 4;
    for (std::size_t layer = m; layer >= 1; --layer) {
        // isometries: split every site, last to first so positions stay valid
        std::vector<cplx> amp = psi.amp;
        for (std::size_t j = t; j-- > 0;) amp = split_site(amp, t + (t - 1 - j), d, j, spec.lam);
        // disentanglers on pairs (2i+1, 2i+2) of the doubled row
        std::size_t rows = 2 * t;
        for (std::size_t i = 0; i < t; ++i)
            apply_two_site(amp, rows, d, (2 * i + 1) % rows, (2 * i + 2) % rows, w);
        psi.amp = std::move(amp);
        t = rows;
    }
    return psi;
}

double state_norm(const FullState& psi) {
    double s = 0.0;
    for (const cplx& v : psi.amp) s += std::norm(v);
    return std::sqrt(s);
}

namespace {

cplx sites_expectation(const FullState& psi, const std::vector<std::size_t>& sites,
                       const Eigen::MatrixXcd& op) {
    const std::size_t d = psi.d;
    const std::size_t k = sites.size();
    const std::size_t dk = ipow(d, k);
    if (op.rows() != static_cast<Eigen::Index>(dk) || op.cols() != static_cast<Eigen::Index>(dk))
        throw structural_error("operator dimension does not match site count");

    std::vector<std::size_t> stride(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (sites[j] >= psi.N) throw structural_error("site out of range");
        stride[j] = ipow(d, psi.N - 1 - sites[j]);
    }

    std::vector<cplx> v(dk);
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < psi.amp.size(); ++i) {
        bool base = true;
        for (std::size_t j = 0; j < k && base; ++j)
            if (digit(i, stride[j], d) != 0) base = false;
        if (!base) continue;
        for (std::size_t x = 0; x < dk; ++x) {
            std::size_t off = i, xx = x;
            for (std::size_t j = k; j-- > 0;) {
                off += (xx % d) * stride[j];
                xx /= d;
            }
            v[x] = psi.amp[off];
        }
        for (std::size_t x = 0; x < dk; ++x) {
            cplx row(0.0, 0.0);
            for (std::size_t y = 0; y < dk; ++y)
                row += op(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) * v[y];
            acc += std::conj(v[x]) * row;
        }
    }
    return acc;
}

std::vector<std::size_t> triple_sites(const FullState& psi, std::size_t k) {
    if (k < 1 || k > psi.N) throw structural_error("site out of range");
    std::size_t p = k - 1;
    return {(p + psi.N - 1) % psi.N, p, (p + 1) % psi.N};
}

} // namespace

cplx window_expectation(const FullState& psi, std::size_t start, std::size_t len,
                        const Eigen::MatrixXcd& op) {
    std::vector<std::size_t> sites(len);
    for (std::size_t j = 0; j < len; ++j) sites[j] = (start + j) % psi.N;
    return sites_expectation(psi, sites, op);
}

cplx direct_expectation(const FullState& psi, std::size_t k, const Eigen::MatrixXcd& a) {
    return sites_expectation(psi, triple_sites(psi, k), a);
}

cplx direct_correlator(const FullState& psi, std::size_t k, std::size_t kp,
                       const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    std::size_t diff = (k > kp) ? k - kp : kp - k;
    std::size_t dist = std::min(diff, psi.N - diff);
    if (dist < 3) throw structural_error("correlator triples overlap");
    std::vector<std::size_t> sites = triple_sites(psi, k);
    std::vector<std::size_t> sb = triple_sites(psi, kp);
    sites.insert(sites.end(), sb.begin(), sb.end());
    return sites_expectation(psi, sites, kron(a, b));
}

Eigen::MatrixXcd reduced_density(const FullState& psi, const std::vector<std::size_t>& sites) {
    const std::size_t d = psi.d;
    const std::size_t k = sites.size();
    const std::size_t dk = ipow(d, k);

    std::vector<std::size_t> stride(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (sites[j] >= psi.N) throw structural_error("site out of range");
        stride[j] = ipow(d, psi.N - 1 - sites[j]);
    }

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
    std::vector<cplx> v(dk);
    for (std::size_t i = 0; i < psi.amp.size(); ++i) {
        bool base = true;
        for (std::size_t j = 0; j < k && base; ++j)
            if (digit(i, stride[j], d) != 0) base = false;
        if (!base) continue;
        for (std::size_t x = 0; x < dk; ++x) {
            std::size_t off = i, xx = x;
            for (std::size_t j = k; j-- > 0;) {
                off += (xx % d) * stride[j];
                xx /= d;
            }
            v[x] = psi.amp[off];
        }
        for (std::size_t x = 0; x < dk; ++x)
            for (std::size_t y = 0; y < dk; ++y)
                rho(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +=
                    v[x] * std::conj(v[y]);
    }
    return rho;
}

Eigen::MatrixXcd triple_density_oracle(const FullState& psi, std::size_t k) {
    return reduced_density(psi, triple_sites(psi, k));
}

FullState invert_bottom_layer(const MeraSpec& spec, const FullState& psi) {
    require_valid(spec);
    const std::size_t d = spec.d;
    const std::size_t N = psi.N;
    if (N < 16) throw structural_error("nothing to invert below 16 sites");

    std::vector<cplx> amp = psi.amp;
    Eigen::MatrixXcd w = chi_matrix(spec);
    Eigen::MatrixXcd winv = w.adjoint(); // rows (u1 u2), cols (l1 l2)
    std::size_t t = N / 2;
    for (std::size_t i = 0; i < t; ++i)
        apply_two_site(amp, N, d, (2 * i + 1) % N, (2 * i + 2) % N, winv);

    // contract isometry pairs (2i, 2i+1) right to left
    for (std::size_t i = t; i-- > 0;) {
        std::size_t n = t + i + 1; // digits before contracting pair at (2i, 2i+1)
        std::size_t post = ipow(d, n - 2 - 2 * i);
        std::size_t pre = amp.size() / (post * d * d);
        std::vector<cplx> out(amp.size() / d, cplx(0.0, 0.0));
        for (std::size_t p = 0; p < pre; ++p)
            for (std::size_t u = 0; u < d; ++u)
                for (std::size_t s = 0; s < post; ++s) {
                    cplx acc(0.0, 0.0);
                    for (std::size_t a = 0; a < d; ++a)
                        for (std::size_t b = 0; b < d; ++b)
                            acc += std::conj(spec.lam.at({u, a, b})) *
                                   amp[((p * d + a) * d + b) * post + s];
                    out[(p * d + u) * post + s] = acc;
                }
        amp = std::move(out);
    }

    FullState up;
    up.N = N / 2;
    up.d = d;
    up.amp = std::move(amp);
    return up;
}

} // namespace qumera
