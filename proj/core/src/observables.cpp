#include "qumera/observables.hpp"

#include <algorithm>
#include <cmath>

#include "qumera/oracle.hpp"

namespace qumera {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

bool hermitian_enough(const Eigen::MatrixXcd& a) {
    return (a - a.adjoint()).norm() <= 1e-12 * std::max(1.0, a.norm());
}

long floordiv2(long x) { return (x >= 0) ? x / 2 : -((-x + 1) / 2); }

std::size_t pmod(long x, long n) {
    long r = x % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

// ----- level-8 state built by explicit contraction of hat + one layer -----

ComplexTensor psi8_tensor(const MeraSpec& spec) {
    ComplexTensor t = spec.hat;
    for (int j = 0; j < 4; ++j) t = contract(t, spec.lam, {{0, 0}});
    // legs now (a0,b0,a1,b1,a2,b2,a3,b3) in spatial order; slot[i] tracks the
    // spatial position of tensor leg i through the disentangler contractions
    std::vector<std::size_t> slot{0, 1, 2, 3, 4, 5, 6, 7};
    for (std::size_t i = 0; i < 4; ++i) {
        std::size_t p = (2 * i + 1) % 8, q = (2 * i + 2) % 8;
        std::size_t ip = 0, iq = 0;
        for (std::size_t l = 0; l < slot.size(); ++l) {
            if (slot[l] == p) ip = l;
            if (slot[l] == q) iq = l;
        }
        t = contract(t, spec.chi, {{ip, 0}, {iq, 1}});
        std::vector<std::size_t> next;
        for (std::size_t l = 0; l < slot.size(); ++l)
            if (l != ip && l != iq) next.push_back(slot[l]);
        next.push_back(p);
        next.push_back(q);
        slot = std::move(next);
    }
    std::vector<std::size_t> perm(8);
    for (std::size_t pos = 0; pos < 8; ++pos)
        for (std::size_t l = 0; l < 8; ++l)
            if (slot[l] == pos) perm[pos] = l;
    return permute(t, perm);
}

// reduced density of a pure state tensor on a cyclic window, window order
Eigen::MatrixXcd pure_marginal(const ComplexTensor& psi, std::size_t start, std::size_t len) {
    std::size_t n = psi.rank();
    std::vector<std::size_t> rows, cols;
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < len; ++j) {
        std::size_t leg = (start + j) % n;
        rows.push_back(leg);
        used[leg] = true;
    }
    for (std::size_t l = 0; l < n; ++l)
        if (!used[l]) cols.push_back(l);
    Eigen::MatrixXcd m = matrix_view(psi, rows, cols).mat;
    return m * m.adjoint();
}

struct StepGeom {
    std::size_t lp = 0;       // parent window length
    std::size_t off = 0;      // child window offset among produced legs
    std::size_t a_parent = 0; // absolute parent window start
};

StepGeom step_geometry(std::size_t row_child, std::size_t a, std::size_t len) {
    long t = static_cast<long>(row_child / 2);
    long i_first = floordiv2(static_cast<long>(a) - 1);
    long i_last = floordiv2(static_cast<long>(a + len) - 2);
    StepGeom g;
    g.lp = static_cast<std::size_t>(i_last - i_first + 2);
    g.off = (a % 2 == 1) ? 1 : 2;
    g.a_parent = pmod(i_first, t);
    return g;
}

// One layer applied to a parent window marginal: isometries under every
// parent site, the disentanglers between them, edges and uncovered lower
// legs traced out.
Eigen::MatrixXcd descend_window(const MeraSpec& spec, const Eigen::MatrixXcd& rho_p,
                                std::size_t lp, std::size_t off, std::size_t len_child) {
    const std::size_t d = spec.d;
    const std::size_t n = 2 * lp; // produced legs
    const std::size_t dp = ipow(d, lp);
    const std::size_t dn = ipow(d, n);
    const std::size_t dw = ipow(d, len_child);
    const std::size_t de = dn / dw;

    if (static_cast<double>(dn) * static_cast<double>(dp) > static_cast<double>(1ull << 24))
        throw refusal("window descent intermediate exceeds 2^24 entries",
                      "resource guard: d^(3 lp) <= 2^24");
    if (rho_p.rows() != static_cast<Eigen::Index>(dp))
        throw structural_error("parent window dimension mismatch");

    std::vector<bool> in_window(n, false);
    for (std::size_t j = 0; j < len_child; ++j) in_window[off + j] = true;

    // row reindexing (env major, window minor)
    std::vector<std::size_t> rowmap(dn);
    {
        std::vector<std::size_t> digits(n);
        for (std::size_t y = 0; y < dn; ++y) {
            std::size_t yy = y;
            for (std::size_t l = n; l-- > 0;) {
                digits[l] = yy % d;
                yy /= d;
            }
            std::size_t w = 0, e = 0;
            for (std::size_t l = 0; l < n; ++l)
                if (in_window[l]) w = w * d + digits[l];
            for (std::size_t l = 0; l < n; ++l)
                if (!in_window[l]) e = e * d + digits[l];
            rowmap[y] = e * dw + w;
        }
    }

    // disentangler matrix, rows (l1 l2), cols (u1 u2)
    Eigen::MatrixXcd wmat(d * d, d * d);
    for (std::size_t u1 = 0; u1 < d; ++u1)
        for (std::size_t u2 = 0; u2 < d; ++u2)
            for (std::size_t l1 = 0; l1 < d; ++l1)
                for (std::size_t l2 = 0; l2 < d; ++l2)
                    wmat(static_cast<Eigen::Index>(l1 * d + l2),
                         static_cast<Eigen::Index>(u1 * d + u2)) = spec.chi.at({u1, u2, l1, l2});

    Eigen::MatrixXcd t_blocked(dn, dp);
    std::vector<cplx> v, next, buf(d * d);
    for (std::size_t x = 0; x < dp; ++x) {
        // product of isometry slices for parent config x
        v.assign(1, cplx(1.0, 0.0));
        std::size_t xx = x;
        std::vector<std::size_t> xdig(lp);
        for (std::size_t j = lp; j-- > 0;) {
            xdig[j] = xx % d;
            xx /= d;
        }
        for (std::size_t j = 0; j < lp; ++j) {
            next.assign(v.size() * d * d, cplx(0.0, 0.0));
            for (std::size_t base = 0; base < v.size(); ++base)
                for (std::size_t a1 = 0; a1 < d; ++a1)
                    for (std::size_t b1 = 0; b1 < d; ++b1)
                        next[(base * d + a1) * d + b1] = v[base] * spec.lam.at({xdig[j], a1, b1});
            v.swap(next);
        }
        // disentanglers on local pairs (2j+1, 2j+2)
        for (std::size_t j = 0; j + 1 < lp; ++j) {
            std::size_t p = 2 * j + 1;
            std::size_t sp = ipow(d, n - 1 - p), sq = sp / d;
            for (std::size_t i = 0; i < dn; ++i) {
                if ((i / sp) % d != 0 || (i / sq) % d != 0) continue;
                for (std::size_t u1 = 0; u1 < d; ++u1)
                    for (std::size_t u2 = 0; u2 < d; ++u2) buf[u1 * d + u2] = v[i + u1 * sp + u2 * sq];
                for (std::size_t l1 = 0; l1 < d; ++l1)
                    for (std::size_t l2 = 0; l2 < d; ++l2) {
                        cplx acc(0.0, 0.0);
                        for (std::size_t u = 0; u < d * d; ++u)
                            acc += wmat(static_cast<Eigen::Index>(l1 * d + l2),
                                        static_cast<Eigen::Index>(u)) * buf[u];
                        v[i + l1 * sp + l2 * sq] = acc;
                    }
            }
        }
        for (std::size_t y = 0; y < dn; ++y)
            t_blocked(static_cast<Eigen::Index>(rowmap[y]), static_cast<Eigen::Index>(x)) = v[y];
    }

    Eigen::MatrixXcd rho_c = Eigen::MatrixXcd::Zero(dw, dw);
    for (std::size_t e = 0; e < de; ++e) {
        Eigen::MatrixXcd k = t_blocked.middleRows(static_cast<Eigen::Index>(e * dw),
                                                  static_cast<Eigen::Index>(dw));
        rho_c.noalias() += k * rho_p * k.adjoint();
    }
    return rho_c;
}

Eigen::MatrixXcd hat_marginal(const MeraSpec& spec, std::size_t start, std::size_t len) {
    ComplexTensor hat = spec.hat;
    return pure_marginal(hat, start, len);
}

Expectation make_expectation(cplx raw, bool herm) {
    Expectation e;
    e.raw = raw;
    e.hermitian_input = herm;
    return e;
}

} // namespace

Eigen::MatrixXcd window_marginal(const MeraSpec& spec, std::size_t n_eff, std::size_t start,
                                 std::size_t len) {
    require_valid(spec);
    if (n_eff < 4 || (n_eff & (n_eff - 1)) != 0)
        throw structural_error("row size must be a power of two, at least 4");
    if (len < 1 || len > 6 || len > n_eff) throw structural_error("window length must be 1..6");
    if (start >= n_eff) throw structural_error("window start out of range");

    if (n_eff == 4) return hat_marginal(spec, start, len);

    ComplexTensor psi8 = psi8_tensor(spec);
    if (n_eff == 8) return pure_marginal(psi8, start, len);

    // window chain up to the 8-site row, then descend
    struct Step {
        std::size_t lp, off, len_child;
    };
    std::vector<Step> steps;
    std::size_t row = n_eff, a = start, l = len;
    while (row > 8) {
        StepGeom g = step_geometry(row, a, l);
        steps.push_back({g.lp, g.off, l});
        a = g.a_parent;
        l = g.lp;
        row /= 2;
    }
    Eigen::MatrixXcd rho = pure_marginal(psi8, a, l);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
        rho = descend_window(spec, rho, it->lp, it->off, it->len_child);
    return rho;
}

Expectation local_expectation(const MeraSpec& spec, std::size_t N, std::size_t k,
                              const Eigen::MatrixXcd& a) {
    Eigen::MatrixXcd rho = triple_density(spec, N, k);
    return make_expectation((rho * a).trace(), hermitian_enough(a));
}

Eigen::MatrixXcd triple_density(const MeraSpec& spec, std::size_t N, std::size_t k) {
    MeraGraph g = build_graph(N);
    ConePath path = cone_path(g, k);
    HatDensities hd = hat_densities(spec);

    Channel left = single_channel(spec, Modality::L, Picture::Schroedinger);
    Channel right = single_channel(spec, Modality::R, Picture::Schroedinger);

    Eigen::MatrixXcd rho = hd.rho[static_cast<std::size_t>(path.hat_leg - 1)];
    for (std::size_t layer = g.m; layer >= 1; --layer) {
        const Channel& ch = (path.modalities[layer - 1] == Modality::L) ? left : right;
        rho = ch.apply(rho);
    }
    return rho;
}

Expectation symmetric_expectation(const MeraSpec& spec, std::size_t N,
                                  const Eigen::MatrixXcd& a) {
    MeraGraph g = build_graph(N);
    HatDensities hd = hat_densities(spec);
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    Eigen::VectorXcd v = power(tm, static_cast<unsigned>(g.m)) * vectorize(hd.avg);
    Eigen::MatrixXcd rho = devectorize(v);
    return make_expectation((rho * a).trace(), hermitian_enough(a));
}

Eigen::MatrixXcd assemble_triple_hamiltonian(std::size_t d, const HamiltonianTerms& terms) {
    const auto d1 = static_cast<Eigen::Index>(d);
    const auto d2 = static_cast<Eigen::Index>(d * d);
    const auto d3 = static_cast<Eigen::Index>(d * d * d);
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d1, d1);

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d3, d3);
    if (terms.h3.size() > 0) {
        if (terms.h3.rows() != d3 || !hermitian_enough(terms.h3))
            throw structural_error("H3 must be Hermitian of dimension d^3");
        h += terms.h3;
    }
    if (terms.h2.size() > 0) {
        if (terms.h2.rows() != d2 || !hermitian_enough(terms.h2))
            throw structural_error("H2 must be Hermitian of dimension d^2");
        h += (kron(terms.h2, id) + kron(id, terms.h2)) / 2.0;
    }
    if (terms.h1.size() > 0) {
        if (terms.h1.rows() != d1 || !hermitian_enough(terms.h1))
            throw structural_error("H1 must be Hermitian of dimension d");
        h += (kron(terms.h1, kron(id, id)) + kron(id, kron(terms.h1, id)) +
              kron(id, kron(id, terms.h1))) /
             3.0;
    }
    return h;
}

Expectation energy_density(const MeraSpec& spec, std::size_t N, const HamiltonianTerms& terms) {
    return symmetric_expectation(spec, N, assemble_triple_hamiltonian(spec.d, terms));
}

Eigen::MatrixXcd shadow_pair_state(const MeraSpec& spec, std::size_t N, std::size_t k_a,
                                   std::size_t depth) {
    MeraGraph g = build_graph(N);
    if (depth < 1 || depth >= g.m)
        throw structural_error("shadow depth must satisfy 1 <= depth < m");
    std::size_t span = std::size_t{1} << depth;
    if (k_a < 1 || k_a > N || k_a % span != 0)
        throw structural_error("k_A is not the leftmost site of a depth-" + std::to_string(depth) +
                               " shadow");
    std::size_t w = k_a / span - 1;
    return window_marginal(spec, N >> depth, w, 6);
}

namespace {

// S[(a D + a'),(b D + b')] = sigma[(a D + b),(a' D + b')]
Eigen::MatrixXcd two_triple_liouville(const Eigen::MatrixXcd& sigma, std::size_t D) {
    const std::size_t D2 = D * D;
    Eigen::MatrixXcd s(D2, D2);
    for (std::size_t a = 0; a < D; ++a)
        for (std::size_t ap = 0; ap < D; ++ap)
            for (std::size_t b = 0; b < D; ++b)
                for (std::size_t bp = 0; bp < D; ++bp)
                    s(static_cast<Eigen::Index>(a * D + ap), static_cast<Eigen::Index>(b * D + bp)) =
                        sigma(static_cast<Eigen::Index>(a * D + b),
                              static_cast<Eigen::Index>(ap * D + bp));
    return s;
}

cplx evolved_pair_contraction(const TransferMatrix& tm, const Eigen::MatrixXcd& sigma,
                              std::size_t depth, const Eigen::MatrixXcd& a,
                              const Eigen::MatrixXcd& b) {
    const std::size_t D = static_cast<std::size_t>(a.rows());
    Eigen::MatrixXcd s = two_triple_liouville(sigma, D);
    Eigen::MatrixXcd epow = power(tm, static_cast<unsigned>(depth));
    Eigen::MatrixXcd evolved = epow * s * epow.transpose();
    return (vectorize(a).adjoint() * evolved * vectorize(b).conjugate())(0);
}

} // namespace

Expectation evolved_pair_correlator(const MeraSpec& spec, std::size_t depth,
                                    const Eigen::MatrixXcd& sigma, const Eigen::MatrixXcd& a,
                                    const Eigen::MatrixXcd& b) {
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    cplx raw = evolved_pair_contraction(tm, sigma, depth, a, b);
    return make_expectation(raw, hermitian_enough(a) && hermitian_enough(b));
}

Expectation shadow_correlator(const MeraSpec& spec, std::size_t N, std::size_t k_a,
                              std::size_t depth, const Eigen::MatrixXcd& a,
                              const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd sigma = shadow_pair_state(spec, N, k_a, depth);
    return evolved_pair_correlator(spec, depth, sigma, a, b);
}

Expectation symmetric_correlator(const MeraSpec& spec, std::size_t N, std::size_t depth,
                                 const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    MeraGraph g = build_graph(N);
    if (depth < 1 || depth >= g.m)
        throw structural_error("shadow depth must satisfy 1 <= depth < m");
    std::size_t span = std::size_t{1} << depth;
    std::size_t anchors = N >> depth;

    const auto dim = static_cast<Eigen::Index>(ipow(spec.d, 6));
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t w = 0; w < anchors; ++w)
        sigma += shadow_pair_state(spec, N, span * (w + 1), depth);
    sigma /= static_cast<double>(anchors);

    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    cplx raw = evolved_pair_contraction(tm, sigma, depth, a, b);
    return make_expectation(raw, hermitian_enough(a) && hermitian_enough(b));
}

Expectation thermo_expectation(const MeraSpec& spec, const Eigen::MatrixXcd& a) {
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    const SpectralData& sd = tm.spectral();
    if (sd.verdict != MixingVerdict::Mixing)
        throw refusal("thermodynamic expectation requires a mixing channel", to_string(sd.verdict));
    return make_expectation(((*sd.fixed_point) * a).trace(), hermitian_enough(a));
}

AvgDensityCheck avg_triple_density_check(const MeraSpec& spec, std::size_t N,
                                         std::uint64_t hat_seed) {
    MeraGraph g = build_graph(N);
    HatDensities hd = hat_densities(spec);
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    Eigen::MatrixXcd channel_avg =
        devectorize(power(tm, static_cast<unsigned>(g.m)) * vectorize(hd.avg));

    FullState psi = build_state(spec, N);
    const auto dim = static_cast<Eigen::Index>(ipow(spec.d, 3));
    Eigen::MatrixXcd oracle_avg = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t k = 1; k <= N; ++k) oracle_avg += triple_density_oracle(psi, k);
    oracle_avg /= static_cast<double>(N);

    AvgDensityCheck out;
    out.channel_vs_oracle = (channel_avg - oracle_avg).norm();

    const SpectralData& sd = tm.spectral();
    if (sd.verdict != MixingVerdict::Mixing)
        throw refusal("fixed-point comparison requires a mixing channel", to_string(sd.verdict));
    MeraSpec other = with_random_hat(spec, hat_seed);
    TransferMatrix tm2 = transfer_matrix(averaged_channel(other));
    const SpectralData& sd2 = tm2.spectral();
    if (sd2.verdict != MixingVerdict::Mixing)
        throw refusal("fixed-point comparison requires a mixing channel", to_string(sd2.verdict));
    out.hat_independence = ((*sd.fixed_point) - (*sd2.fixed_point)).norm();
    return out;
}

Expectation connected_correlator(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                                 const Eigen::MatrixXcd& b, std::size_t depth,
                                 const Eigen::MatrixXcd& sigma) {
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    const SpectralData& sd = tm.spectral();
    if (sd.verdict != MixingVerdict::Mixing)
        throw refusal("connected correlator requires a mixing channel", to_string(sd.verdict));
    const Eigen::MatrixXcd& rho_f = *sd.fixed_point;
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::MatrixXcd da = a - (rho_f * a).trace() * id;
    Eigen::MatrixXcd db = b - (rho_f * b).trace() * id;
    cplx raw = evolved_pair_contraction(tm, sigma, depth, da, db);
    return make_expectation(raw, hermitian_enough(a) && hermitian_enough(b));
}

std::vector<double> scaling_exponents(const MeraSpec& spec, std::size_t count) {
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    const SpectralData& sd = tm.spectral();
    if (sd.verdict != MixingVerdict::Mixing)
        throw refusal("scaling exponents require a mixing channel", to_string(sd.verdict));

    std::vector<cplx> etas;
    for (const cplx& eta : sd.eigenvalues)
        if (std::abs(eta - cplx(1.0, 0.0)) > sd.tol) etas.push_back(eta);

    std::vector<double> exps;
    for (std::size_t i = 0; i < etas.size(); ++i)
        for (std::size_t j = i; j < etas.size(); ++j) {
            double mod = std::abs(etas[i]) * std::abs(etas[j]);
            if (mod > 0.0) exps.push_back(std::log2(mod));
        }
    std::sort(exps.begin(), exps.end(), std::greater<double>());
    std::vector<double> dedup;
    for (double e : exps)
        if (dedup.empty() || std::abs(dedup.back() - e) > 1e-9) dedup.push_back(e);
    if (dedup.size() > count) dedup.resize(count);
    return dedup;
}

namespace {

struct PairExpansion {
    std::vector<cplx> etas;
    std::vector<bool> unit; // inside the unit cluster
    std::vector<cplx> coeff; // row-major (j, jp)
    double cmax = 0.0;
};

PairExpansion pair_expansion(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& sigma) {
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    const SpectralData& sd = tm.spectral();
    if (sd.verdict != MixingVerdict::Mixing)
        throw refusal("scaling analysis requires a mixing channel", to_string(sd.verdict));
    const Eigen::MatrixXcd& rho_f = *sd.fixed_point;

    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::MatrixXcd da = a - (rho_f * a).trace() * id;
    Eigen::MatrixXcd db = b - (rho_f * b).trace() * id;

    const Eigen::MatrixXcd& v = sd.right_vectors;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
    Eigen::MatrixXcd vinv = lu.inverse();

    const std::size_t D = static_cast<std::size_t>(a.rows());
    Eigen::MatrixXcd s = two_triple_liouville(sigma, D);
    Eigen::MatrixXcd g = vinv * s * vinv.transpose();
    Eigen::RowVectorXcd arow = vectorize(da).adjoint() * v;
    Eigen::VectorXcd bcol = v.transpose() * vectorize(db).conjugate();

    const auto n = static_cast<std::size_t>(v.rows());
    PairExpansion px;
    px.etas = sd.eigenvalues;
    px.unit.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        px.unit[j] = std::abs(sd.eigenvalues[j] - cplx(1.0, 0.0)) <= sd.tol;
    px.coeff.resize(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t jp = 0; jp < n; ++jp) {
            cplx c = arow(static_cast<Eigen::Index>(j)) * g(static_cast<Eigen::Index>(j),
                                                            static_cast<Eigen::Index>(jp)) *
                     bcol(static_cast<Eigen::Index>(jp));
            px.coeff[j * n + jp] = c;
            px.cmax = std::max(px.cmax, std::abs(c));
        }
    return px;
}

} // namespace

DominantPair dominant_scaling_pair(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                                   const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& sigma) {
    PairExpansion px = pair_expansion(spec, a, b, sigma);
    const std::size_t n = px.etas.size();

    DominantPair best;
    double best_mod = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (px.unit[j]) continue;
        for (std::size_t jp = 0; jp < n; ++jp) {
            if (px.unit[jp]) continue;
            if (std::abs(px.coeff[j * n + jp]) <= 1e-10 * std::max(1.0, px.cmax)) continue;
            double mod = std::abs(px.etas[j] * px.etas[jp]);
            if (mod > best_mod) {
                best_mod = mod;
                best.j = static_cast<int>(j);
                best.jp = static_cast<int>(jp);
                best.eta_product = px.etas[j] * px.etas[jp];
                best.coefficient = px.coeff[j * n + jp];
            }
        }
    }
    if (best.j < 0) throw refusal("no contributing eigenvalue pair", "all coefficients vanish");
    best.log2_modulus = std::log2(best_mod);
    return best;
}

ContributionRanking scaling_contribution_ranking(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                                                 const Eigen::MatrixXcd& b,
                                                 const Eigen::MatrixXcd& sigma, unsigned m_ref) {
    PairExpansion px = pair_expansion(spec, a, b, sigma);
    const std::size_t n = px.etas.size();

    // coherent classes of equal eta products
    std::vector<cplx> products;
    std::vector<cplx> class_coeff;
    for (std::size_t j = 0; j < n; ++j) {
        if (px.unit[j]) continue;
        for (std::size_t jp = 0; jp < n; ++jp) {
            if (px.unit[jp]) continue;
            cplx prod = px.etas[j] * px.etas[jp];
            cplx c = px.coeff[j * n + jp];
            bool found = false;
            for (std::size_t q = 0; q < products.size() && !found; ++q)
                if (std::abs(products[q] - prod) < 1e-9) {
                    class_coeff[q] += c;
                    found = true;
                }
            if (!found) {
                products.push_back(prod);
                class_coeff.push_back(c);
            }
        }
    }
    if (products.empty())
        throw refusal("no contributing eigenvalue pair", "all coefficients vanish");

    std::size_t lead = 0;
    double lead_contrib = -1.0, rival = 0.0;
    for (std::size_t q = 0; q < products.size(); ++q) {
        double contrib = std::abs(class_coeff[q]) *
                         std::pow(std::abs(products[q]), static_cast<double>(m_ref));
        if (contrib > lead_contrib) {
            lead_contrib = contrib;
            lead = q;
        }
    }
    for (std::size_t q = 0; q < products.size(); ++q) {
        if (q == lead) continue;
        double contrib = std::abs(class_coeff[q]) *
                         std::pow(std::abs(products[q]), static_cast<double>(m_ref));
        rival = std::max(rival, contrib);
    }

    ContributionRanking r;
    r.product = products[lead];
    r.log2_modulus = std::log2(std::abs(products[lead]));
    r.rival_ratio = (lead_contrib > 0.0) ? rival / lead_contrib : 1.0;
    r.imag_fraction = std::abs(products[lead].imag()) / std::abs(products[lead]);
    return r;
}

cplx oracle_shadow_average(const FullState& psi, std::size_t k_a, std::size_t depth,
                           const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    MeraGraph g = build_graph(psi.N);
    std::size_t span = std::size_t{1} << depth;
    if (k_a % span != 0 || k_a < 1 || k_a > psi.N)
        throw structural_error("k_A is not a shadow anchor");
    std::size_t w = k_a / span - 1;
    std::size_t row = g.row_size(depth);
    Shadow sa = shadow(g, depth, w);
    Shadow sb = shadow(g, depth, (w + 3) % row);

    cplx acc(0.0, 0.0);
    for (std::size_t k : sa.triples)
        for (std::size_t kp : sb.triples) acc += direct_correlator(psi, k, kp, a, b);
    return acc / static_cast<double>(span * span);
}

} // namespace qumera
