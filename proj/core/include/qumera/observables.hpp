#pragma once

#include "qumera/channels.hpp"
#include "qumera/oracle.hpp"

namespace qumera {

// Hermitian observables yield real expectations; the imaginary residue is
// kept as a diagnostic and |imag| > 1e-8 marks the run as suspect.
struct Expectation {
    cplx raw{0.0, 0.0};
    bool hermitian_input = true;
    double value() const { return raw.real(); }
    double imag() const { return raw.imag(); }
    bool suspect() const { return std::abs(raw.imag()) > 1e-8; }
};

// Push the hat density for the cone of site k down through the cone's
// Schroedinger channels and trace against A.
Expectation local_expectation(const MeraSpec& spec, std::size_t N, std::size_t k,
                              const Eigen::MatrixXcd& a);

// The composed-channel output itself: the reduced density of the triple at k.
Eigen::MatrixXcd triple_density(const MeraSpec& spec, std::size_t N, std::size_t k);

// Site-averaged observable via transfer-matrix powers of the averaged channel.
Expectation symmetric_expectation(const MeraSpec& spec, std::size_t N,
                                  const Eigen::MatrixXcd& a);

struct HamiltonianTerms {
    Eigen::MatrixXcd h3; // d^3 x d^3, may be empty
    Eigen::MatrixXcd h2; // d^2 x d^2, may be empty
    Eigen::MatrixXcd h1; // d   x d,   may be empty
};

// h = H3 + (H2 (x) I + I (x) H2)/2 + (H1 (x) I (x) I + I (x) H1 (x) I + I (x) I (x) H1)/3;
// summed over all triples this reproduces the translationally invariant
// Hamiltonian exactly once per coupling.
Eigen::MatrixXcd assemble_triple_hamiltonian(std::size_t d, const HamiltonianTerms& terms);

Expectation energy_density(const MeraSpec& spec, std::size_t N, const HamiltonianTerms& terms);

// Reduced density of `len` consecutive sites (0-based `start`, periodic) of
// the N_eff-site state, computed by descending window maps from the hat.
// len <= 6.
Eigen::MatrixXcd window_marginal(const MeraSpec& spec, std::size_t n_eff, std::size_t start,
                                 std::size_t len);

// The 6-qudit state on the upper links of two first-neighbor depth-m shadows,
// anchored at the 1-based leftmost physical site k_A of the left shadow.
// Qudits 1-3 carry the left top triple, 4-6 the right one.
Eigen::MatrixXcd shadow_pair_state(const MeraSpec& spec, std::size_t N, std::size_t k_a,
                                   std::size_t depth);

// Shadow-averaged two-point function: both top triples are evolved down by
// depth powers of the averaged transfer matrix and contracted with A (x) B.
Expectation shadow_correlator(const MeraSpec& spec, std::size_t N, std::size_t k_a,
                              std::size_t depth, const Eigen::MatrixXcd& a,
                              const Eigen::MatrixXcd& b);

// Additionally averaged over all shadow anchor positions.
Expectation symmetric_correlator(const MeraSpec& spec, std::size_t N, std::size_t depth,
                                 const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Both triples of a supplied 6-qudit state evolved down `depth` steps and
// contracted with A (x) B. This is the common kernel of the shadow,
// symmetric and thermodynamic correlators.
Expectation evolved_pair_correlator(const MeraSpec& spec, std::size_t depth,
                                    const Eigen::MatrixXcd& sigma, const Eigen::MatrixXcd& a,
                                    const Eigen::MatrixXcd& b);

// Tr[rho_f A]; refuses (carrying the verdict) unless the channel mixes.
Expectation thermo_expectation(const MeraSpec& spec, const Eigen::MatrixXcd& a);

struct AvgDensityCheck {
    double channel_vs_oracle = 0.0; // ||Phi^m(rho_C) - avg_k oracle rho_k||
    double hat_independence = 0.0;  // ||rho_f - rho_f'|| across two hats
};

AvgDensityCheck avg_triple_density_check(const MeraSpec& spec, std::size_t N,
                                         std::uint64_t hat_seed = 99);

// <<dA (x) dB| E^depth (x) E^depth |sigma>> with dA = A - Tr[rho_f A] I.
// sigma is caller-supplied; the decay exponents do not depend on it.
Expectation connected_correlator(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                                 const Eigen::MatrixXcd& b, std::size_t depth,
                                 const Eigen::MatrixXcd& sigma);

// log2|eta_j eta_j'| over pairs of non-unit eigenvalues, sorted descending,
// deduplicated within 1e-9.
std::vector<double> scaling_exponents(const MeraSpec& spec, std::size_t count);

struct DominantPair {
    int j = -1;
    int jp = -1;
    double log2_modulus = 0.0;
    cplx eta_product{0.0, 0.0};
    cplx coefficient{0.0, 0.0};
};

// Largest |eta_j eta_j'| over non-unit pairs whose spectral coefficient for
// (dA, dB, sigma) is nonzero (threshold 1e-10 relative to the largest one).
DominantPair dominant_scaling_pair(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                                   const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& sigma);

// Eigenvalue products grouped into coherent classes (equal products add
// coherently in the expansion of the connected correlator). The measured
// per-step decay settles on log2|product| of the leading class once the
// rival classes are negligible at the working depth, and only if the leading
// product is real and positive; otherwise the steps keep oscillating.
struct ContributionRanking {
    cplx product{0.0, 0.0};   // eta_j eta_j' of the class leading at depth m_ref
    double log2_modulus = 0.0;
    double rival_ratio = 0.0; // next class contribution / leading, at m_ref
    double imag_fraction = 0.0;
};

ContributionRanking scaling_contribution_ranking(const MeraSpec& spec, const Eigen::MatrixXcd& a,
                                                 const Eigen::MatrixXcd& b,
                                                 const Eigen::MatrixXcd& sigma, unsigned m_ref);

// Brute-force side of the shadow-averaged correlator: the double average of
// <Psi| A_k (x) B_k' |Psi> over the triple pairs of two first-neighbor
// depth-`depth` shadows, left shadow anchored at k_a.
cplx oracle_shadow_average(const FullState& psi, std::size_t k_a, std::size_t depth,
                           const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace qumera
