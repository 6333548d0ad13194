#pragma once

#include <vector>

#include "qumera/mera.hpp"

namespace qumera {

// Brute-force ground truth. The full amplitude vector is built by explicit
// layer-by-layer application of the spec tensors, with its own index loops:
// the only code shared with the channel pipeline is the tensor container.
//
// Amplitudes are stored with site 1 slowest and site N fastest.
struct FullState {
    std::size_t N = 0;
    std::size_t d = 0;
    std::vector<cplx> amp;
};

inline constexpr std::size_t kOracleAmplitudeGuard = std::size_t{1} << 24;

FullState build_state(const MeraSpec& spec, std::size_t N);

// <Psi| O_window |Psi> for an operator on `len` consecutive sites starting at
// 0-based position `start` (wraps periodically).
cplx window_expectation(const FullState& psi, std::size_t start, std::size_t len,
                        const Eigen::MatrixXcd& op);

// Observable on the triple centered at 1-based site k.
cplx direct_expectation(const FullState& psi, std::size_t k, const Eigen::MatrixXcd& a);

// <Psi| A_k (x) B_k' |Psi> for disjoint triples (|k - k'| >= 3 cyclically).
cplx direct_correlator(const FullState& psi, std::size_t k, std::size_t kp,
                       const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Reduced density matrix on the listed 0-based sites, in the given order.
Eigen::MatrixXcd reduced_density(const FullState& psi, const std::vector<std::size_t>& sites);

Eigen::MatrixXcd triple_density_oracle(const FullState& psi, std::size_t k);

// Undo the bottom layer with the adjoint disentanglers and isometries,
// recovering the (N/2)-site state exactly.
FullState invert_bottom_layer(const MeraSpec& spec, const FullState& psi);

double state_norm(const FullState& psi);

} // namespace qumera
