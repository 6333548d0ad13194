#pragma once

#include <array>
#include <cstdint>

#include "qumera/tensor.hpp"

namespace qumera {

// A homogeneous MERA family: one disentangler, one isometry, one hat tensor,
// all indices of dimension d.
//
// Leg conventions (frozen project-wide):
//   chi: shape (d,d,d,d), legs (u1,u2,l1,l2) — two-site unitary, uppers face
//        the hat, lowers face the physical row.
//   lam: shape (d,d,d), legs (u,l1,l2) — isometry splitting one site into
//        two; as the d^2 x d matrix V[(l1 l2), u] it satisfies V^dag V = I.
//   hat: shape (d,d,d,d), legs (l1..l4), unit norm; leg li sits at position
//        i-1 of the 4-site top row.
struct MeraSpec {
    std::size_t d = 0;
    ComplexTensor chi;
    ComplexTensor lam;
    ComplexTensor hat;
};

struct ValidationReport {
    double chi_left = 0.0;  // ||chi^dag chi - I||_F
    double chi_right = 0.0; // ||chi chi^dag - I||_F
    double lam_iso = 0.0;   // ||V^dag V - I||_F
    double hat_norm = 0.0;  // | ||hat|| - 1 |
    double tol = kDefaultTol;
    bool pass = false;
};

// Checks shapes structurally (throws structural_error on mismatch) and
// reports the constraint residuals.
ValidationReport validate(const MeraSpec& spec, double tol = kDefaultTol);

// Throws validation_error when the spec does not pass at tol.
void require_valid(const MeraSpec& spec, double tol = kDefaultTol);

// Reduced densities of the hat state. rho[j-1] lives on the three hat legs
// other than j, ordered cyclically starting after j:
//   j=1 -> (2,3,4), j=2 -> (3,4,1), j=3 -> (4,1,2), j=4 -> (1,2,3).
// That is the order in which a causal cone reaching the hat sees them, and
// the order required by the per-site channel identity. For permutation
// symmetric hats all four coincide with the plain partial trace.
struct HatDensities {
    std::array<Eigen::MatrixXcd, 4> rho;
    Eigen::MatrixXcd avg; // equal mixture of the four
};

HatDensities hat_densities(const MeraSpec& spec);

// Deterministic in seed: chi Haar-like via QR with phase fixing, lam the first
// d columns of a Haar-like d^2 x d^2 unitary, hat a normalized Gaussian.
MeraSpec random_spec(std::size_t d, std::uint64_t seed);

// Same chi/lam, fresh Gaussian hat.
MeraSpec with_random_hat(const MeraSpec& spec, std::uint64_t seed);

// chi = identity, lam |u> -> |u,0>, hat = |0000>. Every constraint holds with
// zero residual; the global state is a product state when the hat is |0000>.
MeraSpec embedding_spec(std::size_t d);

// chi = identity, lam |u> -> |u,u>. Valid, but the averaged channel keeps all
// classical copies fixed: a deterministic non-mixing instance.
MeraSpec copy_spec(std::size_t d);

// chi and lam symmetric under left-right mirroring (chi^{ab}_{cd} =
// chi^{ba}_{dc}, lam^{u}_{ab} = lam^{u}_{ba}); under mirroring the two Kraus
// families are swap-conjugates of each other.
MeraSpec mirror_symmetric_spec(std::size_t d, std::uint64_t seed);

// d = 3 instance whose averaged channel is self-adjoint and mixing: chi is
// the SWAP and lam a fully symmetric real 3-tensor that is also an isometry
// (found by alternating symmetrization with a polar retraction). With these
// the Kraus family closes under adjoints, so the transfer matrix is real
// symmetric; genericity of the seed keeps the unit eigenvalue simple.
MeraSpec symmetric_transfer_spec(std::uint64_t seed = 1);

} // namespace qumera
