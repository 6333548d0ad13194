#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qumera/cones.hpp"

namespace qumera {

// A completely positive map on three qudits given by one or two weighted
// Kraus families. The averaged channel mixes the L and R families with weight
// 1/2 each. Heisenberg channels are unital, Schroedinger channels trace
// preserving.
struct Channel {
    Picture picture = Picture::Schroedinger;
    std::size_t d = 0;
    std::vector<std::pair<double, KrausSet>> families;

    std::size_t dim() const { return d * d * d; }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;
};

Channel single_channel(const MeraSpec& spec, Modality modality, Picture picture);
Channel averaged_channel(const MeraSpec& spec, Picture picture = Picture::Schroedinger);

// Row-major vectorization: |A>>_{i*D + i'} = A_{i,i'}. Tr[A^dag B] = <<A|B>>.
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v);

enum class MixingVerdict { Mixing, NonMixing, Indeterminate };

std::string to_string(MixingVerdict v);

struct SpectralData {
    std::vector<cplx> eigenvalues;  // sorted by descending modulus
    Eigen::MatrixXcd right_vectors; // columns match eigenvalues
    Eigen::MatrixXcd left_vectors;  // rows match eigenvalues; empty when the
                                    // right-vector matrix is too ill-conditioned
    bool unit_circle_ok = false;    // all |eta| <= 1 + 1e-9
    bool one_in_spectrum = false;
    bool ergodic = false;           // unit eigenvalue has a one-dimensional eigenspace
    MixingVerdict verdict = MixingVerdict::Indeterminate;
    double subleading_modulus = 0.0; // |eta_1|, largest modulus outside the unit cluster
    bool self_adjoint = false;
    std::optional<Eigen::MatrixXcd> fixed_point; // present when ergodic
    double fixed_point_residual = 0.0;           // ||Phi(rho_f) - rho_f||
    double tol = kSpectralTol;
};

// Liouville-space matrix of a channel: sum_s w_s M_s (x) conj(M_s) over the
// weighted Kraus operators, so that vectorize(ch.apply(X)) = mat * vectorize(X).
// Spectral data is computed once and memoized; the memoization is not
// synchronized, so share an instance across threads only after a first call.
class TransferMatrix {
  public:
    TransferMatrix() = default;
    TransferMatrix(Eigen::MatrixXcd mat, Channel source);

    const Eigen::MatrixXcd& mat() const { return mat_; }
    const Channel& source() const { return source_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

    const SpectralData& spectral(double tol = kSpectralTol) const;

  private:
    Eigen::MatrixXcd mat_;
    Channel source_;
    mutable std::shared_ptr<const SpectralData> cache_;
    mutable double cache_tol_ = -1.0;
};

TransferMatrix transfer_matrix(const Channel& ch);

SpectralData spectrum(const TransferMatrix& tm, double tol = kSpectralTol);

// Binary exponentiation.
Eigen::MatrixXcd power(const TransferMatrix& tm, unsigned m);

// |rho_f>><<I|. Refuses (with the verdict attached) unless the channel mixes.
Eigen::MatrixXcd asymptote(const TransferMatrix& tm);

} // namespace qumera
