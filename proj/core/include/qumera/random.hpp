#pragma once

#include <cstdint>
#include <random>

#include "qumera/common.hpp"

namespace qumera {

// Seeded randomness only. Gaussians come from a hand-rolled Box-Muller on top
// of mt19937_64 so that streams are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(); // [0, 1)
    double gaussian();
    cplx gaussian_cplx();

    Eigen::MatrixXcd gaussian_matrix(std::size_t rows, std::size_t cols);
    Eigen::MatrixXcd hermitian(std::size_t n);

    // Haar-like unitary: QR of a complex Gaussian matrix with the R diagonal
    // phases folded back into Q.
    Eigen::MatrixXcd haar_unitary(std::size_t n);

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qumera
