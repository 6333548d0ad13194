#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qumera {

using cplx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kSpectralTol = 1e-8;

// Thrown when tensor shapes or leg partitions are inconsistent.
struct structural_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when a contraction pairs legs of unequal dimension.
struct contraction_error : structural_error {
    using structural_error::structural_error;
};

// A spec failed its isometry/unitarity/normalization constraints.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerically well-posed request was declined: non-mixing channel where a
// fixed point is needed, resource guard exceeded, and the like. Carries the
// verdict that triggered the refusal.
struct refusal : std::runtime_error {
    std::string verdict;
    refusal(const std::string& what, std::string verdict_)
        : std::runtime_error(what), verdict(std::move(verdict_)) {}
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double frobenius(const Eigen::MatrixXcd& m) { return m.norm(); }

inline double rel_err(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want) {
    double scale = std::max(1.0, want.norm());
    return (got - want).norm() / scale;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace qumera
