#pragma once

#include <optional>
#include <string>

#include "qumera/observables.hpp"

namespace qumera {

// Spec files are JSON documents with keys "d", "chi" ([u1][u2][l1][l2]),
// "lambda" ([u][l1][l2]) and "hat" ([l1][l2][l3][l4]); complex entries are
// two-element [re, im] arrays. All floats are written with 17 significant
// digits so the numeric payload round-trips bit for bit.
MeraSpec read_spec_file(const std::string& path);
void write_spec_file(const std::string& path, const MeraSpec& spec);

std::string write_spec_string(const MeraSpec& spec);
MeraSpec parse_spec_string(const std::string& text);

// Observable files carry either a dense d^3 x d^3 matrix under "A" or
// Hamiltonian terms under "H3"/"H2"/"H1" (any subset), same encoding.
struct ObservableFile {
    std::optional<Eigen::MatrixXcd> a;
    HamiltonianTerms terms;
    bool has_terms = false;
};

ObservableFile read_observable_file(const std::string& path);
void write_observable_file(const std::string& path, const Eigen::MatrixXcd& a);

Eigen::MatrixXcd read_sigma_file(const std::string& path); // key "sigma", d^6 x d^6

// FNV-1a 64-bit hash of the raw file bytes, as fixed-width hex.
std::string file_digest(const std::string& path);
std::string bytes_digest(const std::string& bytes);

} // namespace qumera
