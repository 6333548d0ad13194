#pragma once

#include <vector>

#include "qumera/mera.hpp"

namespace qumera {

enum class Modality { L, R };
enum class Picture { Heisenberg, Schroedinger };

// Layer geometry, bottom layer is layer 1. Within a layer the isometry row
// sits above the disentangler row: isometry j of a layer with t upper sites
// splits site j into legs (A_j, B_j); disentangler j couples (B_j, A_{j+1})
// and its lower legs are row positions (2j+1, 2j+2) mod 2t. All rows are
// periodic.
struct MeraGraph {
    std::size_t N = 0; // physical sites, power of two, >= 8
    std::size_t m = 0; // layers, log2(N) - 2

    std::size_t row_size(std::size_t level) const; // level 0 = physical row
    std::size_t isometries(std::size_t layer) const { return row_size(layer); }
    std::size_t disentanglers(std::size_t layer) const { return row_size(layer); }
};

MeraGraph build_graph(std::size_t N);

struct GraphAudit {
    std::size_t physical_legs = 0;
    std::size_t internal_legs = 0;
    bool every_internal_saturated_once = false;
    bool ok = false;
};

// Exhaustive leg count over the whole network.
GraphAudit graph_audit(const MeraGraph& g);

// Per-site causal cone. modalities[0] is the layer adjacent to the physical
// sites. roots[l] is the position of the leftmost isometry of the cone tensor
// crossed at layer l+1; window_starts[l] is the leftmost covered position of
// the row below that layer. hat_leg is the 1-based hat leg the cone does not
// touch.
struct ConePath {
    std::size_t site = 0; // 1-based
    std::vector<Modality> modalities;
    std::vector<std::size_t> roots;
    std::vector<std::size_t> window_starts;
    int hat_leg = 0;
};

ConePath cone_path(const MeraGraph& g, std::size_t site);

// First layer at which the cones of two sites share a tensor; 0 when the
// physical triples already overlap.
std::size_t merge_level(const MeraGraph& g, std::size_t site_a, std::size_t site_b);

// Causal shadow of a triple of consecutive links at the top of layer depth.
// top_start is the 0-based leftmost link position (row size N / 2^depth).
struct Shadow {
    std::size_t depth = 0;
    std::size_t top_start = 0;
    std::size_t k_left = 0;                       // 1-based leftmost physical site
    std::vector<std::size_t> triples;             // 1-based centers, 2^depth of them
    std::size_t window_size = 0;                  // physical sites covered, 2^depth + 2
    std::vector<std::vector<Modality>> prefixes;  // cone modality prefixes per triple
};

Shadow shadow(const MeraGraph& g, std::size_t depth, std::size_t top_start);

// Physical sites strictly between two first-neighbor shadows of equal depth.
std::size_t shadow_gap(std::size_t depth);

// The three-site cone tensor: legs (u1,u2,u3, l1..l6). Built from three
// isometries and the two disentanglers between them; l1/l6 are the outer
// isometry legs, l2..l5 the disentangler legs.
ComplexTensor cone_tensor(const MeraSpec& spec);

// Kraus family on three qudits, indexed by r = (r1,r2,r3). In the Heisenberg
// picture the L family reads the cone tensor with operator legs at lower
// slots (2,3,4) and r at (1,5,6); the R family has operator legs at (3,4,5)
// and r at (1,2,6). The Schroedinger family is the elementwise adjoint.
// Weights for the averaged channel are not folded in here.
struct KrausSet {
    Picture picture = Picture::Heisenberg;
    Modality modality = Modality::L;
    std::size_t d = 0;
    std::vector<Eigen::MatrixXcd> ops; // d^3 operators, each d^3 x d^3
};

KrausSet kraus_set(const MeraSpec& spec, Modality modality, Picture picture);

} // namespace qumera
