#include "qumera/cones.hpp"

#include <algorithm>

namespace qumera {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t log2_of(std::size_t n) {
    std::size_t l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

} // namespace

std::size_t MeraGraph::row_size(std::size_t level) const {
    if (level > m) throw structural_error("row level out of range");
    return N >> level;
}

MeraGraph build_graph(std::size_t N) {
    if (!is_power_of_two(N) || N < 8)
        throw structural_error("site count must be a power of two, at least 8");
    MeraGraph g;
    g.N = N;
    g.m = log2_of(N) - 2;
    return g;
}

GraphAudit graph_audit(const MeraGraph& g) {
    GraphAudit audit;
    // from_below[level][pos] counts legs arriving from the layer below the
    // level row, from_above from the layer (or hat) above it.
    std::vector<std::vector<int>> from_below(g.m + 1), from_above(g.m + 1);
    for (std::size_t lvl = 0; lvl <= g.m; ++lvl) {
        from_below[lvl].assign(g.row_size(lvl), 0);
        from_above[lvl].assign(g.row_size(lvl), 0);
    }

    std::size_t connections = 0;
    for (std::size_t layer = 1; layer <= g.m; ++layer) {
        std::size_t t = g.row_size(layer);
        // isometry uppers occupy the level-`layer` row
        for (std::size_t j = 0; j < t; ++j) from_below[layer][j]++;
        // within the layer each isometry leg meets exactly one disentangler leg
        connections += 2 * t;
        // disentangler lowers occupy the row below
        for (std::size_t i = 0; i < t; ++i) {
            from_above[layer - 1][(2 * i + 1) % (2 * t)]++;
            from_above[layer - 1][(2 * i + 2) % (2 * t)]++;
        }
    }
    for (std::size_t leg = 0; leg < 4; ++leg) from_above[g.m][leg]++;

    bool ok = true;
    for (std::size_t lvl = 1; lvl <= g.m; ++lvl)
        for (std::size_t p = 0; p < g.row_size(lvl); ++p) {
            if (from_below[lvl][p] != 1 || from_above[lvl][p] != 1) ok = false;
            connections++;
        }
    audit.physical_legs = 0;
    for (std::size_t p = 0; p < g.N; ++p) {
        if (from_below[0][p] != 0 || from_above[0][p] != 1) ok = false;
        audit.physical_legs++;
    }
    audit.internal_legs = connections;
    audit.every_internal_saturated_once = ok;
    audit.ok = ok && audit.physical_legs == g.N;
    return audit;
}

ConePath cone_path(const MeraGraph& g, std::size_t site) {
    if (site < 1 || site > g.N) throw structural_error("site out of range");
    ConePath path;
    path.site = site;
    path.modalities.reserve(g.m);
    path.roots.reserve(g.m);
    path.window_starts.reserve(g.m + 1);

    std::size_t w = (site + g.N - 2) % g.N; // leftmost position of the triple
    path.window_starts.push_back(w);
    for (std::size_t layer = 1; layer <= g.m; ++layer) {
        std::size_t t = g.row_size(layer);
        std::size_t root;
        if (w % 2 == 1) {
            path.modalities.push_back(Modality::L);
            root = (w - 1) / 2;
        } else {
            path.modalities.push_back(Modality::R);
            root = (w / 2 + t - 1) % t;
        }
        path.roots.push_back(root);
        w = root;
        path.window_starts.push_back(w);
    }
    path.hat_leg = static_cast<int>((w + 3) % 4) + 1;
    return path;
}

std::size_t merge_level(const MeraGraph& g, std::size_t site_a, std::size_t site_b) {
    auto circ = [](std::size_t a, std::size_t b, std::size_t n) {
        std::size_t d = (a > b) ? a - b : b - a;
        return std::min(d, n - d);
    };
    ConePath pa = cone_path(g, site_a), pb = cone_path(g, site_b);
    if (circ(pa.window_starts[0], pb.window_starts[0], g.N) <= 2) return 0;
    for (std::size_t layer = 1; layer <= g.m; ++layer) {
        std::size_t t = g.row_size(layer);
        if (circ(pa.roots[layer - 1], pb.roots[layer - 1], t) <= 2) return layer;
    }
    return g.m + 1; // cannot happen: any two length-3 windows on the 4-ring meet
}

Shadow shadow(const MeraGraph& g, std::size_t depth, std::size_t top_start) {
    if (depth < 1 || depth > g.m) throw structural_error("shadow depth out of range");
    std::size_t t = g.row_size(depth);
    if (top_start >= t) throw structural_error("shadow top start out of range");

    std::size_t span = std::size_t{1} << depth; // 2^depth triples
    Shadow s;
    s.depth = depth;
    s.top_start = top_start;
    s.window_size = span + 2;

    std::size_t left_pos = (span * top_start + span - 1) % g.N; // all-L descent
    s.k_left = left_pos + 1;

    for (std::size_t i = 0; i < span; ++i) {
        std::size_t center_pos = (left_pos + 1 + i) % g.N;
        std::size_t site = center_pos + 1;
        s.triples.push_back(site);
        ConePath p = cone_path(g, site);
        if (p.window_starts[depth] != top_start)
            throw structural_error("shadow triple does not percolate to its top triple");
        s.prefixes.emplace_back(p.modalities.begin(), p.modalities.begin() + depth);
    }
    return s;
}

std::size_t shadow_gap(std::size_t depth) { return 2 * ((std::size_t{1} << depth) - 1); }

ComplexTensor cone_tensor(const MeraSpec& spec) {
    require_valid(spec);
    const ComplexTensor& lam = spec.lam;
    const ComplexTensor& chi = spec.chi;

    // lam legs (u, a, b); chi legs (a, b, l, l')
    ComplexTensor t1 = contract(lam, chi, {{2, 0}});  // (u1, l1, b, l2, l3)
    ComplexTensor t2 = contract(t1, lam, {{2, 1}});   // (u1, l1, l2, l3, u2, g)
    ComplexTensor t3 = contract(t2, chi, {{5, 0}});   // (u1, l1, l2, l3, u2, d, l4, l5)
    ComplexTensor t4 = contract(t3, lam, {{5, 1}});   // (u1, l1, l2, l3, u2, l4, l5, u3, l6)
    return permute(t4, {0, 4, 7, 1, 2, 3, 5, 6, 8});  // (u1,u2,u3, l1..l6)
}

KrausSet kraus_set(const MeraSpec& spec, Modality modality, Picture picture) {
    const std::size_t d = spec.d;
    const std::size_t d3 = d * d * d;
    ComplexTensor m = cone_tensor(spec);

    KrausSet set;
    set.picture = picture;
    set.modality = modality;
    set.d = d;
    set.ops.reserve(d3);

    std::vector<std::size_t> idx(9, 0);
    for (std::size_t r = 0; r < d3; ++r) {
        std::size_t r1 = r / (d * d), r2 = (r / d) % d, r3 = r % d;
        Eigen::MatrixXcd op(d3, d3);
        for (std::size_t u = 0; u < d3; ++u) {
            idx[0] = u / (d * d);
            idx[1] = (u / d) % d;
            idx[2] = u % d;
            for (std::size_t l = 0; l < d3; ++l) {
                std::size_t l1 = l / (d * d), l2 = (l / d) % d, l3 = l % d;
                if (modality == Modality::L) {
                    idx[3] = r1; idx[4] = l1; idx[5] = l2; idx[6] = l3; idx[7] = r2; idx[8] = r3;
                } else {
                    idx[3] = r1; idx[4] = r2; idx[5] = l1; idx[6] = l2; idx[7] = l3; idx[8] = r3;
                }
                // the state amplitudes carry the un-conjugated tensors, so the
                // operator that pushes observables toward the hat is built
                // from the conjugated slice
                op(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(l)) =
                    std::conj(m.at(idx));
            }
        }
        if (picture == Picture::Schroedinger) op = op.adjoint().eval();
        set.ops.push_back(std::move(op));
    }
    return set;
}

} // namespace qumera
