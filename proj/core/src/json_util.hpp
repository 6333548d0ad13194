#pragma once

// Internal JSON helpers shared by io.cpp and cli.cpp. Not installed.

#include <cstdio>
#include <string>

#include <json.hpp>

#include "qumera/common.hpp"

namespace qumera::detail {

using ordered_json = nlohmann::ordered_json;

inline std::string format_double_17(double v) {
    if (!std::isfinite(v)) throw io_error("refusing to serialize a non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// nlohmann's writer picks the shortest round-trip form; reports pin 17
// significant digits instead, so numbers are emitted by hand.
inline void dump_17(const ordered_json& j, std::string& out) {
    switch (j.type()) {
        case ordered_json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += ordered_json(it.key()).dump();
                out += ':';
                dump_17(it.value(), out);
            }
            out += '}';
            break;
        }
        case ordered_json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                dump_17(v, out);
            }
            out += ']';
            break;
        }
        case ordered_json::value_t::number_float:
            out += format_double_17(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

inline std::string dump_17(const ordered_json& j) {
    std::string out;
    dump_17(j, out);
    out += '\n';
    return out;
}

inline ordered_json complex_json(const cplx& v) {
    return ordered_json::array({v.real(), v.imag()});
}

inline cplx json_complex(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2)
        throw io_error("complex entries must be [re, im] pairs");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline ordered_json matrix_json(const Eigen::MatrixXcd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index jj = 0; jj < m.cols(); ++jj) row.push_back(complex_json(m(i, jj)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXcd json_matrix(const ordered_json& j) {
    if (!j.is_array() || j.empty()) throw io_error("matrix must be a non-empty nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw io_error("matrix rows have unequal lengths");
        for (Eigen::Index jj = 0; jj < cols; ++jj)
            m(i, jj) = json_complex(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)]);
    }
    return m;
}

} // namespace qumera::detail
