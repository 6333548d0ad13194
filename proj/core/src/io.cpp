#include "qumera/io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace qumera {

using detail::ordered_json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ordered_json parse(const std::string& text, const std::string& what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw io_error("malformed JSON in " + what);
    return j;
}

// nested arrays indexed leg by leg, leaves are [re, im]
ordered_json tensor_json(const ComplexTensor& t, std::size_t leg, std::vector<std::size_t>& idx) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < t.dim(leg); ++i) {
        idx[leg] = i;
        if (leg + 1 == t.rank())
            out.push_back(detail::complex_json(t.at(idx)));
        else
            out.push_back(tensor_json(t, leg + 1, idx));
    }
    return out;
}

ordered_json tensor_json(const ComplexTensor& t) {
    std::vector<std::size_t> idx(t.rank(), 0);
    return tensor_json(t, 0, idx);
}

void fill_tensor(ComplexTensor& t, const ordered_json& j, std::size_t leg,
                 std::vector<std::size_t>& idx) {
    if (!j.is_array() || j.size() != t.dim(leg))
        throw io_error("tensor nesting does not match the declared shape");
    for (std::size_t i = 0; i < t.dim(leg); ++i) {
        idx[leg] = i;
        if (leg + 1 == t.rank())
            t.at(idx) = detail::json_complex(j[i]);
        else
            fill_tensor(t, j[i], leg + 1, idx);
    }
}

ComplexTensor tensor_from_json(const ordered_json& j, std::vector<std::size_t> shape) {
    ComplexTensor t(std::move(shape));
    std::vector<std::size_t> idx(t.rank(), 0);
    fill_tensor(t, j, 0, idx);
    return t;
}

} // namespace

std::string write_spec_string(const MeraSpec& spec) {
    ordered_json j;
    j["d"] = spec.d;
    j["chi"] = tensor_json(spec.chi);
    j["lambda"] = tensor_json(spec.lam);
    j["hat"] = tensor_json(spec.hat);
    return detail::dump_17(j);
}

MeraSpec parse_spec_string(const std::string& text) {
    ordered_json j = parse(text, "spec");
    if (!j.contains("d") || !j.contains("chi") || !j.contains("lambda") || !j.contains("hat"))
        throw io_error("spec file needs keys d, chi, lambda, hat");
    MeraSpec spec;
    spec.d = j["d"].get<std::size_t>();
    if (spec.d < 2) throw io_error("spec file local dimension must be >= 2");
    const std::size_t d = spec.d;
    spec.chi = tensor_from_json(j["chi"], {d, d, d, d});
    spec.lam = tensor_from_json(j["lambda"], {d, d, d});
    spec.hat = tensor_from_json(j["hat"], {d, d, d, d});
    return spec;
}

MeraSpec read_spec_file(const std::string& path) { return parse_spec_string(slurp(path)); }

void write_spec_file(const std::string& path, const MeraSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << write_spec_string(spec);
}

ObservableFile read_observable_file(const std::string& path) {
    ordered_json j = parse(slurp(path), path);
    ObservableFile f;
    if (j.contains("A")) f.a = detail::json_matrix(j["A"]);
    if (j.contains("H3")) {
        f.terms.h3 = detail::json_matrix(j["H3"]);
        f.has_terms = true;
    }
    if (j.contains("H2")) {
        f.terms.h2 = detail::json_matrix(j["H2"]);
        f.has_terms = true;
    }
    if (j.contains("H1")) {
        f.terms.h1 = detail::json_matrix(j["H1"]);
        f.has_terms = true;
    }
    if (!f.a && !f.has_terms)
        throw io_error("observable file needs key A or Hamiltonian keys H3/H2/H1");
    return f;
}

void write_observable_file(const std::string& path, const Eigen::MatrixXcd& a) {
    ordered_json j;
    j["A"] = detail::matrix_json(a);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << detail::dump_17(j);
}

Eigen::MatrixXcd read_sigma_file(const std::string& path) {
    ordered_json j = parse(slurp(path), path);
    if (!j.contains("sigma")) throw io_error("sigma file needs key sigma");
    return detail::json_matrix(j["sigma"]);
}

std::string bytes_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::string& path) { return bytes_digest(slurp(path)); }

} // namespace qumera
