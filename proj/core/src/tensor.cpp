#include "qumera/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace qumera {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (std::size_t d : shape_) {
        if (d == 0) throw structural_error("tensor leg of dimension 0");
        n *= d;
    }
    data_.assign(n, cplx(0.0, 0.0));
    init_strides();
}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    std::size_t n = 1;
    for (std::size_t d : shape_) n *= d;
    if (n != data_.size())
        throw structural_error("tensor data length " + std::to_string(data_.size()) +
                               " does not match shape product " + std::to_string(n));
    init_strides();
}

ComplexTensor ComplexTensor::scalar(cplx value) {
    ComplexTensor t;
    t.data_.assign(1, value);
    t.init_strides();
    return t;
}

void ComplexTensor::init_strides() {
    strides_.assign(shape_.size(), 1);
    for (std::size_t i = shape_.size(); i-- > 1;)
        strides_[i - 1] = strides_[i] * shape_[i];
}

std::size_t ComplexTensor::dim(std::size_t leg) const {
    if (leg >= shape_.size()) throw structural_error("leg index out of range");
    return shape_[leg];
}

std::size_t ComplexTensor::offset(const std::vector<std::size_t>& idx) const {
    if (idx.size() != shape_.size()) throw structural_error("index rank mismatch");
    std::size_t off = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= shape_[i]) throw structural_error("index out of range");
        off += idx[i] * strides_[i];
    }
    return off;
}

bool ComplexTensor::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double ComplexTensor::norm() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

namespace {

// Gather a permuted copy: out leg i <- src leg perm[i].
std::vector<cplx> permuted_data(const ComplexTensor& a, const std::vector<std::size_t>& perm,
                                std::vector<std::size_t>& out_shape) {
    const auto& shape = a.shape();
    out_shape.resize(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out_shape[i] = shape[perm[i]];

    std::vector<std::size_t> out_strides(perm.size(), 1);
    for (std::size_t i = perm.size(); i-- > 1;)
        out_strides[i - 1] = out_strides[i] * out_shape[i];

    // stride of out-leg i inside the source layout
    std::vector<std::size_t> src_stride(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) src_stride[i] = a.strides()[perm[i]];

    std::vector<cplx> out(a.size());
    std::vector<std::size_t> idx(perm.size(), 0);
    std::size_t src_off = 0;
    for (std::size_t lin = 0; lin < out.size(); ++lin) {
        out[lin] = a.data()[src_off];
        for (std::size_t i = perm.size(); i-- > 0;) {
            idx[i]++;
            src_off += src_stride[i];
            if (idx[i] < out_shape[i]) break;
            src_off -= idx[i] * src_stride[i];
            idx[i] = 0;
        }
    }
    return out;
}

} // namespace

ComplexTensor permute(const ComplexTensor& a, const std::vector<std::size_t>& perm) {
    if (perm.size() != a.rank()) throw structural_error("permutation rank mismatch");
    std::vector<bool> seen(a.rank(), false);
    for (std::size_t p : perm) {
        if (p >= a.rank() || seen[p]) throw structural_error("invalid permutation");
        seen[p] = true;
    }
    std::vector<std::size_t> out_shape;
    auto data = permuted_data(a, perm, out_shape);
    return ComplexTensor(out_shape, std::move(data));
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
    for (const auto& [la, lb] : pairs) {
        if (la >= a.rank() || lb >= b.rank())
            throw contraction_error("contraction pairs leg (" + std::to_string(la) + "," +
                                    std::to_string(lb) + ") out of range");
        if (a_used[la] || b_used[lb])
            throw structural_error("leg paired twice in contraction");
        if (a.dim(la) != b.dim(lb))
            throw contraction_error("contraction dimension mismatch at pair (a leg " +
                                    std::to_string(la) + " dim " + std::to_string(a.dim(la)) +
                                    ", b leg " + std::to_string(lb) + " dim " +
                                    std::to_string(b.dim(lb)) + ")");
        a_used[la] = true;
        b_used[lb] = true;
    }

    std::vector<std::size_t> a_free, b_free, a_sum, b_sum;
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (!a_used[i]) a_free.push_back(i);
    for (std::size_t i = 0; i < b.rank(); ++i)
        if (!b_used[i]) b_free.push_back(i);
    for (const auto& [la, lb] : pairs) {
        a_sum.push_back(la);
        b_sum.push_back(lb);
    }

    std::size_t m = 1, n = 1, k = 1;
    for (std::size_t i : a_free) m *= a.dim(i);
    for (std::size_t i : b_free) n *= b.dim(i);
    for (std::size_t i : a_sum) k *= a.dim(i);

    // permute a to [free..., sum...], b to [sum..., free...], then one GEMM
    std::vector<std::size_t> pa(a_free), pb(b_sum);
    pa.insert(pa.end(), a_sum.begin(), a_sum.end());
    pb.insert(pb.end(), b_free.begin(), b_free.end());

    std::vector<std::size_t> sa, sb;
    auto da = permuted_data(a, pa, sa);
    auto db = permuted_data(b, pb, sb);

    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> ma(da.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    Eigen::Map<const RowMat> mb(db.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));

    std::vector<std::size_t> out_shape;
    for (std::size_t i : a_free) out_shape.push_back(a.dim(i));
    for (std::size_t i : b_free) out_shape.push_back(b.dim(i));

    std::vector<cplx> out(m * n);
    Eigen::Map<RowMat> mo(out.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    mo.noalias() = ma * mb;

    return ComplexTensor(out_shape, std::move(out));
}

ComplexTensor adjoint(const ComplexTensor& a, const std::vector<std::size_t>& upper,
                      const std::vector<std::size_t>& lower) {
    if (upper.size() + lower.size() != a.rank())
        throw structural_error("adjoint partition does not cover all legs");
    std::vector<bool> seen(a.rank(), false);
    for (std::size_t l : upper) {
        if (l >= a.rank() || seen[l]) throw structural_error("adjoint partition invalid");
        seen[l] = true;
    }
    for (std::size_t l : lower) {
        if (l >= a.rank() || seen[l]) throw structural_error("adjoint partition invalid");
        seen[l] = true;
    }
    std::vector<std::size_t> perm(lower);
    perm.insert(perm.end(), upper.begin(), upper.end());
    ComplexTensor out = permute(a, perm);
    for (cplx& v : out.data()) v = std::conj(v);
    return out;
}

ComplexTensor conjugate(const ComplexTensor& a) {
    ComplexTensor out = a;
    for (cplx& v : out.data()) v = std::conj(v);
    return out;
}

ComplexTensor add(const ComplexTensor& a, const ComplexTensor& b) {
    if (a.shape() != b.shape()) throw structural_error("tensor add shape mismatch");
    ComplexTensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

ComplexTensor scale(const ComplexTensor& a, cplx factor) {
    ComplexTensor out = a;
    for (cplx& v : out.data()) v *= factor;
    return out;
}

MatrixView matrix_view(const ComplexTensor& t, const std::vector<std::size_t>& row_legs,
                       const std::vector<std::size_t>& col_legs) {
    if (row_legs.size() + col_legs.size() != t.rank())
        throw structural_error("matrix view partition does not cover all legs");
    std::vector<std::size_t> perm(row_legs);
    perm.insert(perm.end(), col_legs.begin(), col_legs.end());
    ComplexTensor p = permute(t, perm);

    MatrixView v;
    v.row_legs = row_legs;
    v.col_legs = col_legs;
    v.rows = 1;
    v.cols = 1;
    for (std::size_t l : row_legs) v.rows *= t.dim(l);
    for (std::size_t l : col_legs) v.cols *= t.dim(l);
    v.mat.resize(static_cast<Eigen::Index>(v.rows), static_cast<Eigen::Index>(v.cols));
    for (std::size_t r = 0; r < v.rows; ++r)
        for (std::size_t c = 0; c < v.cols; ++c)
            v.mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                p.data()[r * v.cols + c];
    return v;
}

MatrixView kron(const MatrixView& a, const MatrixView& b) {
    MatrixView v;
    v.rows = a.rows * b.rows;
    v.cols = a.cols * b.cols;
    v.mat = kron(a.mat, b.mat);
    return v;
}

ComplexTensor from_matrix(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& row_dims,
                          const std::vector<std::size_t>& col_dims) {
    std::size_t rows = 1, cols = 1;
    for (std::size_t d : row_dims) rows *= d;
    for (std::size_t d : col_dims) cols *= d;
    if (rows != static_cast<std::size_t>(m.rows()) || cols != static_cast<std::size_t>(m.cols()))
        throw structural_error("from_matrix dims do not match matrix size");
    std::vector<std::size_t> shape(row_dims);
    shape.insert(shape.end(), col_dims.begin(), col_dims.end());
    std::vector<cplx> data(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            data[r * cols + c] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return ComplexTensor(std::move(shape), std::move(data));
}

ComplexTensor identity_tensor(std::size_t d) {
    ComplexTensor t({d, d});
    for (std::size_t i = 0; i < d; ++i) t.at({i, i}) = 1.0;
    return t;
}

} // namespace qumera
