#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "qumera/common.hpp"

namespace qumera {

// Dense complex tensor with ordered legs. Storage is row-major: the last leg
// runs fastest. This is the one storage convention of the project; matrix
// views, vectorization and all file formats refer to it.
class ComplexTensor {
  public:
    ComplexTensor() = default;
    explicit ComplexTensor(std::vector<std::size_t> shape);
    ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data);

    static ComplexTensor scalar(cplx value);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t leg) const;

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    std::size_t offset(const std::vector<std::size_t>& idx) const;
    cplx& at(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }
    const cplx& at(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

    const std::vector<std::size_t>& strides() const { return strides_; }

    bool all_finite() const;
    double norm() const;

  private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<cplx> data_;

    void init_strides();
};

// Sum over paired legs. Result legs: unpaired legs of a in original order,
// then unpaired legs of b. Throws contraction_error naming the offending pair
// on a dimension mismatch, structural_error on a leg paired twice.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Swap the upper and lower leg groups and conjugate entries. The two groups
// must partition all legs; result legs are [lower..., upper...].
ComplexTensor adjoint(const ComplexTensor& a, const std::vector<std::size_t>& upper,
                      const std::vector<std::size_t>& lower);

// result leg i = a leg perm[i].
ComplexTensor permute(const ComplexTensor& a, const std::vector<std::size_t>& perm);

ComplexTensor conjugate(const ComplexTensor& a);
ComplexTensor add(const ComplexTensor& a, const ComplexTensor& b);
ComplexTensor scale(const ComplexTensor& a, cplx factor);

// A tensor reinterpreted as a matrix through a leg partition (row group then
// column group, each in the order given).
struct MatrixView {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_legs;
    std::vector<std::size_t> col_legs;
    Eigen::MatrixXcd mat;
};

MatrixView matrix_view(const ComplexTensor& t, const std::vector<std::size_t>& row_legs,
                       const std::vector<std::size_t>& col_legs);

MatrixView kron(const MatrixView& a, const MatrixView& b);

// Inverse of matrix_view for a fresh tensor: legs are [row_dims..., col_dims...].
ComplexTensor from_matrix(const Eigen::MatrixXcd& m, const std::vector<std::size_t>& row_dims,
                          const std::vector<std::size_t>& col_dims);

ComplexTensor identity_tensor(std::size_t d); // shape (d, d), delta

} // namespace qumera
