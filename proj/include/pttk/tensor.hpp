#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace pttk {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Dense N-dimensional real tensor.
///
/// Storage is one flat array in little-endian multi-index order: the entry at
/// multi-index (i_1, ..., i_N) lives at flat offset
///     i_1 + i_2*n_1 + i_3*n_1*n_2 + ...
/// which coincides with column-major layout. Mode numbers and multi-indices in
/// this API are 0-based; the 1-based convention of the accompanying math maps
/// by adding one.
class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(std::vector<Index> shape) : shape_(std::move(shape)) {
        data_.assign(static_cast<std::size_t>(checked_size(shape_)), 0.0);
    }

    DenseTensor(std::vector<Index> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_size(shape_) != static_cast<Index>(data_.size()))
            throw std::invalid_argument("DenseTensor: data length does not match shape");
    }

    Index order() const { return static_cast<Index>(shape_.size()); }
    const std::vector<Index>& shape() const { return shape_; }
    Index dim(Index k) const { return shape_.at(static_cast<std::size_t>(k)); }
    Index size() const { return static_cast<Index>(data_.size()); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    Index flat_index(std::span<const Index> idx) const {
        Index off = 0, stride = 1;
        for (std::size_t k = 0; k < shape_.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= shape_[k])
                throw std::out_of_range("DenseTensor: index out of range");
            off += idx[k] * stride;
            stride *= shape_[k];
        }
        return off;
    }

    double operator()(std::span<const Index> idx) const { return data_[static_cast<std::size_t>(flat_index(idx))]; }
    double& operator()(std::span<const Index> idx) { return data_[static_cast<std::size_t>(flat_index(idx))]; }
    double operator()(std::initializer_list<Index> idx) const { return (*this)(std::span<const Index>(idx.begin(), idx.size())); }
    double& operator()(std::initializer_list<Index> idx) { return (*this)(std::span<const Index>(idx.begin(), idx.size())); }

    double operator[](Index flat) const { return data_[static_cast<std::size_t>(flat)]; }
    double& operator[](Index flat) { return data_[static_cast<std::size_t>(flat)]; }

    static Index checked_size(const std::vector<Index>& shape) {
        Index n = 1;
        for (Index s : shape) {
            if (s <= 0) throw std::invalid_argument("DenseTensor: shape entries must be positive");
            n *= s;
        }
        return n;
    }

private:
    std::vector<Index> shape_;
    std::vector<double> data_;
};

/// Unfolds t by grouping the first `split` modes into rows and the rest into
/// columns; split runs from 1 to N. Under the little-endian layout this is a
/// reshape, so the returned matrix is a copy of the flat data.
Matrix unfold(const DenseTensor& t, Index split);

/// Zero-copy view of the same unfolding.
Eigen::Map<const Matrix> unfold_view(const DenseTensor& t, Index split);
Eigen::Map<Matrix> unfold_view(DenseTensor& t, Index split);

/// Inverse of unfold: reinterprets a matrix (column-major) as a tensor of the
/// given shape. Element count must match.
DenseTensor fold(const Matrix& m, std::vector<Index> shape);

/// Mode-k product (k is 0-based): contracts mode k of t with the columns of a,
/// so the result has a.rows() in place of t.dim(k).
DenseTensor mode_k_product(const DenseTensor& t, const Matrix& a, Index k);

/// Kronecker product (block form).
Matrix kron(const Matrix& g, const Matrix& h);

/// Khatri-Rao product: columnwise Kronecker; operands need equal column counts.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// Face-splitting product: rowwise Kronecker, face_split(A,B) = khatri_rao(A^T,B^T)^T;
/// operands need equal row counts.
Matrix face_split(const Matrix& a, const Matrix& b);

/// Order-3 twist of a matrix: which=1 gives shape (1,m,k), which=2 gives
/// (m,1,k), which=3 gives (m,k,1); entries are a(i,j) in all three.
DenseTensor twist(const Matrix& a, int which);

double chebyshev_norm(const DenseTensor& t);
double frobenius_norm(const DenseTensor& t);

} // namespace pttk
