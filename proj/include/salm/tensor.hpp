#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace salm {

/// Extents (n_1, ..., n_N) of an N-way tensor, N >= 1.
///
/// Every extent is at least one and the element count must fit in size_t.
/// Modes are addressed 0-based throughout the API: mode k here is the
/// conventional 1-based mode k+1.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims);
    Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t operator[](std::size_t mode) const { return dims_[mode]; }
    std::span<const std::size_t> dims() const noexcept { return dims_; }

    /// Product of all extents.
    std::size_t numel() const noexcept { return numel_; }

    /// Product of extents of every mode other than `mode` (the column count J of the unfolding).
    std::size_t complement_size(std::size_t mode) const;

    /// Copy of this shape with extent `mode` replaced by `extent`.
    Shape with_extent(std::size_t mode, std::size_t extent) const;

    /// "n1xn2x...xnN".
    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t numel_ = 0;
};

/// Dense N-way array of doubles stored first-index-fastest: the linear offset of
/// (i_1, ..., i_N) is i_1 + n_1 (i_2 + n_2 (i_3 + ...)) with 0-based indices.
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero tensor of the given shape.
    explicit DenseTensor(Shape shape);

    /// Takes ownership of `data`, which must hold exactly shape.numel() values.
    DenseTensor(Shape shape, std::vector<double> data);

    static DenseTensor constant(const Shape& shape, double value);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator[](std::size_t offset) const { return data_[offset]; }
    double& operator[](std::size_t offset) { return data_[offset]; }

    /// Element at a 0-based multi-index.
    double at(std::span<const std::size_t> index) const;
    double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    /// Linear offset of a 0-based multi-index; throws DimensionError when out of range.
    std::size_t offset_of(std::span<const std::size_t> index) const;

    bool all_finite() const noexcept;

    /// Flat data viewed as a column vector.
    Eigen::Map<const Eigen::VectorXd> vec() const {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }
    Eigen::Map<Eigen::VectorXd> vec() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(double scale);

    friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
    friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
    friend DenseTensor operator*(DenseTensor a, double s) { return a *= s; }
    friend DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

    /// Exact (bitwise on values) equality of shape and data.
    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Mode-n unfolding X_(n): an n_n x J_n matrix plus what is needed to refold it.
struct UnfoldedMatrix {
    Eigen::MatrixXd matrix;
    std::size_t mode = 0;
    Shape origin_shape;
};

/// Sum of entrywise products. Throws DimensionError on shape mismatch.
double inner_product(const DenseTensor& a, const DenseTensor& b);

double frobenius_norm(const DenseTensor& a);

/// Mode-`mode` unfolding. Element (i_n, j) holds x(i_1, ..., i_N) with
/// j = sum_{k != n} i_k V_k and V_k the product of the extents of modes
/// below k other than n (0-based form of the usual 1-based index map).
/// Mode 0 is a plain reshape of the flat data; other modes are strided gathers.
UnfoldedMatrix unfold(const DenseTensor& x, std::size_t mode);

/// Inverse of unfold. Throws DimensionError when the matrix does not conform
/// to origin_shape and ModeError when the mode is out of range.
DenseTensor refold(const UnfoldedMatrix& m);

/// Refold a bare matrix along `mode` into `shape`.
DenseTensor refold(const Eigen::Ref<const Eigen::MatrixXd>& matrix, std::size_t mode, const Shape& shape);

/// i-mode product x ×_mode u, i.e. the tensor whose mode unfolding is u · X_(mode).
/// `u` is L x n_mode; the result has extent L in `mode`.
DenseTensor mode_product(const DenseTensor& x, const Eigen::Ref<const Eigen::MatrixXd>& u, std::size_t mode);

}  // namespace salm
