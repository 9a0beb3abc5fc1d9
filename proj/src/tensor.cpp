#include "salm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "salm/errors.hpp"

namespace salm {

namespace {

void check_mode(const Shape& shape, std::size_t mode) {
    if (mode >= shape.order()) {
        throw ModeError("mode " + std::to_string(mode) + " out of range for " + std::to_string(shape.order()) +
                        "-way tensor");
    }
}

void check_same_shape(const DenseTensor& a, const DenseTensor& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape().to_string() + " vs " +
                             b.shape().to_string());
    }
}

// Extents of the modes below and above `mode`.
struct Split {
    std::size_t below;
    std::size_t extent;
    std::size_t above;
};

Split split_at(const Shape& shape, std::size_t mode) {
    auto dims = shape.dims();
    std::size_t below = 1;
    for (std::size_t k = 0; k < mode; ++k) below *= dims[k];
    std::size_t above = 1;
    for (std::size_t k = mode + 1; k < dims.size(); ++k) above *= dims[k];
    return {below, dims[mode], above};
}

}  // namespace

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("shape must have at least one mode");
    std::size_t n = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw DimensionError("shape extents must be positive");
        if (n > std::numeric_limits<std::size_t>::max() / d) throw DimensionError("shape element count overflows");
        n *= d;
    }
    numel_ = n;
}

std::size_t Shape::complement_size(std::size_t mode) const {
    check_mode(*this, mode);
    return numel_ / dims_[mode];
}

Shape Shape::with_extent(std::size_t mode, std::size_t extent) const {
    check_mode(*this, mode);
    auto dims = dims_;
    dims[mode] = extent;
    return Shape(std::move(dims));
}

std::string Shape::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (k) out += 'x';
        out += std::to_string(dims_[k]);
    }
    return out;
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.numel(), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
        throw DimensionError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                             shape_.to_string());
    }
}

DenseTensor DenseTensor::constant(const Shape& shape, double value) {
    return DenseTensor(shape, std::vector<double>(shape.numel(), value));
}

std::size_t DenseTensor::offset_of(std::span<const std::size_t> index) const {
    if (index.size() != shape_.order()) throw DimensionError("multi-index has wrong number of modes");
    std::size_t offset = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= shape_[k]) throw DimensionError("multi-index out of range");
        offset += index[k] * stride;
        stride *= shape_[k];
    }
    return offset;
}

double DenseTensor::at(std::span<const std::size_t> index) const { return data_[offset_of(index)]; }

bool DenseTensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    check_same_shape(*this, other, "tensor addition");
    vec() += other.vec();
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
    check_same_shape(*this, other, "tensor subtraction");
    vec() -= other.vec();
    return *this;
}

DenseTensor& DenseTensor::operator*=(double scale) {
    vec() *= scale;
    return *this;
}

double inner_product(const DenseTensor& a, const DenseTensor& b) {
    check_same_shape(a, b, "inner_product");
    return a.vec().dot(b.vec());
}

double frobenius_norm(const DenseTensor& a) { return a.vec().norm(); }

UnfoldedMatrix unfold(const DenseTensor& x, std::size_t mode) {
    const Shape& shape = x.shape();
    check_mode(shape, mode);
    const auto [below, extent, above] = split_at(shape, mode);

    Eigen::MatrixXd m(static_cast<Eigen::Index>(extent), static_cast<Eigen::Index>(below * above));
    const double* src = x.data().data();
    double* dst = m.data();
    if (below == 1) {
        std::copy(src, src + x.size(), dst);
    } else {
        // Source run (l = 0..below-1) at fixed (r, h) lands in row r, columns l + below*h.
        for (std::size_t h = 0; h < above; ++h) {
            for (std::size_t r = 0; r < extent; ++r) {
                const double* run = src + (r + extent * h) * below;
                double* out = dst + r + extent * below * h;
                for (std::size_t l = 0; l < below; ++l) out[l * extent] = run[l];
            }
        }
    }
    return {std::move(m), mode, shape};
}

DenseTensor refold(const Eigen::Ref<const Eigen::MatrixXd>& matrix, std::size_t mode, const Shape& shape) {
    check_mode(shape, mode);
    const auto [below, extent, above] = split_at(shape, mode);
    if (static_cast<std::size_t>(matrix.rows()) != extent ||
        static_cast<std::size_t>(matrix.cols()) != below * above) {
        throw DimensionError("refold: " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                             " matrix does not conform to mode " + std::to_string(mode) + " of " +
                             shape.to_string());
    }

    std::vector<double> data(shape.numel());
    double* dst = data.data();
    for (std::size_t h = 0; h < above; ++h) {
        for (std::size_t r = 0; r < extent; ++r) {
            double* run = dst + (r + extent * h) * below;
            for (std::size_t l = 0; l < below; ++l) {
                run[l] = matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l + below * h));
            }
        }
    }
    return DenseTensor(shape, std::move(data));
}

DenseTensor refold(const UnfoldedMatrix& m) { return refold(m.matrix, m.mode, m.origin_shape); }

DenseTensor mode_product(const DenseTensor& x, const Eigen::Ref<const Eigen::MatrixXd>& u, std::size_t mode) {
    check_mode(x.shape(), mode);
    if (static_cast<std::size_t>(u.cols()) != x.shape()[mode]) {
        throw DimensionError("mode_product: matrix has " + std::to_string(u.cols()) + " columns, mode extent is " +
                             std::to_string(x.shape()[mode]));
    }
    if (u.rows() == 0) throw DimensionError("mode_product: matrix has no rows");
    const Eigen::MatrixXd product = u * unfold(x, mode).matrix;
    return refold(product, mode, x.shape().with_extent(mode, static_cast<std::size_t>(u.rows())));
}

}  // namespace salm
