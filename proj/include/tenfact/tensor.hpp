#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "tenfact/errors.hpp"

namespace tenfact {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Mode sizes of a multi-way array. Order 0 is a scalar.
///
/// All modes and element indices in the public API are 1-based, matching the
/// conventions of the file formats; only raw buffer offsets are 0-based.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<Index> dims);
    Shape(std::initializer_list<Index> dims) : Shape(std::vector<Index>(dims)) {}

    Index order() const noexcept { return static_cast<Index>(dims_.size()); }
    Index dim(Index mode) const;
    const std::vector<Index>& dims() const noexcept { return dims_; }
    Index count() const noexcept { return count_; }

    bool operator==(const Shape&) const = default;

    static constexpr Index kMaxOrder = 16;

private:
    std::vector<Index> dims_;
    Index count_ = 1;
};

/// Little-Endian linear position (1-based): 1 + sum_n (i_n - 1) * prod_{k<n} I_k.
/// The first mode varies fastest.
Index linear_index(std::span<const Index> index, const Shape& shape);
Index linear_index(std::initializer_list<Index> index, const Shape& shape);

/// Inverse of linear_index: the 1-based multi-index of a linear position.
std::vector<Index> multi_index(Index linear, const Shape& shape);

/// Dense real tensor in Little-Endian linear storage. Immutable in spirit:
/// operations return new tensors; in-place mutation is limited to element
/// writes during construction phases.
class DenseTensor {
public:
    DenseTensor() : data_(1, 0.0) {}
    explicit DenseTensor(Shape shape)
        : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_.count()), 0.0) {}
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    Index order() const noexcept { return shape_.order(); }
    Index size() const noexcept { return shape_.count(); }

    double at(std::span<const Index> index) const;
    double& at(std::span<const Index> index);
    double at(std::initializer_list<Index> index) const;
    double& at(std::initializer_list<Index> index);

    /// Raw buffer access, 0-based offsets.
    double operator[](Index pos) const { return data_[static_cast<std::size_t>(pos)]; }
    double& operator[](Index pos) { return data_[static_cast<std::size_t>(pos)]; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool operator==(const DenseTensor&) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Mode-n unfolding: the I_n x (prod of remaining dims) matrix whose columns
/// are the mode-n fibers, ordered Little-Endian over the remaining modes.
Matrix unfold(const DenseTensor& t, Index mode);

/// Inverse of unfold for the same mode and target shape.
DenseTensor fold(const Matrix& m, const Shape& target, Index mode);

/// Fold a flat Little-Endian value sequence into a tensor.
DenseTensor fold(std::span<const double> values, const Shape& target);

/// Stack J same-shape order-N tensors along a new last mode (slice j of the
/// result equals input j).
DenseTensor stack_last(std::span<const DenseTensor> parts);

/// Stack along a new first mode instead: result(j, i_1..i_N) = parts[j](i_1..i_N).
DenseTensor stack_first(std::span<const DenseTensor> parts);

/// Mode-n product t x_n a: unfold, multiply, fold. Requires cols(a) == I_n.
DenseTensor mode_n_product(const DenseTensor& t, const Matrix& a, Index mode);

/// Tensor contraction product over one mode pair (x_mode of x with y_mode of
/// y). Result modes are x's remaining modes followed by y's remaining modes.
DenseTensor contract(const DenseTensor& x, Index x_mode, const DenseTensor& y, Index y_mode);

/// Block contraction of the trailing modes [x_first..order(x)] of x with the
/// trailing modes [y_first..order(y)] of y (pairwise equal sizes). Contracting
/// all modes of both operands yields an order-0 tensor holding their scalar
/// product.
DenseTensor contract_block(const DenseTensor& x, Index x_first, const DenseTensor& y, Index y_first);

double scalar_product(const DenseTensor& a, const DenseTensor& b);

/// sqrt(<t, t>), so relative residuals are norm ratios.
double frobenius_norm(const DenseTensor& t);

}  // namespace tenfact
