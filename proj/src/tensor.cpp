#include "tenfact/tensor.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tenfact {

namespace {

std::string mode_msg(const char* what, Index mode, Index order) {
    return std::string(what) + ": mode " + std::to_string(mode) + " outside [1, " +
           std::to_string(order) + "]";
}

/// Stride of a 1-based mode: product of the sizes of all earlier modes.
Index stride_of(const Shape& s, Index mode) {
    Index stride = 1;
    for (Index k = 1; k < mode; ++k) stride *= s.dim(k);
    return stride;
}

}  // namespace

Shape::Shape(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (order() > kMaxOrder) {
        throw ShapeError("Shape: order " + std::to_string(order()) + " exceeds maximum " +
                         std::to_string(kMaxOrder));
    }
    count_ = 1;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        const Index d = dims_[n];
        if (d < 1) {
            throw ShapeError("Shape: dim of mode " + std::to_string(n + 1) +
                             " must be positive, got " + std::to_string(d));
        }
        if (count_ > std::numeric_limits<Index>::max() / d) {
            throw ShapeError("Shape: element count overflows");
        }
        count_ *= d;
    }
}

Index Shape::dim(Index mode) const {
    if (mode < 1 || mode > order()) throw std::out_of_range(mode_msg("Shape::dim", mode, order()));
    return dims_[static_cast<std::size_t>(mode - 1)];
}

Index linear_index(std::span<const Index> index, const Shape& shape) {
    if (static_cast<Index>(index.size()) != shape.order()) {
        throw ShapeError("linear_index: expected " + std::to_string(shape.order()) +
                         " indices, got " + std::to_string(index.size()));
    }
    Index pos = 1;
    Index stride = 1;
    for (Index n = 1; n <= shape.order(); ++n) {
        const Index i = index[static_cast<std::size_t>(n - 1)];
        if (i < 1 || i > shape.dim(n)) {
            throw std::out_of_range("linear_index: mode " + std::to_string(n) + " index " +
                                    std::to_string(i) + " outside [1, " +
                                    std::to_string(shape.dim(n)) + "]");
        }
        pos += (i - 1) * stride;
        stride *= shape.dim(n);
    }
    return pos;
}

Index linear_index(std::initializer_list<Index> index, const Shape& shape) {
    return linear_index(std::span<const Index>(index.begin(), index.size()), shape);
}

std::vector<Index> multi_index(Index linear, const Shape& shape) {
    if (linear < 1 || linear > shape.count()) {
        throw std::out_of_range("multi_index: position " + std::to_string(linear) +
                                " outside [1, " + std::to_string(shape.count()) + "]");
    }
    std::vector<Index> index(static_cast<std::size_t>(shape.order()));
    Index rem = linear - 1;
    for (Index n = 1; n <= shape.order(); ++n) {
        index[static_cast<std::size_t>(n - 1)] = rem % shape.dim(n) + 1;
        rem /= shape.dim(n);
    }
    return index;
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<Index>(data_.size()) != shape_.count()) {
        throw ShapeError("DenseTensor: data length " + std::to_string(data_.size()) +
                         " does not match element count " + std::to_string(shape_.count()));
    }
}

double DenseTensor::at(std::span<const Index> index) const {
    return data_[static_cast<std::size_t>(linear_index(index, shape_) - 1)];
}

double& DenseTensor::at(std::span<const Index> index) {
    return data_[static_cast<std::size_t>(linear_index(index, shape_) - 1)];
}

double DenseTensor::at(std::initializer_list<Index> index) const {
    return at(std::span<const Index>(index.begin(), index.size()));
}

double& DenseTensor::at(std::initializer_list<Index> index) {
    return at(std::span<const Index>(index.begin(), index.size()));
}

Matrix unfold(const DenseTensor& t, Index mode) {
    const Shape& s = t.shape();
    if (mode < 1 || mode > s.order()) {
        throw std::out_of_range(mode_msg("unfold", mode, s.order()));
    }
    const Index rows = s.dim(mode);
    const Index cols = s.count() / rows;
    const Index stride = stride_of(s, mode);
    const Index period = stride * rows;

    if (mode == 1) {
        // Little-Endian storage makes the mode-1 unfolding a plain reshape.
        return Eigen::Map<const Matrix>(t.data().data(), rows, cols);
    }
    Matrix m(rows, cols);
    for (Index q = 0; q < s.count(); ++q) {
        const Index low = q % stride;
        const Index row = (q / stride) % rows;
        const Index high = q / period;
        m(row, low + high * stride) = t[q];
    }
    return m;
}

DenseTensor fold(const Matrix& m, const Shape& target, Index mode) {
    if (mode < 1 || mode > target.order()) {
        throw std::out_of_range(mode_msg("fold", mode, target.order()));
    }
    if (m.rows() != target.dim(mode) || m.size() != target.count()) {
        throw ShapeError("fold: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " does not fill shape of " +
                         std::to_string(target.count()) + " elements on mode " +
                         std::to_string(mode));
    }
    DenseTensor t(target);
    const Index rows = target.dim(mode);
    const Index stride = stride_of(target, mode);
    const Index period = stride * rows;
    if (mode == 1) {
        Eigen::Map<Matrix>(t.data().data(), m.rows(), m.cols()) = m;
        return t;
    }
    for (Index q = 0; q < target.count(); ++q) {
        const Index low = q % stride;
        const Index row = (q / stride) % rows;
        const Index high = q / period;
        t[q] = m(row, low + high * stride);
    }
    return t;
}

DenseTensor fold(std::span<const double> values, const Shape& target) {
    if (static_cast<Index>(values.size()) != target.count()) {
        throw ShapeError("fold: " + std::to_string(values.size()) + " values cannot fill " +
                         std::to_string(target.count()) + " elements");
    }
    return DenseTensor(target, std::vector<double>(values.begin(), values.end()));
}

DenseTensor stack_last(std::span<const DenseTensor> parts) {
    if (parts.empty()) throw std::invalid_argument("stack_last: empty tensor list");
    const Shape& base = parts.front().shape();
    std::vector<Index> dims = base.dims();
    dims.push_back(static_cast<Index>(parts.size()));
    DenseTensor out((Shape(dims)));
    for (std::size_t j = 0; j < parts.size(); ++j) {
        if (parts[j].shape() != base) throw ShapeError("stack_last: shape mismatch at slice " + std::to_string(j + 1));
        std::copy(parts[j].data().begin(), parts[j].data().end(),
                  out.data().begin() + static_cast<std::ptrdiff_t>(j) * base.count());
    }
    return out;
}

DenseTensor stack_first(std::span<const DenseTensor> parts) {
    if (parts.empty()) throw std::invalid_argument("stack_first: empty tensor list");
    const Shape& base = parts.front().shape();
    const Index J = static_cast<Index>(parts.size());
    std::vector<Index> dims;
    dims.reserve(static_cast<std::size_t>(base.order()) + 1);
    dims.push_back(J);
    dims.insert(dims.end(), base.dims().begin(), base.dims().end());
    DenseTensor out((Shape(dims)));
    for (Index j = 0; j < J; ++j) {
        const DenseTensor& part = parts[static_cast<std::size_t>(j)];
        if (part.shape() != base) throw ShapeError("stack_first: shape mismatch at slice " + std::to_string(j + 1));
        for (Index q = 0; q < base.count(); ++q) out[j + q * J] = part[q];
    }
    return out;
}

DenseTensor mode_n_product(const DenseTensor& t, const Matrix& a, Index mode) {
    const Shape& s = t.shape();
    if (mode < 1 || mode > s.order()) {
        throw std::out_of_range(mode_msg("mode_n_product", mode, s.order()));
    }
    if (a.cols() != s.dim(mode)) {
        throw ShapeError("mode_n_product: matrix has " + std::to_string(a.cols()) +
                         " columns, mode " + std::to_string(mode) + " has size " +
                         std::to_string(s.dim(mode)));
    }
    std::vector<Index> dims = s.dims();
    dims[static_cast<std::size_t>(mode - 1)] = a.rows();
    return fold(a * unfold(t, mode), Shape(dims), mode);
}

DenseTensor contract(const DenseTensor& x, Index x_mode, const DenseTensor& y, Index y_mode) {
    if (x_mode < 1 || x_mode > x.order()) throw std::out_of_range(mode_msg("contract", x_mode, x.order()));
    if (y_mode < 1 || y_mode > y.order()) throw std::out_of_range(mode_msg("contract", y_mode, y.order()));
    if (x.shape().dim(x_mode) != y.shape().dim(y_mode)) {
        throw ShapeError("contract: mode sizes differ, " + std::to_string(x.shape().dim(x_mode)) +
                         " vs " + std::to_string(y.shape().dim(y_mode)));
    }
    // Columns of both unfoldings are Little-Endian over the remaining modes,
    // so the Gram-style product already lands in the result's linear order.
    const Matrix z = unfold(x, x_mode).transpose() * unfold(y, y_mode);
    std::vector<Index> dims;
    for (Index n = 1; n <= x.order(); ++n)
        if (n != x_mode) dims.push_back(x.shape().dim(n));
    for (Index m = 1; m <= y.order(); ++m)
        if (m != y_mode) dims.push_back(y.shape().dim(m));
    return fold(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), Shape(dims));
}

DenseTensor contract_block(const DenseTensor& x, Index x_first, const DenseTensor& y, Index y_first) {
    if (x_first < 1 || x_first > x.order()) throw std::out_of_range(mode_msg("contract_block", x_first, x.order()));
    if (y_first < 1 || y_first > y.order()) throw std::out_of_range(mode_msg("contract_block", y_first, y.order()));
    const Index len = x.order() - x_first + 1;
    if (len != y.order() - y_first + 1) {
        throw ShapeError("contract_block: block lengths differ, " + std::to_string(len) + " vs " +
                         std::to_string(y.order() - y_first + 1));
    }
    Index shared = 1;
    for (Index k = 0; k < len; ++k) {
        const Index dx = x.shape().dim(x_first + k);
        const Index dy = y.shape().dim(y_first + k);
        if (dx != dy) {
            throw ShapeError("contract_block: paired modes " + std::to_string(x_first + k) + "/" +
                             std::to_string(y_first + k) + " have sizes " + std::to_string(dx) +
                             " vs " + std::to_string(dy));
        }
        shared *= dx;
    }
    // Trailing blocks are the slow Little-Endian modes, so both operands map
    // directly onto (free x shared) matrices without copying.
    const Index free_x = x.size() / shared;
    const Index free_y = y.size() / shared;
    Eigen::Map<const Matrix> xm(x.data().data(), free_x, shared);
    Eigen::Map<const Matrix> ym(y.data().data(), free_y, shared);
    const Matrix z = xm * ym.transpose();
    std::vector<Index> dims;
    for (Index n = 1; n < x_first; ++n) dims.push_back(x.shape().dim(n));
    for (Index m = 1; m < y_first; ++m) dims.push_back(y.shape().dim(m));
    return fold(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), Shape(dims));
}

double scalar_product(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("scalar_product: shapes differ");
    double sum = 0.0;
    for (Index q = 0; q < a.size(); ++q) sum += a[q] * b[q];
    return sum;
}

double frobenius_norm(const DenseTensor& t) {
    return std::sqrt(scalar_product(t, t));
}

}  // namespace tenfact
