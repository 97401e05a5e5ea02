#include "hopls/tensor.hpp"

#include "hopls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hopls {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_mode(const Shape& shape, std::size_t mode) {
    if (mode >= shape.order()) {
        throw DimensionError("mode " + std::to_string(mode) + " out of range for shape " +
                             shape.to_string());
    }
}

std::size_t product(std::span<const std::size_t> dims, std::size_t begin, std::size_t end) {
    std::size_t p = 1;
    for (std::size_t k = begin; k < end; ++k) p *= dims[k];
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shape

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw DimensionError("shape must have order >= 1");
    numel_ = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw DimensionError("shape dims must be >= 1");
        if (numel_ > std::numeric_limits<std::size_t>::max() / d) {
            throw DimensionError("shape element count overflows");
        }
        numel_ *= d;
    }
}

Shape Shape::with_dim(std::size_t mode, std::size_t size) const {
    check_mode(*this, mode);
    auto dims = dims_;
    dims[mode] = size;
    return Shape(std::move(dims));
}

std::vector<std::size_t> Shape::trailing() const {
    return {dims_.begin() + (dims_.empty() ? 0 : 1), dims_.end()};
}

std::string Shape::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
    os << ')';
    return os.str();
}

// ---------------------------------------------------------------------------
// DenseTensor

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.numel(), 0.0) {
    if (shape_.order() == 0) throw DimensionError("tensor needs a non-empty shape");
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.order() == 0) throw DimensionError("tensor needs a non-empty shape");
    if (data_.size() != shape_.numel()) {
        throw DimensionError("data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_.to_string());
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw NumericalError("tensor data contains NaN or Inf");
    }
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
    if (m.size() == 0) throw DimensionError("empty matrix");
    RowMajorMatrix rm = m;
    return DenseTensor(Shape{static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                       std::vector<double>(rm.data(), rm.data() + rm.size()));
}

DenseTensor DenseTensor::from_vector(const Vector& v) {
    if (v.size() == 0) throw DimensionError("empty vector");
    return DenseTensor(Shape{static_cast<std::size_t>(v.size())},
                       std::vector<double>(v.data(), v.data() + v.size()));
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != shape_.order()) throw DimensionError("index order mismatch");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= shape_[k]) throw DimensionError("index out of range");
        flat = flat * shape_[k] + index[k];
    }
    return flat;
}

double& DenseTensor::at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }
double DenseTensor::at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }

DenseTensor DenseTensor::reshaped(Shape shape) const {
    if (shape.numel() != numel()) {
        throw DimensionError("cannot reshape " + shape_.to_string() + " to " + shape.to_string());
    }
    DenseTensor out(std::move(shape));
    std::copy(data_.begin(), data_.end(), out.data_.begin());
    return out;
}

Matrix DenseTensor::to_matrix() const {
    if (order() != 2) throw DimensionError("to_matrix needs an order-2 tensor, got " + shape_.to_string());
    return Eigen::Map<const RowMajorMatrix>(data_.data(), static_cast<Eigen::Index>(shape_[0]),
                                            static_cast<Eigen::Index>(shape_[1]));
}

double DenseTensor::squared_norm() const noexcept {
    return std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0);
}

double DenseTensor::norm() const noexcept { return std::sqrt(squared_norm()); }

DenseTensor& DenseTensor::operator+=(const DenseTensor& rhs) {
    if (rhs.shape_ != shape_) throw DimensionError("shape mismatch in tensor addition");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& rhs) {
    if (rhs.shape_ != shape_) throw DimensionError("shape mismatch in tensor subtraction");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// Multilinear primitives

Matrix matricize(const DenseTensor& t, std::size_t mode) {
    const Shape& shape = t.shape();
    check_mode(shape, mode);
    const std::size_t order = shape.order();
    const std::size_t rows = shape[mode];
    const std::size_t cols = t.numel() / rows;

    // Column stride of each non-unfolded mode: lowest remaining mode fastest.
    std::vector<std::size_t> col_stride(order, 0);
    std::size_t stride = 1;
    for (std::size_t k = 0; k < order; ++k) {
        if (k == mode) continue;
        col_stride[k] = stride;
        stride *= shape[k];
    }

    Matrix m(rows, cols);
    std::vector<std::size_t> idx(order, 0);
    std::size_t col = 0;
    const auto data = t.data();
    for (std::size_t flat = 0; flat < t.numel(); ++flat) {
        m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(col)) = data[flat];
        for (std::size_t k = order; k-- > 0;) {
            if (++idx[k] < shape[k]) {
                col += col_stride[k];
                break;
            }
            col -= (shape[k] - 1) * col_stride[k];
            idx[k] = 0;
        }
    }
    return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& target) {
    check_mode(target, mode);
    const std::size_t order = target.order();
    if (static_cast<std::size_t>(m.rows()) != target[mode] ||
        static_cast<std::size_t>(m.cols()) * target[mode] != target.numel()) {
        throw DimensionError("cannot fold " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " matrix along mode " +
                             std::to_string(mode) + " into " + target.to_string());
    }
    std::vector<std::size_t> col_stride(order, 0);
    std::size_t stride = 1;
    for (std::size_t k = 0; k < order; ++k) {
        if (k == mode) continue;
        col_stride[k] = stride;
        stride *= target[k];
    }

    DenseTensor t(target);
    auto data = t.data();
    std::vector<std::size_t> idx(order, 0);
    std::size_t col = 0;
    for (std::size_t flat = 0; flat < t.numel(); ++flat) {
        data[flat] = m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(col));
        for (std::size_t k = order; k-- > 0;) {
            if (++idx[k] < target[k]) {
                col += col_stride[k];
                break;
            }
            col -= (target[k] - 1) * col_stride[k];
            idx[k] = 0;
        }
    }
    return t;
}

DenseTensor mode_n_product(const DenseTensor& t, const Matrix& a, std::size_t mode) {
    const Shape& shape = t.shape();
    check_mode(shape, mode);
    const std::size_t in = shape[mode];
    if (static_cast<std::size_t>(a.cols()) != in) {
        throw DimensionError("mode-" + std::to_string(mode) + " product: matrix has " +
                             std::to_string(a.cols()) + " columns, tensor mode has size " +
                             std::to_string(in));
    }
    if (a.rows() == 0) throw DimensionError("mode product with an empty matrix");
    const std::size_t out_dim = static_cast<std::size_t>(a.rows());
    const std::size_t left = product(shape.dims(), 0, mode);
    const std::size_t right = product(shape.dims(), mode + 1, shape.order());

    DenseTensor out(shape.with_dim(mode, out_dim));
    const auto rows = static_cast<Eigen::Index>(out_dim);
    const auto cols = static_cast<Eigen::Index>(in);
    if (right == 1) {
        Eigen::Map<const RowMajorMatrix> src(t.data().data(), static_cast<Eigen::Index>(left), cols);
        Eigen::Map<RowMajorMatrix> dst(out.data().data(), static_cast<Eigen::Index>(left), rows);
        dst.noalias() = src * a.transpose();
        return out;
    }
    const auto r = static_cast<Eigen::Index>(right);
    for (std::size_t l = 0; l < left; ++l) {
        Eigen::Map<const RowMajorMatrix> src(t.data().data() + l * in * right, cols, r);
        Eigen::Map<RowMajorMatrix> dst(out.data().data() + l * out_dim * right, rows, r);
        dst.noalias() = a * src;
    }
    return out;
}

DenseTensor mode1_vector_product(const DenseTensor& g, const Vector& v) {
    if (g.shape()[0] != 1) {
        throw DimensionError("mode-1 vector product needs first dim 1, got shape " +
                             g.shape().to_string());
    }
    if (v.size() == 0) throw DimensionError("mode-1 vector product with an empty vector");
    Matrix column = v;
    return mode_n_product(g, column, 0);
}

double inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("inner product shape mismatch: " + a.shape().to_string() + " vs " +
                             b.shape().to_string());
    }
    const auto x = a.data();
    const auto y = b.data();
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

DenseTensor cross_cov_mode1(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape()[0] != y.shape()[0]) {
        throw DimensionError("cross-covariance needs equal first modes: " + x.shape().to_string() +
                             " vs " + y.shape().to_string());
    }
    const auto n = static_cast<Eigen::Index>(x.shape()[0]);
    const auto p = static_cast<Eigen::Index>(x.numel()) / n;
    const auto q = static_cast<Eigen::Index>(y.numel()) / n;

    std::vector<std::size_t> dims = x.shape().trailing();
    const auto ytrail = y.shape().trailing();
    dims.insert(dims.end(), ytrail.begin(), ytrail.end());
    if (dims.empty()) dims.push_back(1);

    Eigen::Map<const RowMajorMatrix> xm(x.data().data(), n, p);
    Eigen::Map<const RowMajorMatrix> ym(y.data().data(), n, q);
    DenseTensor c{Shape(std::move(dims))};
    Eigen::Map<RowMajorMatrix> cm(c.data().data(), p, q);
    cm.noalias() = xm.transpose() * ym;
    return c;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix kron_reversed(std::span<const Matrix> mats) {
    if (mats.empty()) return Matrix::Ones(1, 1);
    Matrix out = mats.back();
    for (std::size_t k = mats.size() - 1; k-- > 0;) out = kron(out, mats[k]);
    return out;
}

Vector vectorize(const DenseTensor& t) {
    const auto d = t.data();
    return Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
}

DenseTensor multilinear_product(const DenseTensor& t, std::span<const Matrix> mats,
                                Transpose transpose, std::optional<std::size_t> skip) {
    if (mats.size() != t.order()) {
        throw DimensionError("multilinear product needs one matrix per mode (" +
                             std::to_string(t.order()) + "), got " + std::to_string(mats.size()));
    }
    // Contract modes that shrink the tensor the most first.
    std::vector<std::size_t> modes;
    for (std::size_t k = 0; k < mats.size(); ++k) {
        if (!skip || *skip != k) modes.push_back(k);
    }
    auto out_dim = [&](std::size_t k) {
        return transpose == Transpose::yes ? mats[k].cols() : mats[k].rows();
    };
    auto in_dim = [&](std::size_t k) { return static_cast<double>(t.shape()[k]); };
    std::stable_sort(modes.begin(), modes.end(), [&](std::size_t a, std::size_t b) {
        return static_cast<double>(out_dim(a)) / in_dim(a) < static_cast<double>(out_dim(b)) / in_dim(b);
    });

    DenseTensor out = t;
    for (std::size_t k : modes) {
        if (transpose == Transpose::yes) {
            out = mode_n_product(out, mats[k].transpose(), k);
        } else {
            out = mode_n_product(out, mats[k], k);
        }
    }
    return out;
}

DenseTensor select_mode1(const DenseTensor& t, std::span<const std::size_t> rows) {
    if (rows.empty()) throw DimensionError("select_mode1 needs at least one row");
    const std::size_t stride = t.numel() / t.shape()[0];
    DenseTensor out(t.shape().with_dim(0, rows.size()));
    auto dst = out.data();
    const auto src = t.data();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= t.shape()[0]) throw DimensionError("select_mode1 row out of range");
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(rows[r] * stride), stride,
                    dst.begin() + static_cast<std::ptrdiff_t>(r * stride));
    }
    return out;
}

}  // namespace hopls
