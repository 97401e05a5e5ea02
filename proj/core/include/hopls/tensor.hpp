#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hopls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered list of mode sizes (I_1, ..., I_N). Every dim is >= 1.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> dims);
    explicit Shape(std::vector<std::size_t> dims);

    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t operator[](std::size_t mode) const { return dims_[mode]; }
    std::span<const std::size_t> dims() const noexcept { return dims_; }
    std::size_t numel() const noexcept { return numel_; }

    /// Copy with mode `mode` resized to `size`.
    Shape with_dim(std::size_t mode, std::size_t size) const;
    /// Dims after the first mode, i.e. (I_2, ..., I_N).
    std::vector<std::size_t> trailing() const;

    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t numel_ = 0;
};

/// Dense N-way array of doubles stored row-major (last index fastest).
///
/// Constructors that take external data reject NaN and Inf. Arithmetic
/// results are not rechecked.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> data);

    static DenseTensor from_matrix(const Matrix& m);
    static DenseTensor from_vector(const Vector& v);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.order(); }
    std::size_t numel() const noexcept { return data_.size(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    double& at(std::span<const std::size_t> index);
    double at(std::span<const std::size_t> index) const;
    double& at(std::initializer_list<std::size_t> index) { return at(std::span(index.begin(), index.size())); }
    double at(std::initializer_list<std::size_t> index) const { return at(std::span(index.begin(), index.size())); }

    /// Same data under a different shape with equal element count.
    DenseTensor reshaped(Shape shape) const;
    /// Order-2 tensor viewed as an Eigen matrix.
    Matrix to_matrix() const;

    double squared_norm() const noexcept;
    double norm() const noexcept;

    DenseTensor& operator+=(const DenseTensor& rhs);
    DenseTensor& operator-=(const DenseTensor& rhs);
    DenseTensor& operator*=(double s) noexcept;

    friend DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs) { return lhs += rhs; }
    friend DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs) { return lhs -= rhs; }
    friend DenseTensor operator*(DenseTensor lhs, double s) { return lhs *= s; }
    friend DenseTensor operator*(double s, DenseTensor rhs) { return rhs *= s; }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    std::size_t flat_index(std::span<const std::size_t> index) const;

    Shape shape_;
    std::vector<double> data_;
};

/// Mode-n unfolding. Rows index `mode`; columns enumerate the remaining
/// modes in increasing order with the lowest remaining mode varying fastest,
/// so that [[G; A_1..A_N]]_(1) = A_1 G_(1) (A_N (x) ... (x) A_2)^T.
/// Modes are zero-based.
Matrix matricize(const DenseTensor& t, std::size_t mode);

/// Inverse of matricize under the same column ordering.
DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& target);

/// t x_mode a: contracts mode `mode` of t with the columns of a.
DenseTensor mode_n_product(const DenseTensor& t, const Matrix& a, std::size_t mode);

/// g x_1 v for a tensor whose first dim is 1; result has first dim v.size().
DenseTensor mode1_vector_product(const DenseTensor& g, const Vector& v);

double inner(const DenseTensor& a, const DenseTensor& b);

/// Contraction over the shared first mode: result shape (I_2..I_N, J_2..J_M).
DenseTensor cross_cov_mode1(const DenseTensor& x, const DenseTensor& y);

Matrix kron(const Matrix& a, const Matrix& b);

/// Kronecker product of `mats` taken in reverse order: mats.back() (x) ... (x) mats.front().
Matrix kron_reversed(std::span<const Matrix> mats);

/// Flat copy in row-major order.
Vector vectorize(const DenseTensor& t);

enum class Transpose { no, yes };

/// Applies t x_n mats[n] (or mats[n]^T) for every mode n, skipping `skip` if given.
DenseTensor multilinear_product(const DenseTensor& t, std::span<const Matrix> mats,
                                Transpose transpose = Transpose::no,
                                std::optional<std::size_t> skip = std::nullopt);

/// Sub-tensor made of the given first-mode slices, in the given order.
DenseTensor select_mode1(const DenseTensor& t, std::span<const std::size_t> rows);

}  // namespace hopls
