#pragma once

#include "tnp/matrix.hpp"

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace tnp {

/// Mode sizes (d_1, ..., d_M) of a dense tensor. Order M >= 1 and every
/// mode size >= 1; both are enforced at construction.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}
    explicit Shape(std::vector<std::size_t> dims);

    std::size_t order() const { return dims_.size(); }
    std::size_t dim(std::size_t mode) const { return dims_[mode]; }
    const std::vector<std::size_t>& dims() const { return dims_; }

    /// Product of all mode sizes.
    std::size_t total() const { return total_; }

    /// Product of all mode sizes except `mode` (d_{-m}).
    std::size_t total_except(std::size_t mode) const { return total_ / dims_[mode]; }

    /// Linear stride of `mode` under mode-1-fastest storage.
    std::size_t stride(std::size_t mode) const;

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }
    bool operator!=(const Shape& other) const { return dims_ != other.dims_; }

private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 0;
};

/// Dense order-M tensor of doubles, stored mode-1-fastest: the linear index
/// of entry (i_1, ..., i_M) (0-based) is i_1 + d_1 i_2 + d_1 d_2 i_3 + ...
/// With this layout vectorize() is the vec convention under which
/// vec(X x_m A) = (I (x) ... (x) A (x) ... (x) I) vec(X), the Kronecker factor
/// for mode 1 sitting rightmost.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    std::size_t order() const { return shape_.order(); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    /// The stored coefficients in vec order (storage order IS the vec order).
    const std::vector<double>& vectorize() const { return data_; }

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Tucker representation: core of shape (r_1, ..., r_M) plus one
/// column-orthonormal d_m x r_m factor per mode. Orthonormality is checked
/// at construction to 1e-10 per entry.
struct TuckerFactors {
    DenseTensor core;
    std::vector<Matrix> factors;

    TuckerFactors(DenseTensor core_tensor, std::vector<Matrix> factor_list);
};

/// Mode-m matricization (d_m x d_{-m}), Kolda-Bader column ordering:
/// entry (i_1..i_M) lands in row i_m, column sum_{l != m} i_l * prod_{p<l, p != m} d_p.
Matrix unfold(const DenseTensor& x, std::size_t mode);

/// Inverse of unfold: fold(unfold(x, m), m, x.shape()) == x exactly.
DenseTensor fold(const Matrix& a, std::size_t mode, const Shape& shape);

/// X x_m A with A of size k x d_m; mode m is resized to k.
DenseTensor mode_product(const DenseTensor& x, const Matrix& a, std::size_t mode);

/// Applies mode_product for every non-null slot; null slots leave the mode
/// untouched. The result does not depend on application order.
DenseTensor multi_mode_product(const DenseTensor& x, const std::vector<const Matrix*>& maps);

/// Frobenius inner product <x, y> = vec(x)^T vec(y).
double inner(const DenseTensor& x, const DenseTensor& y);

double frobenius_norm(const DenseTensor& x);

/// core x_1 U_1 x_2 ... x_M U_M.
DenseTensor tucker_reconstruct(const TuckerFactors& t);

DenseTensor add(const DenseTensor& x, const DenseTensor& y);
DenseTensor subtract(const DenseTensor& x, const DenseTensor& y);
DenseTensor scale(const DenseTensor& x, double factor);

}  // namespace tnp
