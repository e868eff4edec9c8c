#include "tnp/tensor.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace tnp {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("shape must have at least one mode");
    total_ = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw std::invalid_argument("every mode size must be >= 1");
        total_ *= d;
    }
}

std::size_t Shape::stride(std::size_t mode) const {
    if (mode >= dims_.size()) throw std::out_of_range("mode index out of range");
    std::size_t s = 1;
    for (std::size_t l = 0; l < mode; ++l) s *= dims_[l];
    return s;
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.total(), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.total()) {
        throw std::invalid_argument("tensor data length does not match shape");
    }
}

TuckerFactors::TuckerFactors(DenseTensor core_tensor, std::vector<Matrix> factor_list)
    : core(std::move(core_tensor)), factors(std::move(factor_list)) {
    const std::size_t m = core.order();
    if (factors.size() != m) {
        throw std::invalid_argument("tucker factors: one factor per core mode required");
    }
    for (std::size_t mode = 0; mode < m; ++mode) {
        const Matrix& u = factors[mode];
        const std::size_t r = core.shape().dim(mode);
        if (u.cols() != r) {
            throw std::invalid_argument("tucker factor " + std::to_string(mode) +
                                        " column count does not match core");
        }
        if (u.rows() < r) {
            throw std::invalid_argument("tucker factor " + std::to_string(mode) +
                                        " has rank larger than its mode size");
        }
        // U^T U = I to 1e-10 per entry.
        for (std::size_t a = 0; a < r; ++a) {
            for (std::size_t b = a; b < r; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < u.rows(); ++i) dot += u(i, a) * u(i, b);
                const double target = (a == b) ? 1.0 : 0.0;
                if (std::fabs(dot - target) > 1e-10) {
                    throw std::invalid_argument("tucker factor " + std::to_string(mode) +
                                                " does not have orthonormal columns");
                }
            }
        }
    }
}

namespace {

void check_mode(const Shape& shape, std::size_t mode) {
    if (mode >= shape.order()) {
        throw std::out_of_range("mode index " + std::to_string(mode) +
                                " out of range for order " + std::to_string(shape.order()));
    }
}

}  // namespace

Matrix unfold(const DenseTensor& x, std::size_t mode) {
    check_mode(x.shape(), mode);
    const Shape& shape = x.shape();
    const std::size_t dm = shape.dim(mode);
    const std::size_t s = shape.stride(mode);        // block below mode
    const std::size_t outer = shape.total() / (s * dm);
    Matrix result(dm, shape.total_except(mode));
    const double* src = x.data();
    // Column of entry (inner, i_m, o) is inner + o*s; source index is
    // inner + i_m*s + o*s*dm.
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t im = 0; im < dm; ++im) {
            const double* block = src + (o * dm + im) * s;
            for (std::size_t in = 0; in < s; ++in) {
                result(im, in + o * s) = block[in];
            }
        }
    }
    return result;
}

DenseTensor fold(const Matrix& a, std::size_t mode, const Shape& shape) {
    check_mode(shape, mode);
    const std::size_t dm = shape.dim(mode);
    if (a.rows() != dm || a.cols() != shape.total_except(mode)) {
        throw std::invalid_argument("fold: matrix size does not match target shape");
    }
    const std::size_t s = shape.stride(mode);
    const std::size_t outer = shape.total() / (s * dm);
    DenseTensor result(shape);
    double* dst = result.data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t im = 0; im < dm; ++im) {
            double* block = dst + (o * dm + im) * s;
            for (std::size_t in = 0; in < s; ++in) {
                block[in] = a(im, in + o * s);
            }
        }
    }
    return result;
}

DenseTensor mode_product(const DenseTensor& x, const Matrix& a, std::size_t mode) {
    check_mode(x.shape(), mode);
    const Shape& shape = x.shape();
    const std::size_t dm = shape.dim(mode);
    if (a.cols() != dm) {
        throw std::invalid_argument("mode_product: matrix has " + std::to_string(a.cols()) +
                                    " columns but mode " + std::to_string(mode) + " has size " +
                                    std::to_string(dm));
    }
    const std::size_t k = a.rows();
    std::vector<std::size_t> new_dims = shape.dims();
    new_dims[mode] = k;
    DenseTensor result{Shape(new_dims)};

    const std::size_t s = shape.stride(mode);
    const std::size_t outer = shape.total() / (s * dm);
    const double* src = x.data();
    double* dst = result.data();

    if (s == 1) {
        // Mode 1: each output entry is a dot product along a contiguous fiber.
        for (std::size_t o = 0; o < outer; ++o) {
            const double* xo = src + o * dm;
            double* yo = dst + o * k;
            for (std::size_t j = 0; j < k; ++j) {
                double sum = 0.0;
                for (std::size_t t = 0; t < dm; ++t) sum += a(j, t) * xo[t];
                yo[j] = sum;
            }
        }
    } else {
        // Each outer block is an s x d_m panel; accumulate columns.
        for (std::size_t o = 0; o < outer; ++o) {
            const double* xo = src + o * s * dm;
            double* yo = dst + o * s * k;
            for (std::size_t j = 0; j < k; ++j) {
                double* yj = yo + j * s;
                for (std::size_t t = 0; t < dm; ++t) {
                    axpy(yj, a(j, t), xo + t * s, s);
                }
            }
        }
    }
    return result;
}

DenseTensor multi_mode_product(const DenseTensor& x, const std::vector<const Matrix*>& maps) {
    if (maps.size() != x.order()) {
        throw std::invalid_argument("multi_mode_product: one slot per mode required");
    }
    DenseTensor result = x;
    for (std::size_t m = 0; m < maps.size(); ++m) {
        if (maps[m] != nullptr) result = mode_product(result, *maps[m], m);
    }
    return result;
}

double inner(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape()) throw std::invalid_argument("inner: shape mismatch");
    double s = 0.0;
    const double* xp = x.data();
    const double* yp = y.data();
    for (std::size_t i = 0; i < x.size(); ++i) s += xp[i] * yp[i];
    return s;
}

double frobenius_norm(const DenseTensor& x) {
    double s = 0.0;
    const double* xp = x.data();
    for (std::size_t i = 0; i < x.size(); ++i) s += xp[i] * xp[i];
    return std::sqrt(s);
}

DenseTensor tucker_reconstruct(const TuckerFactors& t) {
    DenseTensor result = t.core;
    for (std::size_t m = 0; m < t.factors.size(); ++m) {
        result = mode_product(result, t.factors[m], m);
    }
    return result;
}

DenseTensor add(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape()) throw std::invalid_argument("tensor add: shape mismatch");
    DenseTensor r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += y[i];
    return r;
}

DenseTensor subtract(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape()) throw std::invalid_argument("tensor subtract: shape mismatch");
    DenseTensor r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    return r;
}

DenseTensor scale(const DenseTensor& x, double factor) {
    DenseTensor r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= factor;
    return r;
}

}  // namespace tnp
