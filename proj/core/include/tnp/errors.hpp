#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tnp {

/// A symmetric matrix failed its positive-definiteness check during factorization.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

/// A labeled dataset is missing one of the two classes.
class EmptyClass : public std::runtime_error {
public:
    explicit EmptyClass(const std::string& what) : std::runtime_error(what) {}
};

/// Diagonal loading could not restore positive definiteness of a mode covariance.
class UnrecoverableSingularCovariance : public std::runtime_error {
public:
    explicit UnrecoverableSingularCovariance(const std::string& what)
        : std::runtime_error(what) {}
};

/// The class-0 calibration set is too small for the requested (alpha, delta).
class CalibrationSetTooSmall : public std::runtime_error {
public:
    CalibrationSetTooSmall(std::size_t required, std::size_t actual)
        : std::runtime_error("calibration set has " + std::to_string(actual) +
                             " class-0 scores but at least " + std::to_string(required) +
                             " are required"),
          required_(required),
          actual_(actual) {}

    std::size_t required() const { return required_; }
    std::size_t actual() const { return actual_; }

private:
    std::size_t required_;
    std::size_t actual_;
};

/// Wraps any failure inside a Monte-Carlo repetition with its repetition index.
class RepetitionError : public std::runtime_error {
public:
    RepetitionError(std::size_t repetition, const std::string& what)
        : std::runtime_error("repetition " + std::to_string(repetition) + ": " + what),
          repetition_(repetition) {}

    std::size_t repetition() const { return repetition_; }

private:
    std::size_t repetition_;
};

}  // namespace tnp
