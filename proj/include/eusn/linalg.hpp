#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eusn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<const double> values() const noexcept { return data_; }

    Matrix transposed() const;

    /// Element-wise comparison with IEEE semantics (-0.0 == 0.0).
    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// True when both sequences carry identical bit patterns.
bool bitwise_equal(std::span<const double> a, std::span<const double> b);
bool bitwise_equal(const Matrix& a, const Matrix& b);

Matrix multiply(const Matrix& a, const Matrix& b);
double max_abs_diff(const Matrix& a, const Matrix& b);
double norm2(std::span<const double> v);

/// Full eigenspectrum of a dense real (possibly non-symmetric) matrix.
/// Throws NumericalError when the QR iteration does not converge.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// max |lambda_i| from the general eigensolver.
double spectral_radius(const Matrix& m);

/// Largest singular value. Equals the spectral radius for normal matrices
/// (antisymmetric, orthogonal, symmetric) and is computed through a
/// symmetric eigenproblem, independently of `eigenvalues`.
double spectral_norm(const Matrix& m);

/// Solve the symmetric positive definite system a * x = b (b has several
/// right-hand sides as columns). Throws NumericalError when `a` is singular.
Matrix solve_spd(const Matrix& a, const Matrix& b);

}  // namespace eusn
