#pragma once

// Inner-loop arithmetic used by the reservoir, analysis and readout code.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant compiled in its own translation unit. The active table is chosen
// once at startup from CPUID; `EUSN_ISA=scalar` forces the reference path.
// Variants agree to rounding, not bitwise (different summation order).

#include <cstddef>
#include <span>
#include <string_view>

#include "eusn/linalg.hpp"

namespace eusn::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
    Isa isa;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y = A x, A row-major rows x cols.
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// sum_i x[i]^2
    double (*sumsq)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(EUSN_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

/// Whether `isa` was compiled in and the running CPU supports it.
bool supported(Isa isa);

/// Table for a specific ISA. Throws eusn::ConfigError if unsupported.
const KernelTable& table(Isa isa);

/// The table selected for this process.
const KernelTable& active();

/// Override the process-wide selection (tests, benchmarks).
void set_active(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
    active().gemv(a.data(), a.rows(), a.cols(), x.data(), y.data());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace eusn::kernels
