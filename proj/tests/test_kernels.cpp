#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eusn/errors.hpp"
#include "eusn/kernels.hpp"

namespace {

using namespace eusn;
namespace k = eusn::kernels;

std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    return v;
}

// Plain loops, kept separate from the library's scalar table.
double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(s);
}

std::vector<const k::KernelTable*> tables() {
    std::vector<const k::KernelTable*> out{&k::scalar_table()};
#if defined(EUSN_HAVE_AVX2)
    if (k::supported(k::Isa::Avx2)) out.push_back(&k::avx2_table());
#endif
    return out;
}

TEST(Kernels, DotMatchesNaiveAcrossLengths) {
    std::mt19937_64 gen(1);
    for (const auto* t : tables()) {
        for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 31u, 100u, 1001u}) {
            auto a = random_vector(n, gen), b = random_vector(n, gen);
            EXPECT_NEAR(t->dot(a.data(), b.data(), n), naive_dot(a, b), 1e-13 * (1.0 + n))
                << k::to_string(t->isa) << " n=" << n;
        }
    }
}

TEST(Kernels, GemvMatchesNaive) {
    std::mt19937_64 gen(2);
    for (const auto* t : tables()) {
        for (std::size_t rows : {1u, 2u, 3u, 4u, 5u, 9u, 100u}) {
            for (std::size_t cols : {1u, 3u, 4u, 8u, 13u, 100u}) {
                auto a = random_vector(rows * cols, gen), x = random_vector(cols, gen);
                std::vector<double> y(rows, 99.0);
                t->gemv(a.data(), rows, cols, x.data(), y.data());
                for (std::size_t i = 0; i < rows; ++i) {
                    std::vector<double> row(a.begin() + i * cols, a.begin() + (i + 1) * cols);
                    EXPECT_NEAR(y[i], naive_dot(row, x), 1e-13 * (1.0 + cols));
                }
            }
        }
    }
}

TEST(Kernels, AxpyAndSumsq) {
    std::mt19937_64 gen(3);
    for (const auto* t : tables()) {
        for (std::size_t n : {0u, 1u, 5u, 8u, 33u}) {
            auto x = random_vector(n, gen), y = random_vector(n, gen);
            auto expect = y;
            for (std::size_t i = 0; i < n; ++i) expect[i] += 0.37 * x[i];
            t->axpy(0.37, x.data(), y.data(), n);
            for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], expect[i], 1e-15);
            EXPECT_NEAR(t->sumsq(x.data(), n), naive_dot(x, x), 1e-13);
        }
    }
}

TEST(Kernels, VariantsAgreeOnRandomInputs) {
#if defined(EUSN_HAVE_AVX2)
    if (!k::supported(k::Isa::Avx2)) GTEST_SKIP() << "CPU lacks AVX2/FMA";
    std::mt19937_64 gen(4);
    const auto& s = k::scalar_table();
    const auto& v = k::avx2_table();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + gen() % 64, cols = 1 + gen() % 64;
        auto a = random_vector(rows * cols, gen), x = random_vector(cols, gen);
        std::vector<double> ys(rows), yv(rows);
        s.gemv(a.data(), rows, cols, x.data(), ys.data());
        v.gemv(a.data(), rows, cols, x.data(), yv.data());
        for (std::size_t i = 0; i < rows; ++i) EXPECT_NEAR(ys[i], yv[i], 1e-13);
        EXPECT_NEAR(s.dot(a.data(), a.data(), rows), v.dot(a.data(), a.data(), rows), 1e-13);
    }
#else
    GTEST_SKIP() << "AVX2 variant not compiled";
#endif
}

TEST(Kernels, SelectionOverride) {
    const auto original = k::active().isa;
    k::set_active(k::Isa::Scalar);
    EXPECT_EQ(k::active().isa, k::Isa::Scalar);
    if (!k::supported(k::Isa::Avx2)) {
        EXPECT_THROW(k::set_active(k::Isa::Avx2), ConfigError);
    }
    k::set_active(original);
}

}  // namespace
