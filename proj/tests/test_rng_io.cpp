#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <set>
#include <stdexcept>

#include "eusn/errors.hpp"
#include "eusn/io.hpp"
#include "eusn/parallel.hpp"
#include "eusn/rng.hpp"

namespace {

using namespace eusn;

TEST(Rng, Reproducible) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformBounds) {
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double v = r.uniform(-0.5, 0.5);
        EXPECT_GE(v, -0.5);
        EXPECT_LT(v, 0.5);
    }
}

TEST(Rng, SymmetricZeroScaleStillConsumes) {
    Rng a(7), b(7);
    EXPECT_EQ(a.symmetric(0.0), 0.0);
    b.uniform(-1.0, 1.0);
    EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DerivedStreamsDiffer) {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 1000; ++s) seeds.insert(Rng::derive(123, s));
    EXPECT_EQ(seeds.size(), 1000u);
    Rng parent(9);
    const auto before = Rng(9).next_u64();
    (void)parent.split(3);
    EXPECT_EQ(parent.next_u64(), before);
}

TEST(Io, FormatRoundTripsExactly) {
    Rng r(11);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(r.uniform(-1, 1), static_cast<int>(r.next_u64() % 200) - 100);
        auto back = parse_double(format_double(v));
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(std::memcmp(&v, &*back, sizeof v), 0);
    }
    EXPECT_EQ(*parse_double("+1.5"), 1.5);
    EXPECT_FALSE(parse_double("1.5x").has_value());
    EXPECT_FALSE(parse_double("").has_value());
    const double denorm = std::numeric_limits<double>::denorm_min();
    EXPECT_EQ(*parse_double(format_double(denorm)), denorm);
}

TEST(Io, AtomicWriteCreatesDirectories) {
    const auto dir = std::filesystem::path(EUSN_TEST_TMP) / "io_atomic" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_file_atomic(dir / "f.txt", "hello\n");
    EXPECT_EQ(read_file(dir / "f.txt"), "hello\n");
    EXPECT_FALSE(std::filesystem::exists(dir / "f.txt.tmp"));
    EXPECT_THROW(read_file(dir / "missing"), InputError);
}

TEST(Parallel, CoversEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, RethrowsAndCapsThreads) {
    EXPECT_THROW(parallel_for(10, [](std::size_t i) {
        if (i == 5) throw std::runtime_error("boom");
    }, 3),
                 std::runtime_error);
    ::setenv("EUSN_THREADS", "2", 1);
    EXPECT_EQ(worker_count(8), 2u);
    EXPECT_EQ(worker_count(1), 1u);
    ::unsetenv("EUSN_THREADS");
    EXPECT_EQ(worker_count(8), 8u);
}

}  // namespace
