#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "eusn/errors.hpp"
#include "eusn/rng.hpp"
#include "eusn/tasks.hpp"

namespace {

using namespace eusn;
namespace fs = std::filesystem;

Dataset random_dataset(Rng& rng) {
    Dataset d;
    d.n_features = 1 + rng.next_u64() % 4;
    d.n_classes = 2 + rng.next_u64() % 4;
    const std::size_t count = rng.next_u64() % 12;
    for (std::size_t i = 0; i < count; ++i) {
        // Degenerate lengths (1) are frequent; values span many magnitudes.
        const std::size_t len = rng.next_u64() % 3 == 0 ? 1 : 1 + rng.next_u64() % 40;
        Matrix s(len, d.n_features);
        for (std::size_t k = 0; k < s.size(); ++k) {
            switch (rng.next_u64() % 5) {
                case 0: s.data()[k] = 0.0; break;
                case 1: s.data()[k] = -0.0; break;
                case 2: s.data()[k] = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.next_u64() % 2000) - 1000); break;
                case 3: s.data()[k] = std::numeric_limits<double>::denorm_min() * static_cast<double>(rng.next_u64() % 9); break;
                default: s.data()[k] = rng.uniform(-1e6, 1e6); break;
            }
        }
        d.sequences.push_back(std::move(s));
        d.labels.push_back(rng.next_u64() % d.n_classes);
    }
    return d;
}

void expect_bit_equal(const Dataset& a, const Dataset& b) {
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(a.n_features, b.n_features);
    EXPECT_EQ(a.n_classes, b.n_classes);
    EXPECT_EQ(a.labels, b.labels);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.sequences[i].rows(), b.sequences[i].rows());
        EXPECT_TRUE(bitwise_equal(a.sequences[i], b.sequences[i]));
    }
}

std::size_t parse_error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        read_dataset(in);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

TEST(Ltm, Construction) {
    const auto d = generate_ltm_dataset(100, 1000, 3);
    ASSERT_EQ(d.size(), 1000u);
    EXPECT_EQ(d.n_features, 1u);
    EXPECT_EQ(d.n_classes, 2u);
    EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), 1u), 500);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& s = d.sequences[i];
        ASSERT_EQ(s.rows(), 103u);
        const double sign = d.labels[i] == 1 ? 1.0 : -1.0;
        for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(s(t, 0), sign);
        for (std::size_t t = 3; t < 103; ++t) {
            EXPECT_GE(s(t, 0), 0.0);
            EXPECT_LT(s(t, 0), 1.0);
        }
    }
}

TEST(Ltm, DeterministicPerSeed) {
    const auto a = generate_ltm_dataset(10, 50, 7), b = generate_ltm_dataset(10, 50, 7);
    expect_bit_equal(a, b);
    const auto c = generate_ltm_dataset(10, 50, 8);
    EXPECT_FALSE(bitwise_equal(a.sequences[0], c.sequences[0]) && a.labels == c.labels);
}

TEST(Split, HalvesOfBalancedThousand) {
    const auto d = generate_ltm_dataset(1, 1000, 1);
    const double f[] = {0.5, 0.5};
    const auto sp = split_stratified(d, f, 4);
    ASSERT_EQ(sp.parts.size(), 2u);
    for (const auto& part : sp.parts) {
        EXPECT_EQ(part.size(), 500u);
        std::size_t ones = 0;
        for (auto i : part) ones += d.labels[i];
        EXPECT_EQ(ones, 250u);
        EXPECT_TRUE(std::is_sorted(part.begin(), part.end()));
    }
}

TEST(Split, IdentityAndThirds) {
    Dataset d;
    d.n_features = 1;
    d.n_classes = 3;
    for (std::size_t i = 0; i < 27; ++i) {
        d.sequences.emplace_back(1, 1, static_cast<double>(i));
        d.labels.push_back(i % 3);
    }
    const double one[] = {1.0};
    const auto id = split_stratified(d, one, 0);
    ASSERT_EQ(id.parts.size(), 1u);
    for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(id.parts[0][i], i);

    const double thirds[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (const auto& part : split_stratified(d, thirds, 5).parts) {
        std::size_t per[3] = {0, 0, 0};
        for (auto i : part) per[d.labels[i]]++;
        for (auto c : per) EXPECT_EQ(c, 3u);
    }
}

TEST(Split, StratificationPropertyRandomized) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        Dataset d;
        d.n_features = 1;
        d.n_classes = 2 + rng.next_u64() % 3;
        const std::size_t parts = 1 + rng.next_u64() % 3;
        std::vector<std::size_t> class_count(d.n_classes, 0);
        for (std::size_t c = 0; c < d.n_classes; ++c) {
            const std::size_t k = parts + rng.next_u64() % 30;
            for (std::size_t i = 0; i < k; ++i) {
                d.sequences.emplace_back(1, 1);
                d.labels.push_back(c);
            }
            class_count[c] = k;
        }
        std::vector<double> f(parts);
        double total = 0.0;
        for (auto& x : f) total += (x = rng.uniform(0.2, 1.0));
        for (auto& x : f) x /= total;
        f.back() = 1.0;
        for (std::size_t p = 0; p + 1 < parts; ++p) f.back() -= f[p];
        const auto sp = split_stratified(d, f, rng.next_u64());
        std::set<std::size_t> seen;
        for (std::size_t p = 0; p < parts; ++p) {
            std::vector<std::size_t> per(d.n_classes, 0);
            for (auto i : sp.parts[p]) {
                EXPECT_TRUE(seen.insert(i).second);
                per[d.labels[i]]++;
            }
            for (std::size_t c = 0; c < d.n_classes; ++c) {
                EXPECT_LE(std::abs(static_cast<double>(per[c]) - f[p] * class_count[c]), 1.0 + 1e-9);
            }
        }
        EXPECT_EQ(seen.size(), d.size());
    }
}

TEST(Split, Rejections) {
    const auto d = generate_ltm_dataset(1, 4, 1);
    const double bad_sum[] = {0.5, 0.4};
    EXPECT_THROW(split_stratified(d, bad_sum, 0), ConfigError);
    const double zero[] = {1.0, 0.0};
    EXPECT_THROW(split_stratified(d, zero, 0), ConfigError);
    const double three[] = {0.4, 0.3, 0.3};
    EXPECT_THROW(split_stratified(d, three, 0), InputError);
}

TEST(Format, RandomizedBitExactRoundTrip) {
    Rng rng(99);
    const fs::path dir = fs::path(EUSN_TEST_TMP) / "tasks_roundtrip";
    fs::create_directories(dir);
    for (int i = 0; i < 100; ++i) {
        const auto d = random_dataset(rng);
        const auto path = dir / ("d" + std::to_string(i) + ".tsc");
        save_dataset(d, path);
        expect_bit_equal(d, load_dataset(path));
    }
}

TEST(Format, HandWrittenFixture) {
    std::istringstream in(
        "tsc-v1 2 2 3\n"
        "2 0\n"
        "0.5 -1\n"
        "1e-3 +2.25\n"
        "1 2\n"
        "  7\t8  \n");
    const auto d = read_dataset(in);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.labels, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(d.sequences[0], Matrix(2, 2, {0.5, -1.0, 1e-3, 2.25}));
    EXPECT_EQ(d.sequences[1], Matrix(1, 2, {7.0, 8.0}));
}

TEST(Format, ParseErrorsCarryLines) {
    EXPECT_EQ(parse_error_line(""), 1u);
    EXPECT_EQ(parse_error_line("tsc-v2 1 1 2\n"), 1u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 1 1\n"), 1u);  // single class
    EXPECT_EQ(parse_error_line("tsc-v1 1 0 2\n"), 1u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 1 2\n0 0\n"), 2u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 1 2\n1 2\n0.5\n"), 2u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 2 2\n2 1\n1 2\n3\n"), 4u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 1 2\n1 1\nabc\n"), 3u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 1 2\n1 1\nnan\n"), 3u);
    EXPECT_EQ(parse_error_line("tsc-v1 1 1 2\n1 1\n0.1\n\nextra\n"), 5u);
    EXPECT_EQ(parse_error_line("tsc-v1 2 1 2\n1 1\n0.1\n"), 4u);
    EXPECT_EQ(parse_error_line("tsc-v1 99999999999999999999 1 2\n"), 1u);
    EXPECT_THROW(load_dataset(fs::path(EUSN_TEST_TMP) / "does-not-exist.tsc"), InputError);
}

TEST(Curve, AggregationAndSorting) {
    const double acc[] = {0.9, 1.0, 0.8, 0.95, 0.85, 0.9, 1.0, 0.7, 0.75, 0.9};
    const auto p = aggregate_guesses(300, acc);
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= 10.0;
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    EXPECT_NEAR(p.mean, mean, 1e-15);
    EXPECT_NEAR(p.std, std::sqrt(ss / 9.0), 1e-15);
    EXPECT_EQ(p.n, 10u);

    const auto single = accuracy_curve({p});
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].mean, p.mean);

    const auto sorted = accuracy_curve({{500, 0.5, 0, 1}, {100, 1.0, 0, 1}, {300, 0.7, 0, 1}});
    EXPECT_EQ(sorted[0].tau_p, 100u);
    EXPECT_EQ(sorted[1].tau_p, 300u);
    EXPECT_EQ(sorted[2].tau_p, 500u);
    EXPECT_THROW(accuracy_curve({{1, 0, 0, 1}, {1, 0, 0, 1}}), InputError);

    const double one[] = {0.6};
    EXPECT_EQ(aggregate_guesses(1, one).std, 0.0);
}

}  // namespace
