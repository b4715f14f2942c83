#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "eusn/linalg.hpp"

namespace eusn {

/// Labeled multivariate time series; each sequence is (length x n_features).
struct Dataset {
    std::vector<Matrix> sequences;
    std::vector<std::size_t> labels;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;

    std::size_t size() const noexcept { return sequences.size(); }

    /// Throws InputError on width/label/class-count violations.
    void validate() const;
};

/// Rows of `d` selected by `indices`, in that order.
Dataset subset(const Dataset& d, std::span<const std::size_t> indices);

/// Long-term memorization task: a +1 or -1 triplet followed by tau_p
/// U[0,1) padding values; label 1 iff the triplet is +1. Exactly
/// n_series / 2 series per class, in shuffled order.
Dataset generate_ltm_dataset(std::size_t tau_p, std::size_t n_series, std::uint64_t seed);

struct SplitSpec {
    std::vector<std::vector<std::size_t>> parts;  ///< ascending indices per part
    std::uint64_t seed = 0;
};

/// Per-class shuffled partition. Each part receives, per class, the exact
/// proportional count rounded by largest remainder (so within one item).
SplitSpec split_stratified(const Dataset& d, std::span<const double> fractions, std::uint64_t seed);

/// tsc-v1 text format, see README.
void write_dataset(const Dataset& d, std::ostream& out);
Dataset read_dataset(std::istream& in);
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

struct Summary {
    double mean = 0.0;
    double std = 0.0;  ///< sample (n - 1) standard deviation, 0 when n < 2
    std::size_t n = 0;
};

Summary summarize(std::span<const double> values);

struct CurvePoint {
    std::size_t tau_p = 0;
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

CurvePoint aggregate_guesses(std::size_t tau_p, std::span<const double> accuracies);

/// Sorted ascending by tau_p. Throws InputError on duplicate tau_p.
std::vector<CurvePoint> accuracy_curve(std::vector<CurvePoint> results);

}  // namespace eusn
