#include "eusn/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "eusn/errors.hpp"
#include "eusn/io.hpp"
#include "eusn/rng.hpp"

namespace eusn {

void Dataset::validate() const {
    if (labels.size() != sequences.size()) throw InputError("label count does not match sequence count");
    if (n_features < 1) throw InputError("dataset needs at least one feature");
    if (n_classes < 2) throw InputError("dataset needs at least two classes");
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        if (sequences[i].cols() != n_features) {
            throw InputError("sequence " + std::to_string(i) + " has the wrong feature count");
        }
        if (labels[i] >= n_classes) throw InputError("label of sequence " + std::to_string(i) + " out of range");
    }
}

Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
    Dataset out;
    out.n_features = d.n_features;
    out.n_classes = d.n_classes;
    out.sequences.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.sequences.push_back(d.sequences.at(i));
        out.labels.push_back(d.labels.at(i));
    }
    return out;
}

Dataset generate_ltm_dataset(std::size_t tau_p, std::size_t n_series, std::uint64_t seed) {
    if (tau_p < 1) throw InputError("tau_p must be >= 1");
    if (n_series < 2 || n_series % 2 != 0) throw InputError("n_series must be even and >= 2");
    Rng rng(seed);
    std::vector<std::size_t> labels(n_series);
    for (std::size_t i = 0; i < n_series; ++i) labels[i] = i < n_series / 2 ? 1 : 0;
    std::shuffle(labels.begin(), labels.end(), rng.engine());

    Dataset d;
    d.n_features = 1;
    d.n_classes = 2;
    d.labels = labels;
    d.sequences.reserve(n_series);
    for (std::size_t i = 0; i < n_series; ++i) {
        Matrix s(3 + tau_p, 1);
        const double mark = labels[i] == 1 ? 1.0 : -1.0;
        for (std::size_t t = 0; t < 3; ++t) s(t, 0) = mark;
        for (std::size_t t = 3; t < s.rows(); ++t) s(t, 0) = rng.uniform(0.0, 1.0);
        d.sequences.push_back(std::move(s));
    }
    return d;
}

SplitSpec split_stratified(const Dataset& d, std::span<const double> fractions, std::uint64_t seed) {
    if (fractions.empty()) throw ConfigError("at least one split fraction is required");
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw ConfigError("split fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    const std::size_t k = fractions.size();

    std::vector<std::vector<std::size_t>> by_class(d.n_classes);
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] >= d.n_classes) throw InputError("label out of range");
        by_class[d.labels[i]].push_back(i);
    }

    Rng rng(seed);
    SplitSpec spec;
    spec.seed = seed;
    spec.parts.resize(k);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& items = by_class[c];
        if (items.empty()) continue;
        if (items.size() < k) {
            throw InputError("class " + std::to_string(c) + " has " + std::to_string(items.size()) +
                             " items, fewer than the " + std::to_string(k) + " splits");
        }
        std::shuffle(items.begin(), items.end(), rng.engine());

        // Largest remainder; ties rotate with the class index so no part is
        // systematically favoured across classes.
        std::vector<std::size_t> counts(k);
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t p = 0; p < k; ++p) {
            const double exact = fractions[p] * static_cast<double>(items.size());
            counts[p] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            assigned += counts[p];
            remainders.emplace_back(exact - static_cast<double>(counts[p]), (p + k - c % k) % k);
        }
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (remainders[a].first != remainders[b].first) return remainders[a].first > remainders[b].first;
            return remainders[a].second < remainders[b].second;
        });
        for (std::size_t i = 0; assigned < items.size(); ++i, ++assigned) ++counts[order[i % k]];

        std::size_t pos = 0;
        for (std::size_t p = 0; p < k; ++p) {
            spec.parts[p].insert(spec.parts[p].end(), items.begin() + static_cast<std::ptrdiff_t>(pos),
                                 items.begin() + static_cast<std::ptrdiff_t>(pos + counts[p]));
            pos += counts[p];
        }
    }
    for (auto& part : spec.parts) std::sort(part.begin(), part.end());
    return spec;
}

void write_dataset(const Dataset& d, std::ostream& out) {
    d.validate();
    out << "tsc-v1 " << d.size() << ' ' << d.n_features << ' ' << d.n_classes << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Matrix& s = d.sequences[i];
        out << s.rows() << ' ' << d.labels[i] << '\n';
        for (std::size_t t = 0; t < s.rows(); ++t) {
            for (std::size_t f = 0; f < s.cols(); ++f) {
                if (f) out << ' ';
                out << format_double(s(t, f));
            }
            out << '\n';
        }
    }
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::size_t parse_count(std::string_view tok, std::size_t line, const char* what) {
    if (tok.size() > 18) throw ParseError(line, std::string(what) + " too large");
    std::size_t v = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') throw ParseError(line, std::string("invalid ") + what + ": '" + std::string(tok) + "'");
        v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    if (tok.empty()) throw ParseError(line, std::string("missing ") + what);
    return v;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](const char* expecting) -> std::vector<std::string_view> {
        ++line_no;
        if (!std::getline(in, line)) throw ParseError(line_no, std::string("unexpected end of file, expected ") + expecting);
        return tokens(line);
    };

    auto header = next_line("header");
    if (header.size() != 4 || header[0] != "tsc-v1") {
        throw ParseError(line_no, "expected header 'tsc-v1 <n_sequences> <n_features> <n_classes>'");
    }
    Dataset d;
    const std::size_t count = parse_count(header[1], line_no, "sequence count");
    d.n_features = parse_count(header[2], line_no, "feature count");
    d.n_classes = parse_count(header[3], line_no, "class count");
    if (d.n_features < 1) throw ParseError(line_no, "feature count must be >= 1");
    if (d.n_classes < 2) throw ParseError(line_no, "class count must be >= 2");
    d.sequences.reserve(std::min<std::size_t>(count, 1 << 16));
    d.labels.reserve(std::min<std::size_t>(count, 1 << 16));

    for (std::size_t s = 0; s < count; ++s) {
        auto head = next_line("sequence header");
        if (head.size() != 2) throw ParseError(line_no, "expected '<length> <label>'");
        const std::size_t length = parse_count(head[0], line_no, "sequence length");
        const std::size_t label = parse_count(head[1], line_no, "label");
        if (length < 1) throw ParseError(line_no, "sequence length must be >= 1");
        if (label >= d.n_classes) throw ParseError(line_no, "label " + std::to_string(label) + " out of range");
        Matrix seq(length, d.n_features);
        for (std::size_t t = 0; t < length; ++t) {
            auto row = next_line("sequence values");
            if (row.size() != d.n_features) {
                throw ParseError(line_no, "expected " + std::to_string(d.n_features) + " values, found " +
                                              std::to_string(row.size()));
            }
            for (std::size_t f = 0; f < d.n_features; ++f) {
                const auto v = parse_double(row[f]);
                if (!v) throw ParseError(line_no, "invalid number '" + std::string(row[f]) + "'");
                if (!std::isfinite(*v)) throw ParseError(line_no, "non-finite value");
                seq(t, f) = *v;
            }
        }
        d.sequences.push_back(std::move(seq));
        d.labels.push_back(label);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!tokens(line).empty()) throw ParseError(line_no, "trailing data after the last sequence");
    }
    return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ostringstream out;
    write_dataset(d, out);
    write_file_atomic(path, out.str());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open dataset " + path.string());
    return read_dataset(in);
}

Summary summarize(std::span<const double> values) {
    Summary s;
    s.n = values.size();
    if (s.n == 0) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

CurvePoint aggregate_guesses(std::size_t tau_p, std::span<const double> accuracies) {
    const Summary s = summarize(accuracies);
    return {tau_p, s.mean, s.std, s.n};
}

std::vector<CurvePoint> accuracy_curve(std::vector<CurvePoint> results) {
    std::sort(results.begin(), results.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.tau_p < b.tau_p; });
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].tau_p == results[i - 1].tau_p) {
            throw InputError("duplicate tau_p " + std::to_string(results[i].tau_p) + " in accuracy curve");
        }
    }
    return results;
}

}  // namespace eusn
