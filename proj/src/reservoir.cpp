#include "eusn/reservoir.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "eusn/errors.hpp"
#include "eusn/kernels.hpp"
#include "eusn/parallel.hpp"
#include "eusn/rng.hpp"

namespace eusn {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::EuSN: return "eusn";
        case Variant::ESN: return "esn";
        case Variant::RingESN: return "ring";
    }
    return "unknown";
}

Variant parse_variant(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "eusn") return Variant::EuSN;
    if (s == "esn") return Variant::ESN;
    if (s == "ring" || s == "ringesn" || s == "ring-esn" || s == "r-esn") return Variant::RingESN;
    throw ConfigError("unknown reservoir variant: " + std::string(text));
}

void ReservoirConfig::validate() const {
    if (n_units < 1) throw ConfigError("n_units must be >= 1");
    if (n_inputs < 1) throw ConfigError("n_inputs must be >= 1");
    if (!(omega_r >= 0.0) || !(omega_x >= 0.0) || !(omega_b >= 0.0)) {
        throw ConfigError("scalings omega_r, omega_x, omega_b must be non-negative");
    }
    if (variant == Variant::EuSN) {
        if (!(epsilon > 0.0)) throw ConfigError("EuSN requires epsilon > 0");
        if (!(gamma > 0.0)) throw ConfigError("EuSN requires gamma > 0");
    } else {
        if (!(leak > 0.0 && leak <= 1.0)) throw ConfigError("leak must lie in (0, 1]");
        if (!(rho_target > 0.0)) throw ConfigError("rho_target must be > 0");
    }
}

Reservoir::Reservoir(ReservoirConfig config, Matrix w_h, Matrix w_x, Vector bias)
    : config_(config), w_h_(std::move(w_h)), w_x_(std::move(w_x)), bias_(std::move(bias)) {
    const std::size_t n = config_.n_units;
    if (n < 1 || config_.n_inputs < 1) throw ConfigError("reservoir dimensions must be >= 1");
    if (w_h_.rows() != n || w_h_.cols() != n) throw ShapeError("w_h must be N x N");
    if (w_x_.rows() != n || w_x_.cols() != config_.n_inputs) throw ShapeError("w_x must be N x X");
    if (bias_.size() != n) throw ShapeError("bias must have length N");
    if (config_.variant == Variant::EuSN) {
        if (!(config_.epsilon > 0.0)) throw ConfigError("EuSN requires epsilon > 0");
        if (!(config_.gamma >= 0.0)) throw ConfigError("EuSN requires gamma >= 0");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                if (w_h_(i, j) + w_h_(j, i) != 0.0) {
                    throw ConfigError("EuSN recurrent matrix must be antisymmetric");
                }
    } else if (!(config_.leak > 0.0 && config_.leak <= 1.0)) {
        throw ConfigError("leak must lie in (0, 1]");
    }
}

void Reservoir::check_dims(std::span<const double> h, std::span<const double> x) const {
    if (h.size() != n_units()) {
        throw ShapeError("state has length " + std::to_string(h.size()) + ", expected " +
                         std::to_string(n_units()));
    }
    if (x.size() != n_inputs()) {
        throw ShapeError("input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(n_inputs()));
    }
}

void Reservoir::step_into(std::span<const double> h, std::span<const double> x, std::span<double> out,
                          std::span<double> act) const {
    const std::size_t n = n_units();
    const std::size_t nx = n_inputs();
    kernels::gemv(w_h_, h, act);
    for (std::size_t i = 0; i < n; ++i) {
        double z = act[i] + bias_[i];
        const double* wx = w_x_.data() + i * nx;
        for (std::size_t k = 0; k < nx; ++k) z += wx[k] * x[k];
        act[i] = z;
    }
    if (config_.variant == Variant::EuSN) {
        const double eps = config_.epsilon;
        const double gamma = config_.gamma;
        for (std::size_t i = 0; i < n; ++i) {
            act[i] = std::tanh(act[i] - gamma * h[i]);
            out[i] = h[i] + eps * act[i];
        }
    } else {
        const double a = config_.leak;
        for (std::size_t i = 0; i < n; ++i) {
            act[i] = std::tanh(act[i]);
            out[i] = (1.0 - a) * h[i] + a * act[i];
        }
    }
}

Vector Reservoir::step(std::span<const double> h, std::span<const double> x) const {
    check_dims(h, x);
    Vector out(n_units()), act(n_units());
    step_into(h, x, out, act);
    return out;
}

Reservoir Reservoir::without_bias() const {
    return Reservoir(config_, w_h_, w_x_, Vector(n_units(), 0.0));
}

namespace {

// Draw order is fixed: recurrent entries row-major, then w_x row-major, then bias.
void draw_input_and_bias(const ReservoirConfig& c, Rng& rng, Matrix& w_x, Vector& bias) {
    w_x = Matrix(c.n_units, c.n_inputs);
    for (std::size_t i = 0; i < w_x.size(); ++i) w_x.data()[i] = rng.symmetric(c.omega_x);
    bias.assign(c.n_units, 0.0);
    for (auto& b : bias) b = rng.symmetric(c.omega_b);
}

void require_variant(const ReservoirConfig& c, Variant v) {
    if (c.variant != v) {
        throw ConfigError("config variant is " + std::string(to_string(c.variant)) + ", expected " +
                          std::string(to_string(v)));
    }
}

}  // namespace

Reservoir init_eusn(const ReservoirConfig& config) {
    require_variant(config, Variant::EuSN);
    config.validate();
    const std::size_t n = config.n_units;
    Rng rng(config.seed);
    Matrix w(n, n);
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.symmetric(config.omega_r);
    Matrix w_h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w_h(i, j) = w(i, j) - w(j, i);
    Matrix w_x;
    Vector bias;
    draw_input_and_bias(config, rng, w_x, bias);
    return Reservoir(config, std::move(w_h), std::move(w_x), std::move(bias));
}

Reservoir init_esn(const ReservoirConfig& config, SpectralScaling scaling) {
    require_variant(config, Variant::ESN);
    config.validate();
    const std::size_t n = config.n_units;
    Rng rng(config.seed);
    Matrix w_h(n, n);
    for (std::size_t i = 0; i < w_h.size(); ++i) w_h.data()[i] = rng.uniform(-1.0, 1.0);
    double radius = 0.0;
    if (scaling == SpectralScaling::ExactEigen) {
        radius = spectral_radius(w_h);
    } else {
        radius = std::sqrt(static_cast<double>(n) / 3.0);
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw NumericalError("cannot rescale a recurrent matrix with zero spectral radius");
    }
    const double factor = config.rho_target / radius;
    for (std::size_t i = 0; i < w_h.size(); ++i) w_h.data()[i] *= factor;
    Matrix w_x;
    Vector bias;
    draw_input_and_bias(config, rng, w_x, bias);
    return Reservoir(config, std::move(w_h), std::move(w_x), std::move(bias));
}

Reservoir init_ring_esn(const ReservoirConfig& config) {
    require_variant(config, Variant::RingESN);
    config.validate();
    const std::size_t n = config.n_units;
    Rng rng(config.seed);
    Matrix w_h(n, n);
    // Lower subdiagonal plus the top-right corner: unit i feeds unit i+1 mod N.
    for (std::size_t i = 0; i < n; ++i) w_h((i + 1) % n, i) += config.rho_target;
    Matrix w_x;
    Vector bias;
    draw_input_and_bias(config, rng, w_x, bias);
    return Reservoir(config, std::move(w_h), std::move(w_x), std::move(bias));
}

Reservoir make_reservoir(const ReservoirConfig& config, SpectralScaling scaling) {
    switch (config.variant) {
        case Variant::EuSN: return init_eusn(config);
        case Variant::ESN: return init_esn(config, scaling);
        case Variant::RingESN: return init_ring_esn(config);
    }
    throw ConfigError("unknown variant");
}

Vector eusn_step(const Reservoir& r, std::span<const double> h, std::span<const double> x) {
    if (r.variant() != Variant::EuSN) throw ConfigError("eusn_step requires an EuSN reservoir");
    return r.step(h, x);
}

Vector esn_step(const Reservoir& r, std::span<const double> h, std::span<const double> x) {
    if (r.variant() == Variant::EuSN) throw ConfigError("esn_step requires an ESN or ring reservoir");
    return r.step(h, x);
}

namespace {

void check_series(const Reservoir& r, const Matrix& series) {
    if (series.rows() == 0) throw InputError("input series is empty");
    if (series.cols() != r.n_inputs()) {
        throw ShapeError("series has " + std::to_string(series.cols()) + " columns, expected " +
                         std::to_string(r.n_inputs()));
    }
}

}  // namespace

StateTrajectory run_sequence(const Reservoir& r, const Matrix& series) {
    check_series(r, series);
    const std::size_t n = r.n_units();
    StateTrajectory traj;
    traj.inputs_len = series.rows();
    traj.states.reserve(series.rows() + 1);
    traj.states.emplace_back(n, 0.0);
    Vector act(n);
    for (std::size_t t = 0; t < series.rows(); ++t) {
        Vector next(n);
        r.step_into(traj.states.back(), series.row(t), next, act);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

Vector final_state(const Reservoir& r, const Matrix& series) {
    check_series(r, series);
    const std::size_t n = r.n_units();
    Vector h(n, 0.0), next(n), act(n);
    for (std::size_t t = 0; t < series.rows(); ++t) {
        r.step_into(h, series.row(t), next, act);
        h.swap(next);
    }
    return h;
}

Matrix final_states(const Reservoir& r, std::span<const Matrix> series, std::size_t threads) {
    Matrix out(series.size(), r.n_units());
    parallel_for(
        series.size(),
        [&](std::size_t i) {
            const Vector h = final_state(r, series[i]);
            std::copy(h.begin(), h.end(), out.row(i).begin());
        },
        threads);
    return out;
}

}  // namespace eusn
