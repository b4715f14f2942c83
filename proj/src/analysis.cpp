#include "eusn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "eusn/errors.hpp"
#include "eusn/io.hpp"
#include "eusn/kernels.hpp"
#include "eusn/parallel.hpp"
#include "eusn/rng.hpp"

namespace eusn {
namespace {

void require_eusn(const Reservoir& r, const char* op) {
    if (r.variant() != Variant::EuSN) throw ConfigError(std::string(op) + " requires an EuSN reservoir");
}

void check_state(const Reservoir& r, std::span<const double> h) {
    if (h.size() != r.n_units()) throw ShapeError("state length does not match reservoir size");
}

void check_input(const Reservoir& r, std::span<const double> x) {
    if (x.size() != r.n_inputs()) throw ShapeError("input length does not match reservoir inputs");
}

// Diagonal of D: 1 - tanh(pre)^2 at (h, x).
Vector derivative_diagonal(const Reservoir& r, std::span<const double> h, std::span<const double> x) {
    Vector next(r.n_units()), act(r.n_units());
    r.step_into(h, x, next, act);
    for (auto& a : act) a = 1.0 - a * a;
    return act;
}

// J = a I + b K. Returns (a, b, K) for the reservoir's variant.
struct JacobianParts {
    double shift;
    double scale;
    Matrix core;
};

JacobianParts jacobian_parts(const Reservoir& r, std::span<const double> d) {
    const std::size_t n = r.n_units();
    const auto& w = r.w_h();
    Matrix k(n, n);
    if (r.variant() == Variant::EuSN) {
        const double g = r.config().gamma;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) k(i, j) = d[i] * w(i, j);
            k(i, i) -= d[i] * g;
        }
        return {1.0, r.config().epsilon, std::move(k)};
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k(i, j) = d[i] * w(i, j);
    const double a = r.config().leak;
    return {1.0 - a, a, std::move(k)};
}

constexpr double kMagnitudeFloor = 1e-300;

}  // namespace

std::vector<std::complex<double>> recurrent_spectrum(const Reservoir& r) { return eigenvalues(r.w_h()); }

Matrix jacobian_origin(const Reservoir& r) {
    require_eusn(r, "jacobian_origin");
    const std::size_t n = r.n_units();
    const double eps = r.config().epsilon;
    const double diag = 1.0 - eps * r.config().gamma;
    Matrix j(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) j(a, b) = eps * r.w_h()(a, b);
    for (std::size_t a = 0; a < n; ++a) j(a, a) += diag;
    return j;
}

double effective_spectral_radius(const Reservoir& r, RadiusMode mode) {
    require_eusn(r, "effective_spectral_radius");
    if (mode == RadiusMode::Numeric) return spectral_radius(jacobian_origin(r));
    // W_h is antisymmetric, hence normal: its spectral radius is its largest
    // singular value. This keeps the two modes on separate eigensolvers.
    const double rho = spectral_norm(r.w_h());
    const double eg = r.config().epsilon * r.config().gamma;
    const double e = r.config().epsilon;
    return std::sqrt(1.0 + eg * eg - 2.0 * eg + e * e * rho * rho);
}

Matrix full_jacobian(const Reservoir& r, std::span<const double> h, std::span<const double> x) {
    check_state(r, h);
    check_input(r, x);
    const Vector d = derivative_diagonal(r, h, x);
    auto parts = jacobian_parts(r, d);
    Matrix j = std::move(parts.core);
    for (std::size_t i = 0; i < j.size(); ++i) j.data()[i] *= parts.scale;
    for (std::size_t i = 0; i < j.rows(); ++i) j(i, i) += parts.shift;
    return j;
}

Vector linearized_step(const Reservoir& r, std::span<const double> h0, std::span<const double> h,
                       std::span<const double> x) {
    require_eusn(r, "linearized_step");
    check_state(r, h0);
    check_state(r, h);
    check_input(r, x);
    const Matrix j = full_jacobian(r, h0, x);
    Vector delta(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) delta[i] = h[i] - h0[i];
    Vector out(h.size());
    kernels::gemv(j, delta, out);
    const Vector f0 = r.step(h0, x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += f0[i];
    return out;
}

LyapunovReport lyapunov_spectrum(const Reservoir& r, const Matrix& series) {
    if (series.rows() == 0) throw InputError("input series is empty");
    if (series.cols() != r.n_inputs()) throw ShapeError("series width does not match reservoir inputs");
    const std::size_t n = r.n_units();
    LyapunovReport report;
    report.series_length = series.rows();
    report.lles.assign(n, 0.0);

    Vector h(n, 0.0), next(n), act(n), mags(n);
    for (std::size_t t = 0; t < series.rows(); ++t) {
        r.step_into(h, series.row(t), next, act);
        for (auto& a : act) a = 1.0 - a * a;
        const auto parts = jacobian_parts(r, act);
        // lambda(J) = shift + scale * lambda(K). Working on K keeps the
        // O(scale) deviation from |shift| resolvable when scale is tiny.
        const auto mu = eigenvalues(parts.core);
        for (std::size_t i = 0; i < n; ++i) {
            const double re = parts.shift + parts.scale * mu[i].real();
            const double im = parts.scale * mu[i].imag();
            double log_mag;
            if (parts.shift == 1.0) {
                const double sr = parts.scale * mu[i].real();
                log_mag = 0.5 * std::log1p(2.0 * sr + sr * sr + im * im);
            } else {
                log_mag = std::log(std::hypot(re, im));
            }
            if (!(std::hypot(re, im) >= kMagnitudeFloor)) {
                log_mag = std::log(kMagnitudeFloor);
                report.clamped = true;
            }
            mags[i] = log_mag;
        }
        std::sort(mags.begin(), mags.end(), std::greater<>());
        for (std::size_t i = 0; i < n; ++i) report.lles[i] += mags[i];
        h.swap(next);
    }
    const double inv_t = 1.0 / static_cast<double>(series.rows());
    for (auto& v : report.lles) v *= inv_t;
    report.mlle = *std::max_element(report.lles.begin(), report.lles.end());
    return report;
}

StateTrajectory autonomous_trajectory(const Reservoir& r, std::span<const double> h0, std::size_t steps) {
    if (steps < 1) throw InputError("steps must be >= 1");
    check_state(r, h0);
    const Reservoir free_run = r.without_bias();
    const std::size_t n = r.n_units();
    const Vector zero_input(r.n_inputs(), 0.0);
    StateTrajectory traj;
    traj.inputs_len = steps;
    traj.states.reserve(steps + 1);
    traj.states.emplace_back(h0.begin(), h0.end());
    Vector act(n);
    for (std::size_t t = 0; t < steps; ++t) {
        Vector next(n);
        free_run.step_into(traj.states.back(), zero_input, next, act);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

std::string to_string(HeatmapQuantity q) {
    return q == HeatmapQuantity::MLLE ? "mlle" : "rho";
}

const HeatmapCell& HeatmapReport::at(std::size_t oi, std::size_t ei, std::size_t gi) const {
    return cells.at((oi * epsilon_grid.size() + ei) * gamma_grid.size() + gi);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n == 0) throw ConfigError("grid needs at least one point");
    if (!(lo > 0.0) || !(hi > 0.0)) throw ConfigError("logarithmic grid bounds must be positive");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

HeatmapReport heatmap_sweep(const HeatmapSpec& spec) {
    if (spec.epsilon_grid.empty() || spec.gamma_grid.empty() || spec.omega_r_values.empty()) {
        throw ConfigError("heatmap grids must be non-empty");
    }
    if (spec.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (spec.n_units < 1) throw ConfigError("n_units must be >= 1");

    HeatmapReport report;
    report.quantity = spec.quantity;
    report.n_units = spec.n_units;
    report.repetitions = spec.repetitions;
    report.seed = spec.seed;
    report.epsilon_grid = spec.epsilon_grid;
    report.gamma_grid = spec.gamma_grid;
    report.omega_r_values = spec.omega_r_values;

    const std::size_t ne = spec.epsilon_grid.size();
    const std::size_t ng = spec.gamma_grid.size();
    const std::size_t n_cells = spec.omega_r_values.size() * ne * ng;
    report.cells.resize(n_cells);

    // One task per (cell, repetition) so small grids still spread over workers.
    const std::size_t reps = spec.repetitions;
    std::vector<double> values(n_cells * reps, 0.0);
    std::vector<std::string> errors(n_cells * reps);

    parallel_for(
        n_cells * reps,
        [&](std::size_t task) {
            const std::size_t cell = task / reps;
            const std::size_t oi = cell / (ne * ng);
            const std::size_t ei = (cell / ng) % ne;
            const std::size_t gi = cell % ng;
            ReservoirConfig cfg;
            cfg.variant = Variant::EuSN;
            cfg.n_units = spec.n_units;
            cfg.n_inputs = 1;
            cfg.omega_r = spec.omega_r_values[oi];
            cfg.omega_x = spec.drive.omega_x;
            cfg.omega_b = spec.drive.omega_b;
            cfg.epsilon = spec.epsilon_grid[ei];
            cfg.gamma = spec.gamma_grid[gi];
            cfg.seed = Rng::derive(spec.seed, 2 * task);
            try {
                const Reservoir r = init_eusn(cfg);
                if (spec.quantity == HeatmapQuantity::EffectiveSpectralRadius) {
                    values[task] = effective_spectral_radius(r, RadiusMode::Numeric);
                } else {
                    Rng drive(Rng::derive(spec.seed, 2 * task + 1));
                    Matrix series(spec.drive.length, 1);
                    for (std::size_t t = 0; t < series.rows(); ++t) {
                        series(t, 0) = drive.uniform(spec.drive.input_lo, spec.drive.input_hi);
                    }
                    values[task] = lyapunov_spectrum(r, series).mlle;
                }
                if (!std::isfinite(values[task])) errors[task] = "non-finite value";
            } catch (const std::exception& e) {
                errors[task] = e.what();
            }
        },
        spec.threads);

    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        HeatmapCell& c = report.cells[cell];
        c.omega_r = spec.omega_r_values[cell / (ne * ng)];
        c.epsilon = spec.epsilon_grid[(cell / ng) % ne];
        c.gamma = spec.gamma_grid[cell % ng];
        double sum = 0.0;
        std::vector<double> ok;
        for (std::size_t k = 0; k < reps; ++k) {
            const std::size_t task = cell * reps + k;
            if (errors[task].empty()) {
                ok.push_back(values[task]);
                sum += values[task];
            } else if (c.error.empty()) {
                c.error = errors[task];
            }
        }
        c.n = ok.size();
        if (c.n == 0) {
            c.mean = std::nan("");
            c.std = std::nan("");
            continue;
        }
        c.mean = sum / static_cast<double>(c.n);
        double ss = 0.0;
        for (double v : ok) ss += (v - c.mean) * (v - c.mean);
        c.std = c.n > 1 ? std::sqrt(ss / static_cast<double>(c.n - 1)) : 0.0;
    }
    return report;
}

void write_heatmap_csv(const HeatmapReport& report, std::ostream& out, long omega_index) {
    out << "omega_r,epsilon,gamma,mean,std,n\n";
    const std::size_t per_omega = report.epsilon_grid.size() * report.gamma_grid.size();
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        if (omega_index >= 0 && i / per_omega != static_cast<std::size_t>(omega_index)) continue;
        const auto& c = report.cells[i];
        out << format_double(c.omega_r) << ',' << format_double(c.epsilon) << ','
            << format_double(c.gamma) << ',' << format_double(c.mean) << ',' << format_double(c.std)
            << ',' << c.n << '\n';
    }
}

nlohmann::json heatmap_to_json(const HeatmapReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json j{{"omega_r", c.omega_r}, {"epsilon", c.epsilon}, {"gamma", c.gamma},
                         {"n", c.n}};
        // JSON has no NaN; failed cells carry null statistics.
        j["mean"] = std::isfinite(c.mean) ? nlohmann::json(c.mean) : nlohmann::json(nullptr);
        j["std"] = std::isfinite(c.std) ? nlohmann::json(c.std) : nlohmann::json(nullptr);
        if (!c.error.empty()) j["error"] = c.error;
        cells.push_back(std::move(j));
    }
    return {
        {"quantity", to_string(report.quantity)},
        {"n_units", report.n_units},
        {"repetitions", report.repetitions},
        {"seed", report.seed},
        {"grid",
         {{"epsilon", report.epsilon_grid},
          {"gamma", report.gamma_grid},
          {"omega_r", report.omega_r_values}}},
        {"cells", std::move(cells)},
    };
}

void write_trajectory_csv(const StateTrajectory& traj, std::ostream& out) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    out << "step";
    for (std::size_t i = 0; i < n; ++i) out << ",h" << i;
    out << '\n';
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        out << t;
        for (double v : traj.states[t]) out << ',' << format_double(v);
        out << '\n';
    }
}

}  // namespace eusn
