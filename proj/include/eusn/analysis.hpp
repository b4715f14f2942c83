#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "eusn/linalg.hpp"
#include "eusn/reservoir.hpp"

namespace eusn {

/// Eigenvalues of w_h.
std::vector<std::complex<double>> recurrent_spectrum(const Reservoir& r);

/// (1 - eps*gamma) I + eps W_h: the EuSN Jacobian at the origin with null input and bias.
Matrix jacobian_origin(const Reservoir& r);

enum class RadiusMode {
    Formula,  ///< sqrt(1 + e^2 g^2 - 2 e g + e^2 rho(W_h)^2)
    Numeric,  ///< spectral radius of jacobian_origin
};

/// Spectral radius of the linearized autonomous EuSN at the origin.
double effective_spectral_radius(const Reservoir& r, RadiusMode mode);

/// dF/dh at (h, x). EuSN: I + eps D (W_h - gamma I), D = diag(1 - tanh^2(pre)).
/// ESN/ring: (1 - alpha) I + alpha D W_h.
Matrix full_jacobian(const Reservoir& r, std::span<const double> h, std::span<const double> x);

/// First-order model of the EuSN map around h0: J(h0, x) (h - h0) + F(h0, x).
Vector linearized_step(const Reservoir& r, std::span<const double> h0, std::span<const double> h,
                       std::span<const double> x);

struct LyapunovReport {
    Vector lles;  ///< per-rank mean log eigenvalue magnitude, descending ranks
    double mlle = 0.0;
    std::size_t series_length = 0;
    bool clamped = false;  ///< some |lambda| was below the 1e-300 floor
};

/// Local Lyapunov exponents along the trajectory driven by `series` from
/// h(0) = 0. Eigenvalue magnitudes are sorted per step and averaged per rank.
LyapunovReport lyapunov_spectrum(const Reservoir& r, const Matrix& series);

/// Iterates the reservoir with zero input and zero bias from h0.
StateTrajectory autonomous_trajectory(const Reservoir& r, std::span<const double> h0,
                                      std::size_t steps);

enum class HeatmapQuantity { EffectiveSpectralRadius, MLLE };

std::string to_string(HeatmapQuantity q);

/// Driving signal used for MLLE cells.
struct DriveSpec {
    std::size_t length = 500;
    double input_lo = -0.5;
    double input_hi = 0.5;
    double omega_x = 1.0;
    double omega_b = 1.0;
};

struct HeatmapSpec {
    HeatmapQuantity quantity = HeatmapQuantity::EffectiveSpectralRadius;
    std::size_t n_units = 100;
    std::vector<double> epsilon_grid;
    std::vector<double> gamma_grid;
    std::vector<double> omega_r_values;
    std::size_t repetitions = 3;
    DriveSpec drive;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

struct HeatmapCell {
    double omega_r = 0.0;
    double epsilon = 0.0;
    double gamma = 0.0;
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation; 0 when n < 2
    std::size_t n = 0;  ///< successful repetitions
    std::string error;  ///< first failure message, empty if none
};

struct HeatmapReport {
    HeatmapQuantity quantity = HeatmapQuantity::EffectiveSpectralRadius;
    std::size_t n_units = 0;
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;
    std::vector<double> epsilon_grid;
    std::vector<double> gamma_grid;
    std::vector<double> omega_r_values;
    /// Ordered by (omega_r, epsilon, gamma) index, gamma fastest.
    std::vector<HeatmapCell> cells;

    const HeatmapCell& at(std::size_t omega_index, std::size_t eps_index, std::size_t gamma_index) const;
};

/// `n` points spaced evenly in log10 between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

HeatmapReport heatmap_sweep(const HeatmapSpec& spec);

/// Columns: omega_r,epsilon,gamma,mean,std,n. With `omega_index` set, only
/// that omega_r slice is written.
void write_heatmap_csv(const HeatmapReport& report, std::ostream& out, long omega_index = -1);
nlohmann::json heatmap_to_json(const HeatmapReport& report);

/// Columns: step,h0,h1,...
void write_trajectory_csv(const StateTrajectory& traj, std::ostream& out);

}  // namespace eusn
