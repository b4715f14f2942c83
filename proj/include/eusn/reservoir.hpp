#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "eusn/linalg.hpp"

namespace eusn {

enum class Variant { EuSN, ESN, RingESN };

std::string_view to_string(Variant v);
/// Accepts "eusn", "esn", "ring" (and the canonical names, case-insensitive).
Variant parse_variant(std::string_view text);

struct ReservoirConfig {
    Variant variant = Variant::EuSN;
    std::size_t n_units = 100;
    std::size_t n_inputs = 1;
    double omega_r = 1.0;  ///< recurrent scaling (EuSN)
    double omega_x = 1.0;  ///< input scaling
    double omega_b = 1.0;  ///< bias scaling
    double epsilon = 0.01;  ///< Euler step size (EuSN)
    double gamma = 0.01;  ///< diffusion (EuSN)
    double leak = 1.0;  ///< leaking rate alpha (ESN, RingESN)
    double rho_target = 0.9;  ///< target spectral radius (ESN, RingESN)
    std::uint64_t seed = 0;

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    bool operator==(const ReservoirConfig&) const = default;
};

/// How init_esn rescales the random recurrent matrix.
enum class SpectralScaling {
    ExactEigen,   ///< divide by the numerically computed spectral radius
    CircularLaw,  ///< divide by sqrt(N / 3), the circular-law radius of U[-1,1] entries
};

/// Frozen reservoir weights. Immutable after construction.
class Reservoir {
public:
    /// Checks shapes against `config`; for EuSN also requires w_h to be
    /// exactly antisymmetric. Scalar hyperparameters are range-checked
    /// loosely (epsilon > 0, gamma >= 0, leak in (0,1]) so analytic test
    /// systems can be built by hand.
    Reservoir(ReservoirConfig config, Matrix w_h, Matrix w_x, Vector bias);

    const ReservoirConfig& config() const noexcept { return config_; }
    Variant variant() const noexcept { return config_.variant; }
    std::size_t n_units() const noexcept { return config_.n_units; }
    std::size_t n_inputs() const noexcept { return config_.n_inputs; }
    const Matrix& w_h() const noexcept { return w_h_; }
    const Matrix& w_x() const noexcept { return w_x_; }
    const Vector& bias() const noexcept { return bias_; }

    /// One state transition of this reservoir's variant.
    Vector step(std::span<const double> h, std::span<const double> x) const;

    /// Allocation-free transition: writes the next state into `out` and the
    /// post-tanh activation into `act` (both length N, must not alias h).
    void step_into(std::span<const double> h, std::span<const double> x, std::span<double> out,
                   std::span<double> act) const;

    /// Copy with the bias vector zeroed (autonomous analysis).
    Reservoir without_bias() const;

    bool operator==(const Reservoir&) const = default;

private:
    void check_dims(std::span<const double> h, std::span<const double> x) const;

    ReservoirConfig config_;
    Matrix w_h_;
    Matrix w_x_;
    Vector bias_;
};

Reservoir init_eusn(const ReservoirConfig& config);
Reservoir init_esn(const ReservoirConfig& config,
                   SpectralScaling scaling = SpectralScaling::ExactEigen);
Reservoir init_ring_esn(const ReservoirConfig& config);

/// Dispatches on config.variant.
Reservoir make_reservoir(const ReservoirConfig& config,
                         SpectralScaling scaling = SpectralScaling::ExactEigen);

/// h + eps * tanh((W_h - gamma I) h + W_x x + b)
Vector eusn_step(const Reservoir& r, std::span<const double> h, std::span<const double> x);

/// (1 - alpha) h + alpha * tanh(W_h h + W_x x + b)
Vector esn_step(const Reservoir& r, std::span<const double> h, std::span<const double> x);

struct StateTrajectory {
    std::vector<Vector> states;  ///< states.size() == inputs_len + 1
    std::size_t inputs_len = 0;
};

/// Drives the reservoir from h(0) = 0 over the rows of `series` (T x X).
StateTrajectory run_sequence(const Reservoir& r, const Matrix& series);

/// h(T) only, without storing the trajectory.
Vector final_state(const Reservoir& r, const Matrix& series);

/// Final states of many series as rows of an (count x N) matrix.
Matrix final_states(const Reservoir& r, std::span<const Matrix> series, std::size_t threads = 1);

}  // namespace eusn
