#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "eusn/linalg.hpp"

namespace eusn {

using Labels = std::vector<std::size_t>;

enum class Activation { Sigmoid, Softmax };

/// Dense output layer on the final reservoir state. Binary problems use a
/// single sigmoid unit; C > 2 classes use C softmax units.
struct ReadoutModel {
    Matrix weights;  ///< N x C
    Vector bias;     ///< length C
    Activation activation = Activation::Sigmoid;

    std::size_t n_features() const noexcept { return weights.rows(); }
    std::size_t n_outputs() const noexcept { return weights.cols(); }

    /// Throws ConfigError if shapes or the activation/C pairing are inconsistent.
    void validate() const;

    bool operator==(const ReadoutModel&) const = default;
};

/// Output units needed for `n_classes` classes (1 for binary).
std::size_t output_units(std::size_t n_classes);

ReadoutModel zero_readout(std::size_t n_features, std::size_t n_classes);

/// Weights uniform over [-1/sqrt(N), 1/sqrt(N)], zero bias.
ReadoutModel random_readout(std::size_t n_features, std::size_t n_classes, std::uint64_t seed);

/// Class probabilities: [p(class 1)] for sigmoid, the full distribution for softmax.
Vector readout_forward(const ReadoutModel& m, std::span<const double> state);

/// Sigmoid: class 1 iff p > 0.5 (a tie goes to class 0). Softmax: argmax, lowest index on ties.
std::size_t predict(const ReadoutModel& m, std::span<const double> state);

/// Binary (one probability) or categorical cross-entropy with probabilities
/// clamped to [1e-12, 1 - 1e-12].
double cross_entropy(std::span<const double> probs, std::size_t label);

struct LossGradient {
    double loss = 0.0;  ///< mean cross-entropy
    Matrix d_weights;
    Vector d_bias;
};

/// Mean loss over the rows of `states` and its analytic gradient.
LossGradient loss_and_gradient(const ReadoutModel& m, const Matrix& states, std::span<const std::size_t> labels);

double mean_loss(const ReadoutModel& m, const Matrix& states, std::span<const std::size_t> labels);

double evaluate_accuracy(const ReadoutModel& m, const Matrix& states, std::span<const std::size_t> labels);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t max_epochs = 200;  ///< 0 returns the initial readout untrained
    std::size_t patience = 10;
    std::size_t batch_size = 32;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-7;
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<double> val_accuracy;
    std::size_t stopped_epoch = 0;  ///< last epoch run (1-based), 0 if none
    std::size_t best_epoch = 0;     ///< epoch whose weights were returned
};

/// Patience-based stopping on strictly decreasing validation loss.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    /// Record the loss of `epoch` (1-based, consecutive). Returns true when
    /// training should stop after this epoch.
    bool update(std::size_t epoch, double loss);

    std::size_t best_epoch() const noexcept { return best_epoch_; }
    double best_loss() const noexcept { return best_loss_; }
    bool improved_last() const noexcept { return improved_last_; }

private:
    std::size_t patience_;
    std::size_t best_epoch_ = 0;
    double best_loss_ = 0.0;
    bool improved_last_ = false;
};

struct TrainResult {
    ReadoutModel model;
    TrainHistory history;
    ReadoutModel initial;  ///< weights before the first update
};

/// Minibatch RMSprop on cross-entropy with early stopping on the validation
/// loss; returns the best-epoch weights. Throws TrainingError on a
/// non-finite loss.
TrainResult train_readout(const Matrix& states, std::span<const std::size_t> labels, const Matrix& val_states,
                          std::span<const std::size_t> val_labels, std::size_t n_classes,
                          const TrainConfig& cfg);

/// Closed-form ridge regression on an intercept-augmented design. Binary
/// targets are +/-1 on one unit, multiclass targets are one-hot; the
/// intercept is not penalised. Throws NumericalError if the normal matrix is
/// singular (possible only with regularizer == 0).
ReadoutModel train_readout_ridge(const Matrix& states, std::span<const std::size_t> labels,
                                 std::size_t n_classes, double regularizer);

/// Columns: epoch,train_loss,val_loss,val_accuracy
void write_history_csv(const TrainHistory& history, std::ostream& out);

}  // namespace eusn
