#include "eusn/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "eusn/errors.hpp"
#include "eusn/io.hpp"
#include "eusn/kernels.hpp"
#include "eusn/rng.hpp"

namespace eusn {
namespace {

constexpr double kProbFloor = 1e-12;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_labels(std::span<const std::size_t> labels, std::size_t n_rows, std::size_t n_classes) {
    if (labels.size() != n_rows) throw ShapeError("label count does not match state rows");
    for (std::size_t y : labels)
        if (y >= n_classes) throw InputError("label " + std::to_string(y) + " out of range");
}

std::size_t classes_of(const ReadoutModel& m) {
    return m.activation == Activation::Sigmoid ? 2 : m.n_outputs();
}

// Logits z = W^T s + b into `z`.
void logits(const ReadoutModel& m, std::span<const double> s, std::span<double> z) {
    const std::size_t c = m.n_outputs();
    std::copy(m.bias.begin(), m.bias.end(), z.begin());
    for (std::size_t i = 0; i < s.size(); ++i) {
        kernels::active().axpy(s[i], m.weights.data() + i * c, z.data(), c);
    }
}

void probabilities(const ReadoutModel& m, std::span<const double> s, std::span<double> p) {
    logits(m, s, p);
    if (m.activation == Activation::Sigmoid) {
        p[0] = sigmoid(p[0]);
        return;
    }
    const double zmax = *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (auto& v : p) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (auto& v : p) v /= sum;
}

std::size_t decide(const ReadoutModel& m, std::span<const double> p) {
    if (m.activation == Activation::Sigmoid) return p[0] > 0.5 ? 1 : 0;
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

void ReadoutModel::validate() const {
    if (weights.cols() == 0) throw ConfigError("readout needs at least one output unit");
    if (bias.size() != weights.cols()) throw ConfigError("readout bias length must equal output units");
    const bool binary = weights.cols() == 1;
    if (binary != (activation == Activation::Sigmoid)) {
        throw ConfigError("sigmoid readout must have exactly one output unit and vice versa");
    }
}

std::size_t output_units(std::size_t n_classes) {
    if (n_classes < 2) throw InputError("classification needs at least two classes");
    return n_classes == 2 ? 1 : n_classes;
}

ReadoutModel zero_readout(std::size_t n_features, std::size_t n_classes) {
    const std::size_t c = output_units(n_classes);
    return {Matrix(n_features, c), Vector(c, 0.0), c == 1 ? Activation::Sigmoid : Activation::Softmax};
}

ReadoutModel random_readout(std::size_t n_features, std::size_t n_classes, std::uint64_t seed) {
    ReadoutModel m = zero_readout(n_features, n_classes);
    const double limit = n_features > 0 ? 1.0 / std::sqrt(static_cast<double>(n_features)) : 0.0;
    Rng rng(seed);
    for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = rng.symmetric(limit);
    return m;
}

Vector readout_forward(const ReadoutModel& m, std::span<const double> state) {
    if (state.size() != m.n_features()) throw ShapeError("state length does not match readout inputs");
    Vector p(m.n_outputs());
    probabilities(m, state, p);
    return p;
}

std::size_t predict(const ReadoutModel& m, std::span<const double> state) {
    const Vector p = readout_forward(m, state);
    return decide(m, p);
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
    if (probs.empty()) throw InputError("empty probability vector");
    if (probs.size() == 1) {
        if (label > 1) throw InputError("binary label must be 0 or 1");
        const double p = std::clamp(probs[0], kProbFloor, 1.0 - kProbFloor);
        return label == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    if (label >= probs.size()) throw InputError("label out of range");
    return -std::log(std::clamp(probs[label], kProbFloor, 1.0 - kProbFloor));
}

LossGradient loss_and_gradient(const ReadoutModel& m, const Matrix& states, std::span<const std::size_t> labels) {
    if (states.cols() != m.n_features()) throw ShapeError("state width does not match readout inputs");
    check_labels(labels, states.rows(), classes_of(m));
    const std::size_t c = m.n_outputs();
    LossGradient g{0.0, Matrix(m.n_features(), c), Vector(c, 0.0)};
    if (states.rows() == 0) return g;
    Vector p(c);
    for (std::size_t r = 0; r < states.rows(); ++r) {
        const auto s = states.row(r);
        probabilities(m, s, p);
        g.loss += cross_entropy(p, labels[r]);
        // d(loss)/d(logit) = p - onehot for both sigmoid/BCE and softmax/CE.
        if (c == 1) {
            p[0] -= labels[r] == 1 ? 1.0 : 0.0;
        } else {
            p[labels[r]] -= 1.0;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            kernels::active().axpy(s[i], p.data(), g.d_weights.data() + i * c, c);
        }
        for (std::size_t k = 0; k < c; ++k) g.d_bias[k] += p[k];
    }
    const double inv = 1.0 / static_cast<double>(states.rows());
    g.loss *= inv;
    for (std::size_t i = 0; i < g.d_weights.size(); ++i) g.d_weights.data()[i] *= inv;
    for (auto& v : g.d_bias) v *= inv;
    return g;
}

double mean_loss(const ReadoutModel& m, const Matrix& states, std::span<const std::size_t> labels) {
    if (states.cols() != m.n_features()) throw ShapeError("state width does not match readout inputs");
    check_labels(labels, states.rows(), classes_of(m));
    if (states.rows() == 0) return 0.0;
    Vector p(m.n_outputs());
    double total = 0.0;
    for (std::size_t r = 0; r < states.rows(); ++r) {
        probabilities(m, states.row(r), p);
        total += cross_entropy(p, labels[r]);
    }
    return total / static_cast<double>(states.rows());
}

double evaluate_accuracy(const ReadoutModel& m, const Matrix& states, std::span<const std::size_t> labels) {
    if (states.cols() != m.n_features()) throw ShapeError("state width does not match readout inputs");
    if (labels.size() != states.rows()) throw ShapeError("label count does not match state rows");
    if (states.rows() == 0) return 0.0;
    Vector p(m.n_outputs());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < states.rows(); ++r) {
        probabilities(m, states.row(r), p);
        if (decide(m, p) == labels[r]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(states.rows());
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be finite and non-negative");
    }
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (max_epochs > 0 && patience > max_epochs) throw ConfigError("patience must not exceed max_epochs");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(rmsprop_decay > 0.0 && rmsprop_decay < 1.0)) throw ConfigError("rmsprop_decay must lie in (0, 1)");
    if (!(rmsprop_epsilon > 0.0)) throw ConfigError("rmsprop_epsilon must be > 0");
}

bool EarlyStopping::update(std::size_t epoch, double loss) {
    if (best_epoch_ == 0 || loss < best_loss_) {
        best_epoch_ = epoch;
        best_loss_ = loss;
        improved_last_ = true;
        return false;
    }
    improved_last_ = false;
    return epoch - best_epoch_ >= patience_;
}

TrainResult train_readout(const Matrix& states, std::span<const std::size_t> labels, const Matrix& val_states,
                          std::span<const std::size_t> val_labels, std::size_t n_classes,
                          const TrainConfig& cfg) {
    cfg.validate();
    if (states.rows() == 0) throw InputError("training set is empty");
    if (val_states.rows() == 0) throw InputError("validation set is empty");
    if (val_states.cols() != states.cols()) throw ShapeError("validation states have a different width");
    check_labels(labels, states.rows(), n_classes);
    check_labels(val_labels, val_states.rows(), n_classes);

    const std::size_t n = states.cols();
    Rng rng(cfg.seed);
    ReadoutModel model = random_readout(n, n_classes, rng.next_u64());
    TrainResult result{model, {}, model};
    if (cfg.max_epochs == 0) return result;

    const std::size_t c = model.n_outputs();
    Matrix v_w(n, c);
    Vector v_b(c, 0.0);
    std::vector<std::size_t> order(states.rows());
    std::iota(order.begin(), order.end(), 0);

    EarlyStopping stopper(cfg.patience);
    ReadoutModel best = model;
    const double d = cfg.rmsprop_decay;
    const double lr = cfg.learning_rate;
    const double eps = cfg.rmsprop_epsilon;
    auto rms_update = [&](double& theta, double& v, double g) {
        v = d * v + (1.0 - d) * g * g;
        theta -= lr * g / (std::sqrt(v) + eps);
    };

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            Matrix batch(end - start, n);
            Labels batch_labels(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const auto src = states.row(order[k]);
                std::copy(src.begin(), src.end(), batch.row(k - start).begin());
                batch_labels[k - start] = labels[order[k]];
            }
            const LossGradient g = loss_and_gradient(model, batch, batch_labels);
            if (!std::isfinite(g.loss)) throw TrainingError(epoch, "non-finite training loss");
            epoch_loss += g.loss * static_cast<double>(end - start);
            for (std::size_t i = 0; i < model.weights.size(); ++i) {
                rms_update(model.weights.data()[i], v_w.data()[i], g.d_weights.data()[i]);
            }
            for (std::size_t k = 0; k < c; ++k) rms_update(model.bias[k], v_b[k], g.d_bias[k]);
        }
        const double val_loss = mean_loss(model, val_states, val_labels);
        if (!std::isfinite(val_loss)) throw TrainingError(epoch, "non-finite validation loss");
        result.history.train_loss.push_back(epoch_loss / static_cast<double>(states.rows()));
        result.history.val_loss.push_back(val_loss);
        result.history.val_accuracy.push_back(evaluate_accuracy(model, val_states, val_labels));
        result.history.stopped_epoch = epoch;
        const bool stop = stopper.update(epoch, val_loss);
        if (stopper.improved_last()) best = model;
        if (stop) break;
    }
    result.history.best_epoch = stopper.best_epoch();
    result.model = std::move(best);
    return result;
}

ReadoutModel train_readout_ridge(const Matrix& states, std::span<const std::size_t> labels,
                                 std::size_t n_classes, double regularizer) {
    if (!(regularizer >= 0.0)) throw ConfigError("regularizer must be non-negative");
    if (states.rows() == 0) throw InputError("training set is empty");
    check_labels(labels, states.rows(), n_classes);
    const std::size_t n = states.cols();
    const std::size_t c = output_units(n_classes);
    const std::size_t p = n + 1;  // last column is the intercept

    Matrix gram(p, p);
    Matrix rhs(p, c);
    Vector row(p);
    for (std::size_t r = 0; r < states.rows(); ++r) {
        const auto s = states.row(r);
        std::copy(s.begin(), s.end(), row.begin());
        row[n] = 1.0;
        for (std::size_t i = 0; i < p; ++i) {
            kernels::active().axpy(row[i], row.data(), gram.data() + i * p, p);
            if (c == 1) {
                rhs(i, 0) += row[i] * (labels[r] == 1 ? 1.0 : -1.0);
            } else {
                rhs(i, labels[r]) += row[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) gram(i, i) += regularizer;
    const Matrix solution = solve_spd(gram, rhs);

    ReadoutModel m = zero_readout(n, n_classes);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < c; ++k) m.weights(i, k) = solution(i, k);
    for (std::size_t k = 0; k < c; ++k) m.bias[k] = solution(n, k);
    return m;
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
    out << "epoch,train_loss,val_loss,val_accuracy\n";
    for (std::size_t e = 0; e < history.val_loss.size(); ++e) {
        out << e + 1 << ',' << format_double(history.train_loss[e]) << ','
            << format_double(history.val_loss[e]) << ',' << format_double(history.val_accuracy[e]) << '\n';
    }
}

}  // namespace eusn
