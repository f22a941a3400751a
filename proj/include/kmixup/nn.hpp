#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "mixup.hpp"
#include "rng.hpp"

namespace kmixup {

/// Fully-connected ReLU network. weights[l] maps layer l (size layer_sizes[l])
/// to layer l+1; ReLU on hidden layers, identity on the output (logits).
struct MlpModel {
    std::vector<std::size_t> layer_sizes;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    /// Names of the output classes, aligned with logit indices; optional.
    std::vector<std::string> class_names;

    std::size_t num_layers() const noexcept { return weights.size(); }
    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < num_layers(); ++l)
            n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
        return n;
    }

    void validate() const {
        if (layer_sizes.size() < 2) throw ShapeError("model needs at least an input and an output layer");
        if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size())
            throw ShapeError("model has inconsistent layer count");
        for (std::size_t l = 0; l < num_layers(); ++l) {
            const auto rows = static_cast<Eigen::Index>(layer_sizes[l + 1]);
            const auto cols = static_cast<Eigen::Index>(layer_sizes[l]);
            if (weights[l].rows() != rows || weights[l].cols() != cols || biases[l].size() != rows)
                throw ShapeError("layer " + std::to_string(l) + " has wrong parameter shape");
            if (!weights[l].allFinite() || !biases[l].allFinite())
                throw NumericError("layer " + std::to_string(l) + " has non-finite parameters");
        }
    }

    static MlpModel zeros(std::vector<std::size_t> sizes) {
        MlpModel m;
        m.layer_sizes = std::move(sizes);
        if (m.layer_sizes.size() < 2) throw ShapeError("model needs at least an input and an output layer");
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
            if (m.layer_sizes[l] == 0 || m.layer_sizes[l + 1] == 0) throw ShapeError("layer sizes must be positive");
            m.weights.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.layer_sizes[l + 1]),
                                                      static_cast<Eigen::Index>(m.layer_sizes[l])));
            m.biases.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.layer_sizes[l + 1])));
        }
        return m;
    }
};

/// Glorot-uniform weights U(-sqrt(6/(fan_in+fan_out)), +...), zero biases.
inline MlpModel init_mlp(std::vector<std::size_t> sizes, std::uint64_t seed) {
    MlpModel m = MlpModel::zeros(std::move(sizes));
    Rng gen = make_stream(seed, 0x1417);
    for (auto& w : m.weights) {
        const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = limit * (2.0 * uniform01(gen) - 1.0);
    }
    return m;
}

/// Gradient of a scalar loss with respect to every parameter (and optionally
/// the inputs), in the model's own shapes.
struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    /// d loss / d input, one column per sample.
    Eigen::MatrixXd inputs;
};

struct LossAndGrads {
    double loss = 0.0;
    Gradients grads;
};

inline constexpr double kLogClamp = 1e-12;

namespace detail {

inline void check_input(const MlpModel& model, const Eigen::MatrixXd& x) {
    if (model.weights.empty()) throw ShapeError("model has no layers");
    if (x.rows() != static_cast<Eigen::Index>(model.input_size()))
        throw ShapeError("input has " + std::to_string(x.rows()) + " features, model expects " +
                         std::to_string(model.input_size()));
}

/// Pre-activations of every layer for a column batch.
inline std::vector<Eigen::MatrixXd> forward_trace(const MlpModel& model, const Eigen::MatrixXd& x) {
    check_input(model, x);
    std::vector<Eigen::MatrixXd> pre;
    pre.reserve(model.num_layers());
    Eigen::MatrixXd act = x;
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        Eigen::MatrixXd z = model.weights[l] * act;
        z.colwise() += model.biases[l];
        if (l + 1 < model.num_layers()) act = z.cwiseMax(0.0);
        pre.push_back(std::move(z));
    }
    return pre;
}

}  // namespace detail

/// Logits for a batch of inputs stored as columns.
inline Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& x) {
    return detail::forward_trace(model, x).back();
}

inline Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& features) {
    return forward_batch(model, features).col(0);
}

/// Numerically stable softmax of one logit column.
inline Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
}

/// Mean soft-label cross-entropy -sum_c y_c log softmax(z)_c over the batch
/// (columns of x and y) with exact gradients by backpropagation. Log
/// probabilities are clamped below at log(1e-12); the gradient accounts for
/// the clamp, so it is the true gradient of the reported loss.
inline LossAndGrads loss_and_grads(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                   bool want_input_grad = false) {
    if (y.rows() != static_cast<Eigen::Index>(model.output_size()) || y.cols() != x.cols())
        throw ShapeError("label batch shape does not match model output / input batch");
    if (x.cols() == 0) throw ShapeError("empty batch");
    const auto pre = detail::forward_trace(model, x);
    const Eigen::MatrixXd& logits = pre.back();
    if (!logits.allFinite()) throw NumericError("non-finite logits in forward pass");

    const Eigen::Index batch = x.cols();
    const double inv_b = 1.0 / static_cast<double>(batch);
    const double log_floor = std::log(kLogClamp);
    LossAndGrads out;
    Eigen::MatrixXd delta(logits.rows(), batch);
    for (Eigen::Index s = 0; s < batch; ++s) {
        const Eigen::VectorXd z = logits.col(s);
        const double zmax = z.maxCoeff();
        const double lse = zmax + std::log((z.array() - zmax).exp().sum());
        const Eigen::VectorXd p = (z.array() - lse).exp();
        double wsum = 0.0;
        Eigen::VectorXd w(z.size());
        for (Eigen::Index c = 0; c < z.size(); ++c) {
            const double logp = z(c) - lse;
            const bool clamped = logp < log_floor;
            out.loss -= y(c, s) * (clamped ? log_floor : logp);
            w(c) = clamped ? 0.0 : y(c, s);
            wsum += w(c);
        }
        delta.col(s) = (p * wsum - w) * inv_b;
    }
    out.loss *= inv_b;
    if (!std::isfinite(out.loss)) throw NumericError("non-finite loss");

    const std::size_t L = model.num_layers();
    out.grads.weights.resize(L);
    out.grads.biases.resize(L);
    for (std::size_t l = L; l-- > 0;) {
        const Eigen::MatrixXd input_act = l == 0 ? x : Eigen::MatrixXd(pre[l - 1].cwiseMax(0.0));
        out.grads.weights[l].noalias() = delta * input_act.transpose();
        out.grads.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = model.weights[l].transpose() * delta;
            delta = back.array() * (pre[l - 1].array() > 0.0).cast<double>();
        } else if (want_input_grad) {
            out.grads.inputs = model.weights[0].transpose() * delta;
        }
    }
    return out;
}

template <class Range>
void stack_columns(const Range& points, Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
    const auto n = static_cast<Eigen::Index>(std::size(points));
    if (n == 0) throw ShapeError("empty batch");
    x.resize(points[0].features.size(), n);
    y.resize(points[0].label.size(), n);
    Eigen::Index s = 0;
    for (const auto& p : points) {
        if (p.features.size() != x.rows() || p.label.size() != y.rows()) throw ShapeError("ragged batch");
        x.col(s) = p.features;
        y.col(s) = p.label;
        ++s;
    }
}

/// Batch overload for LabeledPoint / VicinalPoint ranges.
template <class Range>
LossAndGrads loss_and_grads(const MlpModel& model, const Range& points) {
    Eigen::MatrixXd x, y;
    stack_columns(points, x, y);
    return loss_and_grads(model, x, y);
}

/// Fraction of rows whose argmax logit equals the argmax label.
inline double evaluate(const MlpModel& model, const Dataset& data) {
    if (data.empty()) throw InputError("cannot evaluate on an empty dataset");
    Eigen::MatrixXd x, y;
    stack_columns(data.points, x, y);
    const Eigen::MatrixXd logits = forward_batch(model, x);
    std::size_t correct = 0;
    for (Eigen::Index s = 0; s < logits.cols(); ++s)
        if (argmax(logits.col(s)) == argmax(y.col(s))) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Fast gradient sign perturbation x + epsilon * sign(d loss / d x).
inline Eigen::VectorXd fgsm_attack(const MlpModel& model, const Eigen::VectorXd& features, const Eigen::VectorXd& label,
                                   double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be finite and >= 0");
    if (epsilon == 0.0) {
        detail::check_input(model, features);
        return features;
    }
    const LossAndGrads lg = loss_and_grads(model, features, label, true);
    return features + epsilon * lg.grads.inputs.col(0).unaryExpr(&sign_of);
}

/// Accuracy after perturbing every row with FGSM at `epsilon`. At epsilon = 0
/// this is evaluate(model, data) exactly.
inline double adversarial_accuracy(const MlpModel& model, const Dataset& data, double epsilon) {
    if (data.empty()) throw InputError("cannot evaluate on an empty dataset");
    if (epsilon == 0.0) return evaluate(model, data);
    Eigen::MatrixXd x, y;
    stack_columns(data.points, x, y);
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be finite and >= 0");
    const LossAndGrads lg = loss_and_grads(model, x, y, true);
    // The batch-mean loss scales each column's input gradient by 1/N, which
    // leaves signs unchanged.
    const Eigen::MatrixXd adv = x + epsilon * lg.grads.inputs.unaryExpr(&sign_of);
    const Eigen::MatrixXd logits = forward_batch(model, adv);
    std::size_t correct = 0;
    for (Eigen::Index s = 0; s < logits.cols(); ++s)
        if (argmax(logits.col(s)) == argmax(y.col(s))) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
    double learning_rate = 0.1;
    std::vector<std::size_t> milestones{100, 150};
    double momentum = 0.9;
    double weight_decay = 1e-4;
    std::size_t epochs = 200;
    MixupConfig mixup{};
    /// Matchings per epoch; 0 selects floor(N / 2k), so an epoch draws on
    /// every training row about once.
    std::size_t steps_per_epoch = 0;
    /// Vicinal points per gradient step, gathered from max(1, batch_size / k)
    /// independent k-matchings (each with its own lambda). 0 means one
    /// matching per step (batch of exactly k).
    std::size_t batch_size = 32;
    std::vector<std::size_t> hidden{130, 120};
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
        if (!(momentum >= 0.0 && momentum < 1.0)) throw ParameterError("momentum must be in [0, 1)");
        if (!(weight_decay >= 0.0)) throw ParameterError("weight_decay must be >= 0");
        if (epochs < 1) throw ParameterError("epochs must be >= 1");
        for (std::size_t i = 1; i < milestones.size(); ++i)
            if (milestones[i] <= milestones[i - 1]) throw ParameterError("milestones must be strictly increasing");
        for (std::size_t h : hidden)
            if (h == 0) throw ParameterError("hidden layer sizes must be positive");
        mixup.validate();
    }

    std::size_t matchings_per_step() const { return batch_size == 0 ? 1 : std::max<std::size_t>(1, batch_size / mixup.k); }

    double learning_rate_at(std::size_t epoch) const {
        double lr = learning_rate;
        for (std::size_t m : milestones)
            if (epoch >= m) lr *= 0.1;
        return lr;
    }
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double test_acc = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
    MlpModel model;
    std::vector<EpochMetrics> history;
};

/// SGD with heavy-ball momentum (buf = mu * buf + g; p -= lr * buf) on
/// k-mixup batches. L2 decay is added to weight gradients only; biases are
/// not decayed. Each step's batch stacks the vicinal points of
/// cfg.matchings_per_step() consecutive matchings from a VicinalSampler.
inline TrainResult train(const Dataset& train_set, const Dataset& test_set, const TrainConfig& cfg) {
    cfg.validate();
    validate_shapes(train_set);
    if (train_set.classes < 1) throw ShapeError("training set has no classes");

    std::vector<std::size_t> sizes{train_set.dim};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(train_set.classes);

    TrainResult result;
    result.model = init_mlp(sizes, cfg.seed);
    result.model.class_names = train_set.class_names;
    MlpModel& model = result.model;

    VicinalSampler sampler(train_set, cfg.mixup);
    const std::size_t matchings = cfg.steps_per_epoch > 0 ? cfg.steps_per_epoch : sampler.steps_per_epoch();
    const std::size_t groups = cfg.matchings_per_step();
    const std::size_t steps = std::max<std::size_t>(1, matchings / groups);

    std::vector<Eigen::MatrixXd> buf_w;
    std::vector<Eigen::VectorXd> buf_b;
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        buf_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
        buf_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    }

    Eigen::MatrixXd x, y;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cfg.learning_rate_at(epoch);
        double loss_sum = 0.0;
        for (std::size_t step = 0; step < steps; ++step) {
            std::vector<VicinalPoint> batch;
            for (std::size_t g = 0; g < groups; ++g) {
                auto part = sampler.next();
                batch.insert(batch.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
            }
            stack_columns(batch, x, y);
            LossAndGrads lg;
            try {
                lg = loss_and_grads(model, x, y);
            } catch (const NumericError& e) {
                std::ostringstream msg;
                msg << "training diverged at epoch " << epoch << ", step " << step << " (lr " << lr << ", k "
                    << cfg.mixup.k << ", alpha " << cfg.mixup.alpha << "): " << e.what();
                throw NumericError(msg.str());
            }
            loss_sum += lg.loss;
            for (std::size_t l = 0; l < model.num_layers(); ++l) {
                buf_w[l] = cfg.momentum * buf_w[l] + lg.grads.weights[l] + cfg.weight_decay * model.weights[l];
                buf_b[l] = cfg.momentum * buf_b[l] + lg.grads.biases[l];
                model.weights[l] -= lr * buf_w[l];
                model.biases[l] -= lr * buf_b[l];
            }
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(steps, 1));
        if (!std::isfinite(m.train_loss))
            throw NumericError("training diverged in epoch " + std::to_string(epoch) + ": non-finite mean loss");
        if (!test_set.empty()) m.test_acc = evaluate(model, test_set);
        result.history.push_back(m);
    }
    return result;
}

}  // namespace kmixup
