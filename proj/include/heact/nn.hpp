// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HEACT_NN_HPP
#define HEACT_NN_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "heact/error.hpp"
#include "heact/eval.hpp"
#include "heact/he/evaluator.hpp"
#include "heact/poly.hpp"

namespace heact::nn {

/// Hidden-layer nonlinearity: true relu or a polynomial surrogate.
struct Activation {
    enum class Kind { Relu, Polynomial };

    Kind kind = Kind::Relu;
    poly::Polynomial polynomial{std::vector<double>{0.0}};  // meaningful only for Kind::Polynomial
    std::string name = "relu";    // registered method name for reports

    static Activation relu();
    static Activation poly(poly::Polynomial p, std::string name);
    /// relu, or any builtin polynomial method name.
    static Activation from_name(std::string_view name);

    bool is_polynomial() const { return kind == Kind::Polynomial; }
    double operator()(double z) const;
    /// relu'(0) is taken as 0.
    double derivative(double z) const;
};

struct Layer {
    std::vector<std::vector<double>> w;  // [out][in]
    std::vector<double> b;               // [out]

    std::size_t in_dim() const { return w.empty() ? 0 : w[0].size(); }
    std::size_t out_dim() const { return b.size(); }
};

/// Dimensions chain (layers[k].out == layers[k+1].in) and every weight is
/// finite. The activation follows every layer but the last.
struct MlpModel {
    std::vector<Layer> layers;
    Activation activation;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t num_classes() const { return layers.back().out_dim(); }
    std::vector<std::size_t> dims() const;
};

struct TrainConfig {
    int epochs = 30;
    std::size_t batch_size = 16;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
};

struct TrainResult {
    MlpModel model;
    std::vector<double> history;  // mean minibatch loss per epoch
};

/// Weights uniform with variance 1/fan_in, zero biases.
MlpModel init_mlp(const std::vector<std::size_t>& dims, Activation activation, std::uint64_t seed);

std::vector<double> forward(const MlpModel& model, std::span<const double> x);
int predict(const MlpModel& model, std::span<const double> x);
int argmax(std::span<const double> logits);

/// Mean softmax cross-entropy over the examples and its gradient.
struct LossGradient {
    double loss = 0.0;
    std::vector<Layer> grad;
};
LossGradient loss_and_gradient(const MlpModel& model, const std::vector<std::vector<double>>& points,
                               std::span<const int> labels);

/// Minibatch SGD on softmax cross-entropy. Reshuffles every epoch from
/// cfg.seed; TrainingDiverged names the first epoch with a non-finite loss.
TrainResult train(const MlpModel& model, const eval::LabeledSet& data, const TrainConfig& cfg);

/// Argmax accuracy on a test split.
double evaluate(const MlpModel& model, const eval::LabeledSet& data);
/// Mean over examples and classes of (softmax - onehot)^2 on the given split.
double brier_score(const MlpModel& model, const eval::LabeledSet& data);

/// Levels an encrypted forward pass consumes: one per linear layer plus
/// mult_depth of the activation per hidden layer.
int forward_depth(const MlpModel& model);

nlohmann::json model_to_json(const MlpModel& model);
MlpModel model_from_json(const nlohmann::json& j);
/// Nine-decimal JSON text.
std::string dump_model(const MlpModel& model);
MlpModel load_model(const std::string& path);
void save_model(const MlpModel& model, const std::string& path);

// ---------------------------------------------------------------------------
// Encrypted inference
//
// Slot-block layout: ciphertext i holds feature i of up to slot_count
// examples, one example per slot. Weights stay in the clear.

template <he::HeBackend B>
std::vector<typename B::Ciphertext> encrypt_features(B& backend, const std::vector<std::vector<double>>& points,
                                                     std::size_t begin, std::size_t count) {
    if (count == 0 || begin + count > points.size() || count > backend.params().slot_count()) {
        throw ParameterError("encrypt_features: block out of range");
    }
    const std::size_t dim = points[begin].size();
    const int top = backend.params().max_level();
    std::vector<typename B::Ciphertext> out;
    std::vector<double> column(count);
    for (std::size_t f = 0; f < dim; ++f) {
        for (std::size_t e = 0; e < count; ++e) column[e] = points[begin + e].at(f);
        out.push_back(backend.encrypt(backend.encode(column, top)));
    }
    return out;
}

/// Encrypted logits, one ciphertext per class. Levels consumed equal
/// forward_depth(model); the check happens before any ciphertext work.
template <he::HeBackend B>
std::vector<typename B::Ciphertext> encrypted_forward(const B& backend, const MlpModel& model,
                                                      const std::vector<typename B::Ciphertext>& enc_x) {
    using Ct = typename B::Ciphertext;
    if (!model.activation.is_polynomial()) {
        throw IncompatibleActivation("encrypted_forward: activation '" + model.activation.name +
                                     "' is not a polynomial");
    }
    if (enc_x.size() != model.input_dim()) {
        throw ParameterError("encrypted_forward: expected " + std::to_string(model.input_dim()) +
                             " feature ciphertexts, got " + std::to_string(enc_x.size()));
    }
    const int need = forward_depth(model);
    const int have = enc_x.front().level;
    if (need > have) {
        throw LevelError("depth exceeds modulus chain: forward pass needs " + std::to_string(need) +
                         " levels, " + std::to_string(have) + " available");
    }
    const double scale = backend.params().scale;
    std::vector<Ct> act = enc_x;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        std::vector<Ct> next;
        next.reserve(layer.out_dim());
        for (std::size_t o = 0; o < layer.out_dim(); ++o) {
            Ct z = backend.linear_combination(act, layer.w[o], scale);
            z = backend.add_plain(z, backend.encode_constant(layer.b[o], z.level, z.scale));
            if (l + 1 < model.layers.size()) z = backend.eval_poly(z, model.activation.polynomial);
            next.push_back(std::move(z));
        }
        act = std::move(next);
    }
    return act;
}

/// Decrypts per-class ciphertexts into per-example logit rows.
template <he::HeBackend B>
std::vector<std::vector<double>> decrypt_logits(const B& backend, const std::vector<typename B::Ciphertext>& cts,
                                                std::size_t count) {
    std::vector<std::vector<double>> rows(count, std::vector<double>(cts.size()));
    for (std::size_t k = 0; k < cts.size(); ++k) {
        const auto slots = backend.decode(backend.decrypt(cts[k]));
        for (std::size_t e = 0; e < count; ++e) rows[e][k] = slots[e];
    }
    return rows;
}

struct GapReport {
    double plain_acc = 0.0;
    double enc_acc = 0.0;
    double gap = 0.0;                 // enc_acc - plain_acc
    double max_logit_diff = 0.0;      // max |encrypted - plaintext| over all logits
    double logit_mse = 0.0;           // mean (encrypted - plaintext)^2 over all logits
    int levels = 0;
};

/// Plaintext and encrypted accuracy on the same test examples.
template <he::HeBackend B>
GapReport accuracy_gap(B& backend, const MlpModel& model, const eval::LabeledSet& data) {
    if (data.split != eval::Split::Test) throw ParameterError("accuracy_gap: expects the test split");
    if (!model.activation.is_polynomial()) {
        throw IncompatibleActivation("accuracy_gap: activation '" + model.activation.name + "' is not a polynomial");
    }
    GapReport r;
    std::vector<int> plain_pred, enc_pred;
    double sq = 0.0;
    std::size_t n_logits = 0;
    const std::size_t block = backend.params().slot_count();
    for (std::size_t begin = 0; begin < data.size(); begin += block) {
        const std::size_t count = std::min(block, data.size() - begin);
        const auto enc_x = encrypt_features(backend, data.points, begin, count);
        const auto out = encrypted_forward(backend, model, enc_x);
        r.levels = enc_x.front().level - out.front().level;
        const auto rows = decrypt_logits(backend, out, count);
        for (std::size_t e = 0; e < count; ++e) {
            const auto plain = forward(model, data.points[begin + e]);
            for (std::size_t k = 0; k < plain.size(); ++k) {
                const double d = rows[e][k] - plain[k];
                r.max_logit_diff = std::max(r.max_logit_diff, std::fabs(d));
                sq += d * d;
                ++n_logits;
            }
            plain_pred.push_back(argmax(plain));
            enc_pred.push_back(argmax(rows[e]));
        }
    }
    r.plain_acc = eval::accuracy(plain_pred, data.labels);
    r.enc_acc = eval::accuracy(enc_pred, data.labels);
    r.gap = r.enc_acc - r.plain_acc;
    r.logit_mse = sq / static_cast<double>(n_logits);
    return r;
}

struct Slowdown {
    double plain_s = 0.0;  // median plaintext forward time for one slot block
    double enc_s = 0.0;    // median encrypted_forward time for the same block
    double factor = 0.0;   // enc_s / plain_s
};

/// Times plaintext and encrypted forward passes over the first slot block of
/// points. Encryption and decryption are outside both timers.
template <he::HeBackend B>
Slowdown measure_slowdown(B& backend, const MlpModel& model, const std::vector<std::vector<double>>& points,
                          int repetitions) {
    const std::size_t count = std::min(points.size(), backend.params().slot_count());
    const auto enc_x = encrypt_features(backend, points, 0, count);
    // A plaintext block pass takes microseconds; repeat it so the clock
    // resolution does not dominate.
    constexpr int kInner = 64;
    volatile double sink = 0.0;
    const auto plain = eval::measure(
        [&] {
            for (int r = 0; r < kInner; ++r) {
                for (std::size_t e = 0; e < count; ++e) sink = sink + forward(model, points[e])[0];
            }
        },
        repetitions);
    const auto enc = eval::measure([&] { (void)encrypted_forward(backend, model, enc_x); }, repetitions);
    Slowdown s;
    s.plain_s = plain.median_s / kInner;
    s.enc_s = enc.median_s;
    s.factor = s.enc_s / s.plain_s;
    return s;
}

}  // namespace heact::nn

#endif  // HEACT_NN_HPP
