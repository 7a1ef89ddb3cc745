// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include "heact/nn.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "heact/json_format.hpp"
#include "heact/random.hpp"

namespace heact::nn {

namespace {

void check_model(const MlpModel& m) {
    if (m.layers.empty()) throw ParameterError("model has no layers");
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const Layer& layer = m.layers[l];
        if (layer.w.size() != layer.b.size() || layer.w.empty()) {
            throw ParameterError("layer " + std::to_string(l) + ": weight rows and bias length differ");
        }
        for (const auto& row : layer.w) {
            if (row.size() != layer.in_dim() || row.empty()) {
                throw ParameterError("layer " + std::to_string(l) + ": ragged weight matrix");
            }
            for (double v : row) {
                if (!std::isfinite(v)) throw ParameterError("layer " + std::to_string(l) + ": non-finite weight");
            }
        }
        for (double v : layer.b) {
            if (!std::isfinite(v)) throw ParameterError("layer " + std::to_string(l) + ": non-finite bias");
        }
        if (l > 0 && layer.in_dim() != m.layers[l - 1].out_dim()) {
            throw ParameterError("layer " + std::to_string(l) + ": input width does not match previous output");
        }
    }
}

// Pre-activations z[l] and layer inputs a[l] (a[0] = x) of one forward pass.
struct Trace {
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> z;
};

std::vector<double> affine(const Layer& layer, std::span<const double> x) {
    std::vector<double> z(layer.out_dim());
    for (std::size_t o = 0; o < z.size(); ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) acc += layer.w[o][i] * x[i];
        z[o] = acc + layer.b[o];
    }
    return z;
}

Trace trace_forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim()) {
        throw ParameterError("forward: input has " + std::to_string(x.size()) + " features, model expects " +
                             std::to_string(model.input_dim()));
    }
    Trace t;
    t.a.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        t.z.push_back(affine(model.layers[l], t.a.back()));
        if (l + 1 < model.layers.size()) {
            std::vector<double> h(t.z.back().size());
            for (std::size_t i = 0; i < h.size(); ++i) h[i] = model.activation(t.z.back()[i]);
            t.a.push_back(std::move(h));
        }
    }
    return t;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = std::exp(logits[k] - m);
        s += p[k];
    }
    for (auto& v : p) v /= s;
    return p;
}

std::vector<Layer> zeros_like(const MlpModel& m) {
    std::vector<Layer> g;
    for (const auto& layer : m.layers) {
        g.push_back({std::vector<std::vector<double>>(layer.out_dim(), std::vector<double>(layer.in_dim(), 0.0)),
                     std::vector<double>(layer.out_dim(), 0.0)});
    }
    return g;
}

}  // namespace

// ============================================================================
// Activation
// ============================================================================

Activation Activation::relu() { return Activation{}; }

Activation Activation::poly(poly::Polynomial p, std::string name) {
    return Activation{Kind::Polynomial, std::move(p), std::move(name)};
}

Activation Activation::from_name(std::string_view name) {
    if (name == "relu") return relu();
    auto m = eval::builtin_method(name);
    return poly(std::move(m.polynomial), std::move(m.name));
}

double Activation::operator()(double z) const {
    return kind == Kind::Relu ? poly::relu(z) : poly::eval(polynomial, z);
}

double Activation::derivative(double z) const {
    if (kind == Kind::Relu) return z > 0.0 ? 1.0 : 0.0;
    // p'(z) by Horner on the coefficients k*c_k.
    const auto& c = polynomial.coeffs();
    double acc = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) acc = acc * z + static_cast<double>(k) * c[k];
    return acc;
}

// ============================================================================
// Model
// ============================================================================

std::vector<std::size_t> MlpModel::dims() const {
    std::vector<std::size_t> d{input_dim()};
    for (const auto& layer : layers) d.push_back(layer.out_dim());
    return d;
}

MlpModel init_mlp(const std::vector<std::size_t>& dims, Activation activation, std::uint64_t seed) {
    if (dims.size() < 2) throw ParameterError("init_mlp: need at least input and output widths");
    for (std::size_t d : dims) {
        if (d == 0) throw ParameterError("init_mlp: layer widths must be positive");
    }
    Prng rng(seed);
    MlpModel m;
    m.activation = std::move(activation);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        // U(-a, a) has variance a^2/3 = 1/fan_in.
        const double a = std::sqrt(3.0 / static_cast<double>(dims[l]));
        Layer layer{std::vector<std::vector<double>>(dims[l + 1], std::vector<double>(dims[l])),
                    std::vector<double>(dims[l + 1], 0.0)};
        for (auto& row : layer.w) {
            for (auto& v : row) v = rng.uniform(-a, a);
        }
        m.layers.push_back(std::move(layer));
    }
    return m;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
    return std::move(trace_forward(model, x).z.back());
}

int argmax(std::span<const double> logits) {
    if (logits.empty()) throw ParameterError("argmax: empty logits");
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

int predict(const MlpModel& model, std::span<const double> x) { return argmax(forward(model, x)); }

int forward_depth(const MlpModel& model) {
    const int layers = static_cast<int>(model.layers.size());
    const int act = model.activation.is_polynomial() ? poly::mult_depth(model.activation.polynomial) : 0;
    return (layers - 1) * act + layers;
}

// ============================================================================
// Training
// ============================================================================

LossGradient loss_and_gradient(const MlpModel& model, const std::vector<std::vector<double>>& points,
                               std::span<const int> labels) {
    if (points.size() != labels.size() || points.empty()) {
        throw ParameterError("loss_and_gradient: need equally many points and labels");
    }
    LossGradient out{0.0, zeros_like(model)};
    const std::size_t n_layers = model.layers.size();
    for (std::size_t e = 0; e < points.size(); ++e) {
        const Trace t = trace_forward(model, points[e]);
        const auto p = softmax(t.z.back());
        const auto y = static_cast<std::size_t>(labels[e]);
        if (labels[e] < 0 || y >= p.size()) throw ParameterError("loss_and_gradient: label out of range");
        out.loss += -std::log(std::max(p[y], 1e-300));

        std::vector<double> delta = p;
        delta[y] -= 1.0;
        for (std::size_t l = n_layers; l-- > 0;) {
            const auto& a = t.a[l];
            Layer& g = out.grad[l];
            for (std::size_t o = 0; o < delta.size(); ++o) {
                for (std::size_t i = 0; i < a.size(); ++i) g.w[o][i] += delta[o] * a[i];
                g.b[o] += delta[o];
            }
            if (l == 0) break;
            std::vector<double> back(a.size(), 0.0);
            const Layer& layer = model.layers[l];
            for (std::size_t o = 0; o < delta.size(); ++o) {
                for (std::size_t i = 0; i < a.size(); ++i) back[i] += layer.w[o][i] * delta[o];
            }
            for (std::size_t i = 0; i < back.size(); ++i) back[i] *= model.activation.derivative(t.z[l - 1][i]);
            delta = std::move(back);
        }
    }
    const double inv = 1.0 / static_cast<double>(points.size());
    out.loss *= inv;
    for (auto& g : out.grad) {
        for (auto& row : g.w) {
            for (auto& v : row) v *= inv;
        }
        for (auto& v : g.b) v *= inv;
    }
    return out;
}

TrainResult train(const MlpModel& model, const eval::LabeledSet& data, const TrainConfig& cfg) {
    if (data.split != eval::Split::Train) throw ParameterError("train: expects the training split");
    if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0) || cfg.seed == 0) {
        throw ParameterError("train: epochs, batch_size, learning_rate and seed must be positive");
    }
    if (data.size() == 0) throw ParameterError("train: empty data");
    check_model(model);

    TrainResult r{model, {}};
    Prng rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
        }
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
            std::vector<std::vector<double>> xs;
            std::vector<int> ys;
            for (std::size_t k = begin; k < end; ++k) {
                xs.push_back(data.points[order[k]]);
                ys.push_back(data.labels[order[k]]);
            }
            const auto lg = loss_and_gradient(r.model, xs, ys);
            if (!std::isfinite(lg.loss)) {
                throw TrainingDiverged("training diverged: non-finite loss in epoch " + std::to_string(epoch), epoch);
            }
            for (std::size_t l = 0; l < r.model.layers.size(); ++l) {
                Layer& layer = r.model.layers[l];
                const Layer& g = lg.grad[l];
                for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                    for (std::size_t i = 0; i < layer.in_dim(); ++i) layer.w[o][i] -= cfg.learning_rate * g.w[o][i];
                    layer.b[o] -= cfg.learning_rate * g.b[o];
                }
            }
            total += lg.loss;
            ++batches;
        }
        const double mean = total / static_cast<double>(batches);
        bool finite = std::isfinite(mean);
        for (const auto& layer : r.model.layers) {
            for (const auto& row : layer.w) {
                for (double v : row) finite = finite && std::isfinite(v);
            }
        }
        if (!finite) {
            throw TrainingDiverged("training diverged: non-finite loss in epoch " + std::to_string(epoch), epoch);
        }
        r.history.push_back(mean);
    }
    return r;
}

double evaluate(const MlpModel& model, const eval::LabeledSet& data) {
    if (data.split != eval::Split::Test) throw ParameterError("evaluate: expects the test split");
    std::vector<int> pred;
    pred.reserve(data.size());
    for (const auto& x : data.points) pred.push_back(predict(model, x));
    return eval::accuracy(pred, data.labels);
}

double brier_score(const MlpModel& model, const eval::LabeledSet& data) {
    if (data.size() == 0) throw ParameterError("brier_score: empty data");
    double acc = 0.0;
    for (std::size_t e = 0; e < data.size(); ++e) {
        const auto p = softmax(forward(model, data.points[e]));
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double t = static_cast<int>(k) == data.labels[e] ? 1.0 : 0.0;
            acc += (p[k] - t) * (p[k] - t);
        }
    }
    return acc / static_cast<double>(data.size() * model.num_classes());
}

// ============================================================================
// Serialization
// ============================================================================

nlohmann::json model_to_json(const MlpModel& model) {
    nlohmann::json j;
    j["dims"] = model.dims();
    nlohmann::json act;
    act["kind"] = model.activation.is_polynomial() ? "polynomial" : "relu";
    act["name"] = model.activation.name;
    if (model.activation.is_polynomial()) act["coeffs"] = model.activation.polynomial.coeffs();
    j["activation"] = std::move(act);
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : model.layers) layers.push_back({{"w", layer.w}, {"b", layer.b}});
    j["layers"] = std::move(layers);
    return j;
}

MlpModel model_from_json(const nlohmann::json& j) {
    MlpModel m;
    try {
        const auto& act = j.at("activation");
        const auto kind = act.at("kind").get<std::string>();
        if (kind == "relu") {
            m.activation = Activation::relu();
        } else if (kind == "polynomial") {
            m.activation = Activation::poly(poly::Polynomial(act.at("coeffs").get<std::vector<double>>()),
                                            act.value("name", std::string("kernel-fit")));
        } else {
            throw ParseError("unknown activation kind '" + kind + "'", 0);
        }
        for (const auto& lj : j.at("layers")) {
            m.layers.push_back({lj.at("w").get<std::vector<std::vector<double>>>(), lj.at("b").get<std::vector<double>>()});
        }
        check_model(m);
        if (j.at("dims").get<std::vector<std::size_t>>() != m.dims()) {
            throw ParseError("dims do not match the layer shapes", 0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model JSON: ") + e.what(), 0);
    } catch (const ParameterError& e) {
        throw ParseError(std::string("invalid model: ") + e.what(), 0);
    }
    return m;
}

std::string dump_model(const MlpModel& model) { return dump_fixed(model_to_json(model), 9); }

MlpModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed model JSON in " + path + ": " + e.what(), 0);
    }
    return model_from_json(j);
}

void save_model(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << dump_model(model);
    if (!out.flush()) throw IoError("cannot write " + path);
}

}  // namespace heact::nn
