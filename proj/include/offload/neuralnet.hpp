#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "offload/rng.hpp"

namespace offload {

constexpr int kNumActions = 3;

/// Dense fully-connected network parameters. weights[l] is row-major
/// (layer_sizes[l+1] x layer_sizes[l]), biases[l] has layer_sizes[l+1]
/// entries. Hidden layers use rectified-linear activation, the output
/// layer is linear (Q regression needs an unbounded range).
struct MlpParams {
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    std::size_t num_layers() const { return weights.size(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }
};

inline void validate_layer_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw std::invalid_argument("network needs at least input and output layers");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("layer sizes must be positive");
}

/// Hyperparameters for the learning engine. `units` is the number of
/// parallel online/target network pairs; `train_trigger` is how many
/// replay-pool insertions separate two training steps.
struct TrainConfig {
    double learning_rate = 0.01;
    double discount = 0.9;
    int batch_size = 128;
    int freeze_interval = 200;
    double epsilon_initial = 1.0;
    double epsilon_final = 0.05;
    long epsilon_decay_steps = 4000;
    int hidden1 = 64;
    int hidden2 = 32;
    int units = 4;
    int memory_capacity = 4096;
    int train_trigger = 5;
    int max_tasks = 5;
    double reward_scale = 1e-3;
    double unit_init_noise = 0.0;

    void validate() const {
        if (!(learning_rate > 0.0) || learning_rate > 1.0)
            throw std::invalid_argument("learning_rate must be in (0, 1]");
        if (!(discount >= 0.0) || discount > 1.0)
            throw std::invalid_argument("discount must be in [0, 1]");
        if (batch_size < 1 || freeze_interval < 1 || hidden1 < 1 || hidden2 < 1 || units < 1 ||
            memory_capacity < 1 || train_trigger < 1 || max_tasks < 1)
            throw std::invalid_argument("counts in TrainConfig must be positive");
        if (epsilon_initial < 0.0 || epsilon_initial > 1.0 || epsilon_final < 0.0 ||
            epsilon_final > epsilon_initial || epsilon_decay_steps < 1)
            throw std::invalid_argument("bad epsilon schedule");
        if (!(reward_scale > 0.0)) throw std::invalid_argument("reward_scale must be positive");
        if (unit_init_noise < 0.0) throw std::invalid_argument("unit_init_noise must be nonnegative");
    }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{{"learning_rate", c.learning_rate},
                       {"discount", c.discount},
                       {"batch_size", c.batch_size},
                       {"freeze_interval", c.freeze_interval},
                       {"epsilon_initial", c.epsilon_initial},
                       {"epsilon_final", c.epsilon_final},
                       {"epsilon_decay_steps", c.epsilon_decay_steps},
                       {"hidden1", c.hidden1},
                       {"hidden2", c.hidden2},
                       {"units", c.units},
                       {"memory_capacity", c.memory_capacity},
                       {"train_trigger", c.train_trigger},
                       {"max_tasks", c.max_tasks},
                       {"reward_scale", c.reward_scale},
                       {"unit_init_noise", c.unit_init_noise}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    c = TrainConfig{};
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    opt("learning_rate", c.learning_rate);
    opt("discount", c.discount);
    opt("batch_size", c.batch_size);
    opt("freeze_interval", c.freeze_interval);
    opt("epsilon_initial", c.epsilon_initial);
    opt("epsilon_final", c.epsilon_final);
    opt("epsilon_decay_steps", c.epsilon_decay_steps);
    opt("hidden1", c.hidden1);
    opt("hidden2", c.hidden2);
    opt("units", c.units);
    opt("memory_capacity", c.memory_capacity);
    opt("train_trigger", c.train_trigger);
    opt("max_tasks", c.max_tasks);
    opt("reward_scale", c.reward_scale);
    opt("unit_init_noise", c.unit_init_noise);
    c.validate();
}

/// Random initialization: weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)],
/// biases zero. Draw order is layer by layer, output row by output row.
inline MlpParams init_mlp(const std::vector<int>& layer_sizes, RandomStream& rs) {
    validate_layer_sizes(layer_sizes);
    MlpParams p;
    p.layer_sizes = layer_sizes;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        int fan_in = layer_sizes[l];
        int fan_out = layer_sizes[l + 1];
        double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
        for (double& v : w) v = rs.uniform(-scale, scale);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

namespace detail {

/// Activations of every layer for one input; activations[0] is the input
/// itself, activations.back() the linear output.
inline void forward_activations(const MlpParams& p, std::span<const double> input,
                                std::vector<std::vector<double>>& activations) {
    if (static_cast<int>(input.size()) != p.input_dim())
        throw std::invalid_argument("input dimension mismatch");
    activations.resize(p.num_layers() + 1);
    activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        int in = p.layer_sizes[l];
        int out = p.layer_sizes[l + 1];
        const std::vector<double>& prev = activations[l];
        std::vector<double>& cur = activations[l + 1];
        cur.assign(out, 0.0);
        const double* w = p.weights[l].data();
        bool last = (l + 1 == p.num_layers());
        for (int o = 0; o < out; ++o) {
            double z = p.biases[l][o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) z += row[i] * prev[i];
            cur[o] = last ? z : (z > 0.0 ? z : 0.0);
        }
    }
}

}  // namespace detail

/// Q values for one state.
inline std::vector<double> forward(const MlpParams& p, std::span<const double> input) {
    std::vector<std::vector<double>> acts;
    detail::forward_activations(p, input, acts);
    return acts.back();
}

/// One training example: regression target for the Q value of a single
/// action in a single state.
struct TrainExample {
    std::span<const double> state;
    int action = 0;
    double target_q = 0.0;
};

/// One gradient-descent step on the mean squared error between the
/// chosen-action Q value and its target, over the batch. Only the chosen
/// action's output receives gradient. Returns the pre-step loss.
inline double train_step(MlpParams& p, std::span<const TrainExample> batch, double learning_rate) {
    if (batch.empty()) throw std::invalid_argument("train_step needs a nonempty batch");
    for (const TrainExample& ex : batch) {
        if (!std::isfinite(ex.target_q)) throw std::invalid_argument("nonfinite training target");
        if (ex.action < 0 || ex.action >= p.output_dim())
            throw std::invalid_argument("action index out of range");
    }

    std::vector<std::vector<double>> grad_w(p.num_layers());
    std::vector<std::vector<double>> grad_b(p.num_layers());
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        grad_w[l].assign(p.weights[l].size(), 0.0);
        grad_b[l].assign(p.biases[l].size(), 0.0);
    }

    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, delta_prev;

    for (const TrainExample& ex : batch) {
        detail::forward_activations(p, ex.state, acts);
        double err = acts.back()[ex.action] - ex.target_q;
        loss += err * err * inv_batch;

        // output layer delta: dL/dz on the chosen action only
        delta.assign(p.output_dim(), 0.0);
        delta[ex.action] = 2.0 * err * inv_batch;

        for (std::size_t l = p.num_layers(); l-- > 0;) {
            int in = p.layer_sizes[l];
            int out = p.layer_sizes[l + 1];
            const std::vector<double>& prev_act = acts[l];
            for (int o = 0; o < out; ++o) {
                double d = delta[o];
                if (d == 0.0) continue;
                grad_b[l][o] += d;
                double* gw = grad_w[l].data() + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) gw[i] += d * prev_act[i];
            }
            if (l == 0) break;
            // propagate through weights, then through the ReLU of layer l
            delta_prev.assign(in, 0.0);
            const double* w = p.weights[l].data();
            for (int o = 0; o < out; ++o) {
                double d = delta[o];
                if (d == 0.0) continue;
                const double* row = w + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) delta_prev[i] += row[i] * d;
            }
            for (int i = 0; i < in; ++i)
                if (acts[l][i] <= 0.0) delta_prev[i] = 0.0;
            delta.swap(delta_prev);
        }
    }

    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        for (std::size_t k = 0; k < p.weights[l].size(); ++k)
            p.weights[l][k] -= learning_rate * grad_w[l][k];
        for (std::size_t k = 0; k < p.biases[l].size(); ++k)
            p.biases[l][k] -= learning_rate * grad_b[l][k];
    }
    return loss;
}

/// Snapshot src into dst (the target-network sync). Shapes must match.
inline void copy_into_target(const MlpParams& src, MlpParams& dst) {
    if (src.layer_sizes != dst.layer_sizes)
        throw std::invalid_argument("cannot copy between networks of different shape");
    dst.weights = src.weights;
    dst.biases = src.biases;
}

inline void to_json(nlohmann::json& j, const MlpParams& p) {
    j = nlohmann::json{{"version", 1},
                       {"kind", "mlp"},
                       {"layer_sizes", p.layer_sizes},
                       {"weights", p.weights},
                       {"biases", p.biases}};
}

inline void from_json(const nlohmann::json& j, MlpParams& p) {
    if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported checkpoint version");
    j.at("layer_sizes").get_to(p.layer_sizes);
    j.at("weights").get_to(p.weights);
    j.at("biases").get_to(p.biases);
    validate_layer_sizes(p.layer_sizes);
    if (p.weights.size() + 1 != p.layer_sizes.size() || p.biases.size() != p.weights.size())
        throw std::invalid_argument("checkpoint layer count mismatch");
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        std::size_t expect_w = static_cast<std::size_t>(p.layer_sizes[l]) * p.layer_sizes[l + 1];
        if (p.weights[l].size() != expect_w ||
            p.biases[l].size() != static_cast<std::size_t>(p.layer_sizes[l + 1]))
            throw std::invalid_argument("checkpoint tensor shape mismatch");
    }
}

inline void save_mlp(const MlpParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << nlohmann::json(p).dump(2) << '\n';
}

inline MlpParams load_mlp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j.get<MlpParams>();
}

/// Order-stable hash over all parameter bytes; used for cheap bitwise
/// equality checks between training runs.
inline std::uint64_t params_hash(const MlpParams& p, std::uint64_t h = 1469598103934665603ull) {
    for (std::size_t l = 0; l < p.num_layers(); ++l) {
        h = fnv1a_bytes(p.weights[l].data(), p.weights[l].size() * sizeof(double), h);
        h = fnv1a_bytes(p.biases[l].data(), p.biases[l].size() * sizeof(double), h);
    }
    return h;
}

}  // namespace offload
