#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "offload/env_model.hpp"
#include "offload/neuralnet.hpp"
#include "offload/replay_memory.hpp"
#include "offload/rng.hpp"

namespace offload {

/// Feature scaling constants. Powers of two keep the encoded magnitudes
/// O(1) for the generated workloads while making encode/decode an exact
/// round trip (scaling by 2^k only shifts the exponent), which the
/// meta-trainer relies on when it re-derives rewards from stored states.
constexpr double kComputeScale = 131072.0;  // 2^17 M-cycles
constexpr double kDataScale = 128.0;        // 2^7 MB

/// State dimension for a given maximum chain length: previous action,
/// inbound flow, then per remaining task (compute, data) interleaved with
/// the remaining flows, zero-padded.
inline int state_dim(int max_tasks) { return 3 * max_tasks + 1; }

struct StateVector {
    std::vector<double> values;
};

/// Encodes the state seen when processing task `i` (1-based): the slot
/// layout is [a_{i-1}, e_{i-1,i}, c_i, d_i, e_{i,i+1}, c_{i+1}, d_{i+1},
/// ..., c_N, d_N, 0...]. For i == 1 the first two slots are zero (no task
/// has run yet and nothing flows in), matching the convention that the
/// initial execution position is 0.
inline StateVector build_state(const Workflow& w, std::size_t i, Tier prev_action,
                               int max_tasks) {
    const std::size_t n = w.size();
    if (n > static_cast<std::size_t>(max_tasks))
        throw std::invalid_argument("workflow longer than the configured maximum");
    if (i < 1 || i > n) throw std::out_of_range("task index out of range");

    StateVector s;
    s.values.assign(state_dim(max_tasks), 0.0);
    std::size_t k = 0;
    s.values[k++] = (i == 1) ? 0.0 : static_cast<double>(tier_index(prev_action));
    s.values[k++] = (i == 1) ? 0.0 : w.flows[i - 2].transfer_mb / kDataScale;
    for (std::size_t j = i; j <= n; ++j) {
        s.values[k++] = w.tasks[j - 1].compute_demand / kComputeScale;
        s.values[k++] = w.tasks[j - 1].data_size / kDataScale;
        if (j < n) s.values[k++] = w.flows[j - 1].transfer_mb / kDataScale;
    }
    return s;
}

/// One parallel learner: the online network and its frozen target copy.
struct DnnUnit {
    MlpParams online;
    MlpParams target;
    int steps_since_freeze = 0;
};

inline int argmax3(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline int argmin3(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

/// Epsilon-greedy action choice on the unit's online network. Ties in the
/// greedy branch break toward the lowest action index.
inline int select_action(const DnnUnit& unit, std::span<const double> state, double epsilon,
                         RandomStream& rs) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
    double u = rs.uniform();
    if (u < epsilon) return rs.uniform_int(kNumActions);
    std::vector<double> q = forward(unit.online, state);
    return argmax3(q);
}

/// Reward rule: acting like the per-step optimum earns the (negated) best
/// objective value, anything else is penalized with the (negated) worst.
/// A chosen action whose F ties the minimum counts as optimal.
inline double compute_reward(const std::array<double, kNumTiers>& f_values, int chosen) {
    if (chosen < 0 || chosen >= kNumTiers) throw std::invalid_argument("chosen action out of range");
    double fmin = f_values[0], fmax = f_values[0];
    for (double v : f_values) {
        if (!std::isfinite(v)) throw std::invalid_argument("nonfinite local objective");
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
    }
    return (f_values[chosen] == fmin) ? -fmin : -fmax;
}

/// Bootstrap target: reward plus the discounted best Q of the next state
/// as judged by the frozen network; terminal transitions use the reward
/// alone. Targets are clamped to [-1e9, 0] (rewards are nonpositive, so
/// true Q values are too).
inline double q_target(double reward, std::span<const double> next_state, const DnnUnit& unit,
                       double mu, bool terminal) {
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("discount must be in [0, 1]");
    double t = reward;
    if (!terminal) {
        std::vector<double> q = forward(unit.target, next_state);
        t += mu * *std::max_element(q.begin(), q.end());
    }
    return std::clamp(t, -1e9, 0.0);
}

/// Re-derives the reward of a stored transition under a (possibly new)
/// environment. The first four state slots retain the previous action,
/// inbound flow and the current task's features exactly, so the 3-action
/// objective vector can be reconstructed bit-for-bit.
inline double recompute_reward_from_state(const Transition& tr, const EnvironmentSpec& env) {
    Tier prev = tier_from_int(static_cast<int>(tr.state[0]));
    double inbound_mb = tr.state[1] * kDataScale;
    Task task{tr.state[2] * kComputeScale, tr.state[3] * kDataScale};
    return compute_reward(local_objective_vec(prev, inbound_mb, task, env), tr.action);
}

inline double epsilon_at(const TrainConfig& cfg, long interaction_step) {
    if (interaction_step >= cfg.epsilon_decay_steps) return cfg.epsilon_final;
    double frac = static_cast<double>(interaction_step) / static_cast<double>(cfg.epsilon_decay_steps);
    return cfg.epsilon_initial + (cfg.epsilon_final - cfg.epsilon_initial) * frac;
}

struct TraceRow {
    long step = 0;  // global training-step counter
    int unit = 0;
    double loss = 0.0;
    double epsilon = 0.0;
    int freeze_flag = 0;  // 1 when the target networks were synced after this step
};

struct ParamsSnapshot {
    long step = 0;
    std::uint64_t hash = 0;
};

struct TrainingTrace {
    std::vector<TraceRow> rows;
    std::vector<ParamsSnapshot> snapshots;
};

/// Source of fresh environments for meta training; the engine pulls one
/// before each workflow and one before each replay training step.
struct EnvSampler {
    virtual ~EnvSampler() = default;
    virtual EnvironmentSpec next() = 0;
};

struct TrainOptions {
    EnvSampler* env_sampler = nullptr;
    /// Re-derive each sampled transition's reward from its stored state
    /// under the environment current at replay time.
    bool recompute_rewards = false;
    /// Record an all-parameter hash every this many training steps (0 = off).
    long snapshot_every = 0;
};

/// The decision engine: `units` parallel online/target DNN pairs sharing
/// one replay pool. During training, unit 0's epsilon-greedy action drives
/// the trajectory while every unit proposes and learns; at decision time
/// each unit rolls out greedily and the cheapest resulting plan wins.
///
/// All randomness comes from substreams derived from the master seed
/// ("unit<j>.init", "unit<j>.act", "unit<j>.noise", "replay"), so a run is
/// fully determined by (seed, cfg, env, workflows) — and unit 0 of an
/// s-unit engine evolves identically to a single-unit engine on the same
/// seed.
class Engine {
public:
    Engine(TrainConfig cfg, EnvironmentSpec env, std::uint64_t master_seed,
           const MlpParams* meta_init = nullptr)
        : cfg_(std::move(cfg)),
          env_(env),
          replay_stream_(derive_stream(master_seed, "replay")),
          memory_(cfg_.memory_capacity),
          master_seed_(master_seed) {
        cfg_.validate();
        env_.validate();
        std::vector<int> sizes{state_dim(cfg_.max_tasks), cfg_.hidden1, cfg_.hidden2, kNumActions};
        if (meta_init && meta_init->layer_sizes != sizes)
            throw std::invalid_argument("meta parameters do not match the configured architecture");
        units_.reserve(cfg_.units);
        for (int j = 0; j < cfg_.units; ++j) {
            std::string tag = "unit" + std::to_string(j);
            DnnUnit u;
            if (meta_init) {
                u.online = *meta_init;
                if (cfg_.unit_init_noise > 0.0) {
                    RandomStream noise = derive_stream(master_seed, tag + ".noise");
                    for (auto& layer : u.online.weights)
                        for (double& wv : layer)
                            wv += noise.uniform(-cfg_.unit_init_noise, cfg_.unit_init_noise);
                }
            } else {
                RandomStream init = derive_stream(master_seed, tag + ".init");
                u.online = init_mlp(sizes, init);
            }
            u.target = u.online;
            units_.push_back(std::move(u));
            action_streams_.push_back(derive_stream(master_seed, tag + ".act"));
        }
    }

    const TrainConfig& cfg() const { return cfg_; }
    const EnvironmentSpec& env() const { return env_; }
    void set_env(const EnvironmentSpec& e) {
        e.validate();
        env_ = e;
    }
    const std::vector<DnnUnit>& units() const { return units_; }
    const ReplayMemory& memory() const { return memory_; }
    const TrainingTrace& trace() const { return trace_; }
    void clear_trace() { trace_ = TrainingTrace{}; }
    long interaction_steps() const { return interaction_steps_; }
    long train_events() const { return train_events_; }
    long pushes() const { return pushes_; }
    std::uint64_t master_seed() const { return master_seed_; }

    StateVector make_state(const Workflow& w, std::size_t i, Tier prev) const {
        return build_state(w, i, prev, cfg_.max_tasks);
    }

    std::uint64_t all_params_hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const DnnUnit& u : units_) {
            h = params_hash(u.online, h);
            h = params_hash(u.target, h);
        }
        return h;
    }

    /// Runs the training phase over a batch of workflows: per task, every
    /// unit proposes an action, unit 0's proposal is executed, the reward
    /// is derived from the full 3-action objective vector, and the
    /// transition goes to the shared pool. Every `train_trigger` pushes,
    /// one batch is sampled and every unit regresses toward its own
    /// frozen-network target; target networks sync every
    /// `freeze_interval` training steps.
    void train_on_workflows(std::span<const Workflow> batch, const TrainOptions& opts = {}) {
        for (const Workflow& w : batch) {
            w.validate();
            if (opts.env_sampler) set_env(opts.env_sampler->next());
            const std::size_t n = w.size();
            Tier prev = Tier::Device;
            for (std::size_t i = 1; i <= n; ++i) {
                StateVector s = make_state(w, i, prev);
                double eps = epsilon_at(cfg_, interaction_steps_);
                int executed = 0;
                for (int j = 0; j < cfg_.units; ++j) {
                    int a = select_action(units_[j], s.values, eps, action_streams_[j]);
                    if (j == 0) executed = a;
                }
                double inbound_mb = (i == 1) ? 0.0 : w.flows[i - 2].transfer_mb;
                Tier f_prev = (i == 1) ? Tier::Device : prev;
                auto f = local_objective_vec(f_prev, inbound_mb, w.tasks[i - 1], env_);
                double reward = compute_reward(f, executed) * cfg_.reward_scale;

                Transition tr;
                tr.state = std::move(s.values);
                tr.action = executed;
                tr.reward = reward;
                tr.terminal = (i == n);
                if (tr.terminal)
                    tr.next_state.assign(state_dim(cfg_.max_tasks), 0.0);
                else
                    tr.next_state = make_state(w, i + 1, static_cast<Tier>(executed)).values;
                memory_.push(std::move(tr));
                ++pushes_;
                ++interaction_steps_;
                prev = static_cast<Tier>(executed);

                if (pushes_ % cfg_.train_trigger == 0) replay_train_step(opts);
            }
        }
    }

    /// Decision phase: each unit rolls out its own greedy trajectory; the
    /// plan with the smallest true workflow cost wins (ties go to the
    /// lowest unit index).
    std::pair<Plan, CostBreakdown> decide(const Workflow& w) const {
        w.validate();
        Plan best_plan;
        CostBreakdown best_cost;
        bool have = false;
        for (const DnnUnit& u : units_) {
            Plan candidate = greedy_rollout(u, w);
            CostBreakdown c = workflow_cost(w, candidate, env_);
            if (!have || c.objective < best_cost.objective) {
                best_plan = std::move(candidate);
                best_cost = c;
                have = true;
            }
        }
        return {std::move(best_plan), best_cost};
    }

    Plan greedy_rollout(const DnnUnit& u, const Workflow& w) const {
        Plan plan;
        plan.decisions.reserve(w.size());
        Tier prev = Tier::Device;
        for (std::size_t i = 1; i <= w.size(); ++i) {
            StateVector s = make_state(w, i, prev);
            std::vector<double> q = forward(u.online, s.values);
            prev = static_cast<Tier>(argmax3(q));
            plan.decisions.push_back(prev);
        }
        return plan;
    }

    nlohmann::json checkpoint() const {
        nlohmann::json units = nlohmann::json::array();
        for (const DnnUnit& u : units_)
            units.push_back({{"online", u.online},
                             {"target", u.target},
                             {"steps_since_freeze", u.steps_since_freeze}});
        nlohmann::json streams = nlohmann::json::array();
        for (const RandomStream& s : action_streams_) streams.push_back(s.state());
        return nlohmann::json{{"version", 1},
                              {"kind", "engine"},
                              {"cfg", cfg_},
                              {"master_seed", master_seed_},
                              {"units", units},
                              {"action_streams", streams},
                              {"replay_stream", replay_stream_.state()},
                              {"interaction_steps", interaction_steps_},
                              {"pushes", pushes_},
                              {"train_events", train_events_}};
    }

    static Engine restore(const nlohmann::json& j, const EnvironmentSpec& env) {
        if (j.value("version", 0) != 1 || j.value("kind", "") != "engine")
            throw std::invalid_argument("not an engine checkpoint");
        Engine e(j.at("cfg").get<TrainConfig>(), env, j.at("master_seed").get<std::uint64_t>());
        const auto& units = j.at("units");
        if (units.size() != e.units_.size())
            throw std::invalid_argument("checkpoint unit count mismatch");
        for (std::size_t k = 0; k < e.units_.size(); ++k) {
            units[k].at("online").get_to(e.units_[k].online);
            units[k].at("target").get_to(e.units_[k].target);
            e.units_[k].steps_since_freeze = units[k].at("steps_since_freeze").get<int>();
        }
        for (std::size_t k = 0; k < e.action_streams_.size(); ++k)
            e.action_streams_[k].set_state(j.at("action_streams")[k].get<std::uint64_t>());
        e.replay_stream_.set_state(j.at("replay_stream").get<std::uint64_t>());
        e.interaction_steps_ = j.at("interaction_steps").get<long>();
        e.pushes_ = j.at("pushes").get<long>();
        e.train_events_ = j.at("train_events").get<long>();
        return e;
    }

private:
    void replay_train_step(const TrainOptions& opts) {
        if (memory_.empty()) return;
        if (opts.env_sampler) set_env(opts.env_sampler->next());
        std::vector<const Transition*> batch = memory_.sample(cfg_.batch_size, replay_stream_);
        ++train_events_;
        double eps_now = epsilon_at(cfg_, interaction_steps_);

        std::vector<TrainExample> examples(batch.size());
        for (int j = 0; j < cfg_.units; ++j) {
            DnnUnit& u = units_[j];
            for (std::size_t k = 0; k < batch.size(); ++k) {
                const Transition& tr = *batch[k];
                double r = tr.reward;
                if (opts.recompute_rewards)
                    r = recompute_reward_from_state(tr, env_) * cfg_.reward_scale;
                examples[k] = TrainExample{tr.state, tr.action,
                                           q_target(r, tr.next_state, u, cfg_.discount, tr.terminal)};
            }
            double loss = train_step(u.online, examples, cfg_.learning_rate);
            trace_.rows.push_back(TraceRow{train_events_, j, loss, eps_now, 0});
        }

        bool froze = false;
        for (DnnUnit& u : units_) {
            if (++u.steps_since_freeze >= cfg_.freeze_interval) {
                copy_into_target(u.online, u.target);
                u.steps_since_freeze = 0;
                froze = true;
            }
        }
        if (froze)
            for (std::size_t k = trace_.rows.size() - cfg_.units; k < trace_.rows.size(); ++k)
                trace_.rows[k].freeze_flag = 1;

        if (opts.snapshot_every > 0 && train_events_ % opts.snapshot_every == 0)
            trace_.snapshots.push_back(ParamsSnapshot{train_events_, all_params_hash()});
    }

    TrainConfig cfg_;
    EnvironmentSpec env_;
    std::vector<DnnUnit> units_;
    std::vector<RandomStream> action_streams_;
    RandomStream replay_stream_;
    ReplayMemory memory_;
    TrainingTrace trace_;
    long interaction_steps_ = 0;
    long pushes_ = 0;
    long train_events_ = 0;
    std::uint64_t master_seed_;
};

}  // namespace offload
