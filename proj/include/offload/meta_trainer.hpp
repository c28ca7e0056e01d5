#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "offload/drl_engine.hpp"
#include "offload/env_model.hpp"
#include "offload/rng.hpp"
#include "offload/workflow_gen.hpp"

namespace offload {

/// Uniform ranges for the environment parameters that vary between
/// training environments; energy densities and the objective weights stay
/// fixed.
struct EnvRanges {
    Range c_local{15.0, 25.0};
    Range c_edge{50.0, 60.0};
    Range c_cloud{160.0, 170.0};
    Range b_device_edge{600.0, 700.0};
    Range b_edge_cloud{100.0, 150.0};
    Range b_device_cloud{20.0, 30.0};
    double d_local = 0.3;
    double d_edge = 0.15;
    double d_cloud = 0.1;
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 1.0;

    void validate() const {
        c_local.validate();
        c_edge.validate();
        c_cloud.validate();
        b_device_edge.validate();
        b_edge_cloud.validate();
        b_device_cloud.validate();
        EnvironmentSpec probe{c_local.lo,       c_edge.lo,  c_cloud.lo, b_device_edge.lo,
                              b_edge_cloud.lo,  b_device_cloud.lo, d_local,    d_edge,
                              d_cloud,          alpha,      beta,       delta};
        probe.validate();
    }

    /// Ranges collapsed onto a single environment (lo == hi everywhere).
    static EnvRanges degenerate(const EnvironmentSpec& e) {
        EnvRanges r;
        r.c_local = {e.c_local, e.c_local};
        r.c_edge = {e.c_edge, e.c_edge};
        r.c_cloud = {e.c_cloud, e.c_cloud};
        r.b_device_edge = {e.b_device_edge, e.b_device_edge};
        r.b_edge_cloud = {e.b_edge_cloud, e.b_edge_cloud};
        r.b_device_cloud = {e.b_device_cloud, e.b_device_cloud};
        r.d_local = e.d_local;
        r.d_edge = e.d_edge;
        r.d_cloud = e.d_cloud;
        r.alpha = e.alpha;
        r.beta = e.beta;
        r.delta = e.delta;
        return r;
    }
};

inline void to_json(nlohmann::json& j, const EnvRanges& r) {
    j = nlohmann::json{{"c_local", r.c_local},
                       {"c_edge", r.c_edge},
                       {"c_cloud", r.c_cloud},
                       {"b_device_edge", r.b_device_edge},
                       {"b_edge_cloud", r.b_edge_cloud},
                       {"b_device_cloud", r.b_device_cloud},
                       {"d_local", r.d_local},
                       {"d_edge", r.d_edge},
                       {"d_cloud", r.d_cloud},
                       {"alpha", r.alpha},
                       {"beta", r.beta},
                       {"delta", r.delta}};
}

inline void from_json(const nlohmann::json& j, EnvRanges& r) {
    r = EnvRanges{};
    j.at("c_local").get_to(r.c_local);
    j.at("c_edge").get_to(r.c_edge);
    j.at("c_cloud").get_to(r.c_cloud);
    j.at("b_device_edge").get_to(r.b_device_edge);
    j.at("b_edge_cloud").get_to(r.b_edge_cloud);
    j.at("b_device_cloud").get_to(r.b_device_cloud);
    r.d_local = j.value("d_local", 0.3);
    r.d_edge = j.value("d_edge", 0.15);
    r.d_cloud = j.value("d_cloud", 0.1);
    r.alpha = j.value("alpha", 1.0);
    r.beta = j.value("beta", 1.0);
    r.delta = j.value("delta", 1.0);
    r.validate();
}

/// Draws one environment, each ranged parameter uniformly and
/// independently (draw order: capacities, then bandwidths).
inline EnvironmentSpec sample_environment(RandomStream& rs, const EnvRanges& ranges) {
    ranges.validate();
    EnvironmentSpec e;
    e.c_local = rs.uniform(ranges.c_local.lo, ranges.c_local.hi);
    e.c_edge = rs.uniform(ranges.c_edge.lo, ranges.c_edge.hi);
    e.c_cloud = rs.uniform(ranges.c_cloud.lo, ranges.c_cloud.hi);
    e.b_device_edge = rs.uniform(ranges.b_device_edge.lo, ranges.b_device_edge.hi);
    e.b_edge_cloud = rs.uniform(ranges.b_edge_cloud.lo, ranges.b_edge_cloud.hi);
    e.b_device_cloud = rs.uniform(ranges.b_device_cloud.lo, ranges.b_device_cloud.hi);
    e.d_local = ranges.d_local;
    e.d_edge = ranges.d_edge;
    e.d_cloud = ranges.d_cloud;
    e.alpha = ranges.alpha;
    e.beta = ranges.beta;
    e.delta = ranges.delta;
    return e;
}

/// Meta-learned initialization: a parameter snapshot to seed the decision
/// engine's units with.
struct MetaParams {
    MlpParams psi;
};

struct RangeEnvSampler final : EnvSampler {
    RangeEnvSampler(RandomStream stream, EnvRanges ranges)
        : stream_(stream), ranges_(std::move(ranges)) {}
    EnvironmentSpec next() override { return sample_environment(stream_, ranges_); }

    RandomStream stream_;
    EnvRanges ranges_;
};

/// Trains a single online/target pair while hopping between randomly
/// drawn environments: a fresh environment before every workflow, and
/// another before every replay training step, under which the sampled
/// transitions' rewards are re-derived from their stored states. The
/// resulting online parameters are the meta-initialization.
///
/// Environment draws come from the dedicated "meta.env" substream and
/// workflows from "workflows", so with ranges collapsed onto one
/// environment the run consumes exactly the same unit/replay streams as a
/// plain single-unit engine and reproduces it bit for bit.
inline MetaParams train_meta(TrainConfig cfg, const EnvRanges& ranges,
                             const GenConfig& workflow_cfg, std::uint64_t seed,
                             long interaction_steps = 10000, TrainingTrace* trace_out = nullptr,
                             long snapshot_every = 0) {
    cfg.units = 1;  // the outer model trains a single network
    cfg.validate();
    ranges.validate();
    workflow_cfg.validate();
    if (interaction_steps < 1) throw std::invalid_argument("interaction_steps must be positive");

    RangeEnvSampler sampler(derive_stream(seed, "meta.env"), ranges);
    Engine engine(cfg, sampler.next(), seed);
    RandomStream workflow_stream = derive_stream(seed, "workflows");

    TrainOptions opts;
    opts.env_sampler = &sampler;
    opts.recompute_rewards = true;
    opts.snapshot_every = snapshot_every;

    while (engine.interaction_steps() < interaction_steps) {
        Workflow w = generate_workflow(workflow_stream, workflow_cfg);
        engine.train_on_workflows(std::span<const Workflow>(&w, 1), opts);
    }
    if (trace_out) *trace_out = engine.trace();
    return MetaParams{engine.units()[0].online};
}

}  // namespace offload
