#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "offload/meta_trainer.hpp"
#include "test_util.hpp"

using namespace offload;

namespace {
const EnvironmentSpec kTestEnv{};

TrainConfig small_cfg() {
    TrainConfig cfg;
    cfg.units = 1;
    cfg.batch_size = 16;
    cfg.hidden1 = 16;
    cfg.hidden2 = 8;
    cfg.epsilon_decay_steps = 200;
    cfg.memory_capacity = 512;
    return cfg;
}
}  // namespace

TEST_CASE("degenerate ranges sample the unique environment") {
    EnvRanges r = EnvRanges::degenerate(kTestEnv);
    RandomStream rs(1);
    EnvironmentSpec e = sample_environment(rs, r);
    REQUIRE(e.c_local == kTestEnv.c_local);
    REQUIRE(e.c_edge == kTestEnv.c_edge);
    REQUIRE(e.c_cloud == kTestEnv.c_cloud);
    REQUIRE(e.b_device_edge == kTestEnv.b_device_edge);
    REQUIRE(e.b_edge_cloud == kTestEnv.b_edge_cloud);
    REQUIRE(e.b_device_cloud == kTestEnv.b_device_cloud);
}

TEST_CASE("sampled environments stay inside the ranges") {
    EnvRanges r;
    RandomStream rs(2);
    for (int k = 0; k < 10000; ++k) {
        EnvironmentSpec e = sample_environment(rs, r);
        REQUIRE(e.c_local >= r.c_local.lo);
        REQUIRE(e.c_local < r.c_local.hi);
        REQUIRE(e.c_edge >= r.c_edge.lo);
        REQUIRE(e.c_edge < r.c_edge.hi);
        REQUIRE(e.c_cloud >= r.c_cloud.lo);
        REQUIRE(e.c_cloud < r.c_cloud.hi);
        REQUIRE(e.b_device_edge >= r.b_device_edge.lo);
        REQUIRE(e.b_device_edge < r.b_device_edge.hi);
        REQUIRE(e.b_edge_cloud >= r.b_edge_cloud.lo);
        REQUIRE(e.b_edge_cloud < r.b_edge_cloud.hi);
        REQUIRE(e.b_device_cloud >= r.b_device_cloud.lo);
        REQUIRE(e.b_device_cloud < r.b_device_cloud.hi);
        REQUIRE(e.d_local == r.d_local);
    }
}

TEST_CASE("environment sampling is seed-deterministic") {
    EnvRanges r;
    RandomStream a(3), b(3);
    EnvironmentSpec ea = sample_environment(a, r);
    EnvironmentSpec eb = sample_environment(b, r);
    REQUIRE(nlohmann::json(ea).dump() == nlohmann::json(eb).dump());
}

TEST_CASE("range presets parse") {
    std::ifstream in(std::string(OFFLOADSIM_PRESETS_DIR) + "/meta_train_ranges.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    EnvRanges r = j.get<EnvRanges>();
    REQUIRE(r.c_local.lo == 15.0);
    REQUIRE(r.c_local.hi == 25.0);
    REQUIRE(r.b_device_cloud.lo == 20.0);
    REQUIRE(r.b_device_cloud.hi == 30.0);

    nlohmann::json round = r;
    REQUIRE(round.get<EnvRanges>().c_cloud.hi == 170.0);
}

TEST_CASE("collapsed ranges reproduce the plain single-unit engine bit for bit") {
    TrainConfig cfg = small_cfg();
    GenConfig gen;
    const std::uint64_t seed = 17;
    const long budget = 400;  // interaction steps

    TrainingTrace meta_trace;
    MetaParams psi = train_meta(cfg, EnvRanges::degenerate(kTestEnv), gen, seed, budget,
                                &meta_trace, 10);

    Engine inner(cfg, kTestEnv, seed);
    RandomStream ws = derive_stream(seed, "workflows");
    TrainOptions opts;
    opts.snapshot_every = 10;
    while (inner.interaction_steps() < budget) {
        Workflow w = generate_workflow(ws, gen);
        inner.train_on_workflows(std::span<const Workflow>(&w, 1), opts);
    }

    REQUIRE(params_hash(psi.psi) == params_hash(inner.units()[0].online));
    REQUIRE(meta_trace.snapshots.size() == inner.trace().snapshots.size());
    for (std::size_t k = 0; k < meta_trace.snapshots.size(); ++k) {
        REQUIRE(meta_trace.snapshots[k].step == inner.trace().snapshots[k].step);
        REQUIRE(meta_trace.snapshots[k].hash == inner.trace().snapshots[k].hash);
    }
    REQUIRE(meta_trace.rows.size() == inner.trace().rows.size());
    for (std::size_t k = 0; k < meta_trace.rows.size(); ++k)
        REQUIRE(meta_trace.rows[k].loss == inner.trace().rows[k].loss);
}

TEST_CASE("meta training is deterministic per seed") {
    TrainConfig cfg = small_cfg();
    GenConfig gen;
    MetaParams a = train_meta(cfg, EnvRanges{}, gen, 23, 200);
    MetaParams b = train_meta(cfg, EnvRanges{}, gen, 23, 200);
    MetaParams c = train_meta(cfg, EnvRanges{}, gen, 24, 200);
    REQUIRE(params_hash(a.psi) == params_hash(b.psi));
    REQUIRE(params_hash(a.psi) != params_hash(c.psi));
}

TEST_CASE("meta parameters plug into the engine as a pure copy") {
    TrainConfig cfg = small_cfg();
    GenConfig gen;
    MetaParams psi = train_meta(cfg, EnvRanges{}, gen, 29, 200);

    cfg.units = 3;
    Engine engine(cfg, kTestEnv, 31, &psi.psi);
    for (const DnnUnit& u : engine.units()) {
        REQUIRE(params_hash(u.online) == params_hash(psi.psi));
        REQUIRE(params_hash(u.target) == params_hash(psi.psi));
    }

    cfg.unit_init_noise = 1e-3;
    Engine noisy(cfg, kTestEnv, 31, &psi.psi);
    REQUIRE(params_hash(noisy.units()[0].online) != params_hash(psi.psi));
}

TEST_CASE("replay-time environment switches never mutate stored transitions") {
    // sampler alternating between two very different environments
    struct Flipper final : EnvSampler {
        EnvironmentSpec a, b;
        int calls = 0;
        EnvironmentSpec next() override { return (calls++ % 2 == 0) ? a : b; }
    } sampler;
    sampler.a = kTestEnv;
    sampler.b = kTestEnv;
    sampler.b.c_local = 5.0;
    sampler.b.b_device_cloud = 500.0;
    sampler.b.c_cloud = 40.0;

    TrainConfig cfg = small_cfg();
    cfg.train_trigger = 5;
    GenConfig gen;
    RandomStream ws(37);
    Workflow w = generate_workflow(ws, gen);

    Engine engine(cfg, kTestEnv, 41);
    TrainOptions opts;
    opts.env_sampler = &sampler;
    opts.recompute_rewards = true;
    engine.train_on_workflows(std::span<const Workflow>(&w, 1), opts);
    REQUIRE(engine.train_events() == 1);  // five pushes, one replay step

    // every stored reward must be the one computed under the interaction
    // environment (sampler.a), untouched by the replay-time switch to b
    REQUIRE(engine.memory().size() == 5);
    Tier prev = Tier::Device;
    for (std::size_t i = 0; i < 5; ++i) {
        const Transition& tr = engine.memory().at(i);
        double inbound = (i == 0) ? 0.0 : w.flows[i - 1].transfer_mb;
        auto f = local_objective_vec(i == 0 ? Tier::Device : prev, inbound, w.tasks[i], sampler.a);
        REQUIRE(tr.reward == compute_reward(f, tr.action) * cfg.reward_scale);
        prev = static_cast<Tier>(tr.action);
    }
}

TEST_CASE("reward reconstruction from the stored state is exact") {
    TrainConfig cfg = small_cfg();
    GenConfig gen;
    RandomStream ws(43);
    Workflow w = generate_workflow(ws, gen);
    Engine engine(cfg, kTestEnv, 47);
    engine.train_on_workflows(std::span<const Workflow>(&w, 1));
    for (std::size_t i = 0; i < engine.memory().size(); ++i) {
        const Transition& tr = engine.memory().at(i);
        double rebuilt = recompute_reward_from_state(tr, kTestEnv) * cfg.reward_scale;
        REQUIRE(rebuilt == tr.reward);  // bitwise, thanks to power-of-two scaling
    }
}
