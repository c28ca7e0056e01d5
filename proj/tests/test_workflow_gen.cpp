#include <catch2/catch_amalgamated.hpp>

#include "offload/workflow_gen.hpp"

using namespace offload;

TEST_CASE("degenerate ranges force every drawn value") {
    GenConfig cfg;
    cfg.first_task_data_mb = {50.0, 50.0};
    cfg.later_task_data_mb = {10.0, 10.0};
    cfg.compute_demand = {1000.0, 1000.0};
    cfg.tasks_per_workflow = 3;
    RandomStream rs(1);
    Workflow w = generate_workflow(rs, cfg);
    REQUIRE(w.tasks.size() == 3);
    REQUIRE(w.tasks[0].data_size == 50.0);
    REQUIRE(w.tasks[1].data_size == 10.0);
    REQUIRE(w.tasks[2].data_size == 10.0);
    for (const Task& t : w.tasks) REQUIRE(t.compute_demand == 1000.0);
    REQUIRE(w.flows.size() == 2);
    REQUIRE(w.flows[0].transfer_mb == 10.0);
    REQUIRE(w.flows[1].transfer_mb == 10.0);
}

TEST_CASE("same seed reproduces the workflow byte for byte") {
    GenConfig cfg;
    RandomStream a(99), b(99);
    Workflow wa = generate_workflow(a, cfg);
    Workflow wb = generate_workflow(b, cfg);
    REQUIRE(nlohmann::json(wa).dump() == nlohmann::json(wb).dump());
}

TEST_CASE("generated values respect the configured ranges") {
    GenConfig cfg;
    RandomStream rs(3);
    for (int k = 0; k < 10000; ++k) {
        Workflow w = generate_workflow(rs, cfg);
        REQUIRE(w.tasks[0].data_size >= 50.0);
        REQUIRE(w.tasks[0].data_size < 100.0);
        for (std::size_t i = 1; i < w.tasks.size(); ++i) {
            REQUIRE(w.tasks[i].data_size >= 10.0);
            REQUIRE(w.tasks[i].data_size < 50.0);
        }
        for (const Task& t : w.tasks) {
            REQUIRE(t.compute_demand >= 1e3);
            REQUIRE(t.compute_demand < 1e5);
        }
    }
}

TEST_CASE("flows carry the downstream task's payload") {
    GenConfig cfg;
    RandomStream rs(4);
    Workflow w = generate_workflow(rs, cfg);
    for (std::size_t i = 0; i + 1 < w.tasks.size(); ++i)
        REQUIRE(w.flows[i].transfer_mb == w.tasks[i + 1].data_size);
}

TEST_CASE("a batch is users x workflows_per_user") {
    GenConfig cfg;
    RandomStream rs(5);
    REQUIRE(generate_batch(rs, cfg).size() == 20);

    cfg.users = 0;
    RandomStream rs2(5);
    REQUIRE(generate_batch(rs2, cfg).empty());
}

TEST_CASE("distinct seeds give distinct batches") {
    GenConfig cfg;
    int differing = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        RandomStream a(2 * s), b(2 * s + 1);
        Workflow wa = generate_workflow(a, cfg);
        Workflow wb = generate_workflow(b, cfg);
        if (nlohmann::json(wa).dump() != nlohmann::json(wb).dump()) ++differing;
    }
    REQUIRE(differing == 100);
}

TEST_CASE("workflow JSON round trip") {
    GenConfig cfg;
    RandomStream rs(6);
    Workflow w = generate_workflow(rs, cfg);
    nlohmann::json j = w;
    Workflow back = j.get<Workflow>();
    REQUIRE(back.tasks.size() == w.tasks.size());
    for (std::size_t i = 0; i < w.tasks.size(); ++i) {
        REQUIRE(back.tasks[i].compute_demand == w.tasks[i].compute_demand);
        REQUIRE(back.tasks[i].data_size == w.tasks[i].data_size);
    }
    for (std::size_t i = 0; i < w.flows.size(); ++i)
        REQUIRE(back.flows[i].transfer_mb == w.flows[i].transfer_mb);
}

TEST_CASE("invalid generator configs are rejected") {
    GenConfig cfg;
    cfg.tasks_per_workflow = 0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GenConfig{};
    cfg.compute_demand = {100.0, 50.0};
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}
