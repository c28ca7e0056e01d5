#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "offload/experiments.hpp"
#include "test_util.hpp"

using namespace offload;
using testutil::temp_dir;

namespace {

TrainConfig tiny_train() {
    TrainConfig cfg;
    cfg.units = 1;
    cfg.batch_size = 16;
    cfg.hidden1 = 16;
    cfg.hidden2 = 8;
    cfg.epsilon_decay_steps = 100;
    cfg.memory_capacity = 256;
    cfg.freeze_interval = 20;
    return cfg;
}

GenConfig tiny_gen() {
    GenConfig gen;
    gen.users = 2;
    gen.workflows_per_user = 2;
    gen.tasks_per_workflow = 4;
    return gen;
}

}  // namespace

TEST_CASE("steps_to_threshold finds the first smoothed crossing") {
    std::vector<double> losses{10, 10, 10, 10, 1, 1, 1, 1, 1, 1};
    REQUIRE(steps_to_threshold(losses, 1.5, 2) == 6);  // mean of (1,1) at step 6
    REQUIRE(steps_to_threshold(losses, 0.5, 2) == -1);
    REQUIRE(steps_to_threshold(losses, 20.0, 2) == 1);
}

TEST_CASE("rolling std is zero for constants and positive for noise") {
    std::vector<double> flat(200, 3.0);
    REQUIRE(mean_rolling_std(flat) == 0.0);
    std::vector<double> wiggly;
    for (int i = 0; i < 200; ++i) wiggly.push_back(i % 2 ? 1.0 : -1.0);
    REQUIRE(mean_rolling_std(wiggly) > 0.5);
}

TEST_CASE("freeze alignment detects spikes at sync boundaries") {
    const int interval = 50;
    std::vector<double> losses(400, 1.0);
    std::vector<long> syncs{50, 100, 150, 200, 250, 300, 350, 400};
    for (long f : syncs) {
        std::size_t idx = static_cast<std::size_t>(f);  // step f+1, 0-based index f
        if (idx < losses.size()) losses[idx] = 5.0;
    }
    REQUIRE(freeze_alignment_fraction(losses, syncs, interval) == 1.0);

    // spikes far from syncs are not aligned
    std::vector<double> off(400, 1.0);
    for (std::size_t i = 75; i < off.size(); i += 50) off[i] = 5.0;
    REQUIRE(freeze_alignment_fraction(off, syncs, interval) == 0.0);
}

TEST_CASE("median helper") {
    REQUIRE(median({3.0, 1.0, 2.0}) == 2.0);
    REQUIRE(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    REQUIRE(median({}) == 0.0);
}

TEST_CASE("convergence sweep produces per-cell traces and metrics") {
    SweepConfig cfg;
    cfg.gen = tiny_gen();
    cfg.train = tiny_train();
    cfg.learning_rates = {0.01};
    cfg.batch_sizes = {16};
    cfg.train_steps = 60;
    cfg.seeds = {1, 2};

    SweepResult res = run_convergence_sweep(cfg);
    REQUIRE(res.cells.size() == 4);  // 1 lr x 2 seeds + 1 batch x 2 seeds
    for (const SweepCell& c : res.cells) {
        REQUIRE(!c.trace.rows.empty());
        REQUIRE(c.initial_loss > 0.0);
    }
}

TEST_CASE("sweep outputs are byte-identical across reruns") {
    SweepConfig cfg;
    cfg.gen = tiny_gen();
    cfg.train = tiny_train();
    cfg.learning_rates = {0.01};
    cfg.batch_sizes = {};
    cfg.train_steps = 40;
    cfg.seeds = {3};

    auto dir_a = temp_dir("sweep_a");
    auto dir_b = temp_dir("sweep_b");
    write_sweep_outputs(cfg, run_convergence_sweep(cfg), dir_a);
    write_sweep_outputs(cfg, run_convergence_sweep(cfg), dir_b);
    for (const char* name : {"convergence.csv", "convergence_summary.csv", "manifest.json"})
        REQUIRE(read_file_bytes(dir_a / name) == read_file_bytes(dir_b / name));
}

TEST_CASE("scheme comparison covers every scheme and respects the oracle") {
    ComparisonConfig cfg;
    cfg.gen = tiny_gen();
    cfg.train = tiny_train();
    cfg.deltas = {0.0, 1.0};
    cfg.seeds = {1};
    cfg.epochs = 3;

    ComparisonResult res = run_scheme_comparison(cfg);
    REQUIRE(res.rows.size() == 2 * 6);
    for (double delta : cfg.deltas) {
        double oracle = res.mean_objective("oracle", delta);
        for (const char* scheme : {"local", "edge", "cloud", "dqn", "ensemble"})
            REQUIRE(oracle <= res.mean_objective(scheme, delta) + 1e-9);
        // the ensemble can never lose to its own unit 0
        REQUIRE(res.mean_objective("ensemble", delta) <=
                res.mean_objective("dqn", delta) + 1e-9);
    }

    auto dir = temp_dir("schemes");
    write_comparison_outputs(cfg, res, dir);
    std::ifstream csv(dir / "schemes.csv");
    std::string header;
    std::getline(csv, header);
    REQUIRE(header == "scheme,delta,seed,objective");
}

TEST_CASE("meta study pairs arms per seed and writes the three CSVs") {
    MetaStudyConfig cfg;
    cfg.gen = tiny_gen();
    cfg.train = tiny_train();
    cfg.seeds = {1};
    cfg.rounds = 4;
    cfg.meta_interaction_steps = 200;

    MetaStudyResult res = run_meta_study(cfg);
    REQUIRE(res.arms.size() == 2);
    const MetaArm& rnd = res.find("random", 1);
    const MetaArm& meta = res.find("meta", 1);
    REQUIRE(rnd.round_costs.size() == 4);
    REQUIRE(meta.round_costs.size() == 4);
    REQUIRE(!rnd.losses.empty());
    REQUIRE(res.thresholds.size() == 1);

    auto dir = temp_dir("meta_study");
    write_meta_outputs(cfg, res, dir);
    for (const char* name : {"meta_loss.csv", "meta_cost.csv", "meta_summary.csv", "manifest.json"})
        REQUIRE(std::filesystem::exists(dir / name));
}

TEST_CASE("manifest embeds the resolved config and a stable hash") {
    SweepConfig cfg;
    cfg.gen = tiny_gen();
    cfg.train = tiny_train();
    cfg.learning_rates = {0.01};
    cfg.batch_sizes = {};
    cfg.train_steps = 10;
    cfg.seeds = {1};

    auto dir = temp_dir("manifest");
    write_sweep_outputs(cfg, run_convergence_sweep(cfg), dir);
    std::ifstream in(dir / "manifest.json");
    nlohmann::json m;
    in >> m;
    REQUIRE(m.contains("config"));
    REQUIRE(m.at("config").at("seeds") == nlohmann::json(cfg.seeds));
    REQUIRE(m.at("config_hash").get<std::string>().size() == 16);
    REQUIRE(m.at("artifacts").size() == 2);
}

TEST_CASE("config parsing validates and fills defaults") {
    nlohmann::json j{{"training", {{"learning_rate", 0.05}}}, {"seeds", {1, 2}}};
    SweepConfig cfg = parse_sweep_config(j, ".");
    REQUIRE(cfg.train.learning_rate == 0.05);
    REQUIRE(cfg.train.batch_size == 128);
    REQUIRE(cfg.seeds == std::vector<std::uint64_t>{1, 2});

    nlohmann::json bad{{"training", {{"learning_rate", -1.0}}}};
    REQUIRE_THROWS_AS(parse_sweep_config(bad, "."), CliError);

    nlohmann::json bad2{{"loss_threshold_fraction", 2.0}};
    try {
        parse_sweep_config(bad2, ".");
        FAIL("expected CliError");
    } catch (const CliError& e) {
        REQUIRE(e.category == "config");
    }
}
