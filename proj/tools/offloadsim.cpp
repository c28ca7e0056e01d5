// Command-line front end: trains and runs the offloading decision engine,
// the meta-initializer, the baselines and the experiment suites from JSON
// configs, writing CSV results plus a manifest per run.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "offload/baselines.hpp"
#include "offload/csv.hpp"
#include "offload/drl_engine.hpp"
#include "offload/experiments.hpp"
#include "offload/meta_trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string meta_params_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "experiment config (JSON)");
    if (needs_config) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
}

offload::RunConfig load_run_config(const CommonArgs& args) {
    json j = offload::load_json_file(args.config_path);
    offload::RunConfig cfg =
        offload::parse_run_config(j, fs::path(args.config_path).parent_path());
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw offload::CliError("io", "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<offload::Workflow> batch_for(const offload::RunConfig& cfg) {
    offload::RandomStream ws = offload::derive_stream(cfg.seed, "workflows");
    return offload::generate_batch(ws, cfg.gen);
}

int cmd_train(const CommonArgs& args) {
    offload::RunConfig cfg = load_run_config(args);
    std::optional<offload::MlpParams> psi;
    if (!args.meta_params_path.empty()) psi = offload::load_mlp(args.meta_params_path);

    std::vector<offload::Workflow> batch = batch_for(cfg);
    offload::Engine engine(cfg.train, cfg.env, cfg.seed, psi ? &*psi : nullptr);
    for (long e = 0; e < cfg.epochs; ++e) engine.train_on_workflows(batch);

    fs::create_directories(args.out_dir);
    offload::write_trace_csv(engine.trace(), fs::path(args.out_dir) / "trace.csv");
    write_json_file(fs::path(args.out_dir) / "engine.json", engine.checkpoint());
    {
        offload::CsvWriter csv(fs::path(args.out_dir) / "decisions.csv",
                               "workflow,plan,objective,delay_s,energy_j");
        for (std::size_t x = 0; x < batch.size(); ++x) {
            auto [plan, cost] = engine.decide(batch[x]);
            csv.row(static_cast<long>(x), plan.to_string(), cost.objective, cost.total_delay_s,
                    cost.energy_j);
        }
    }
    offload::write_manifest(args.out_dir, cfg.resolved(),
                            {"trace.csv", "engine.json", "decisions.csv"});
    std::cout << "trained " << cfg.epochs << " epochs over " << batch.size()
              << " workflows; results in " << args.out_dir << '\n';
    return 0;
}

int cmd_decide(const CommonArgs& args, const std::string& checkpoint_path,
               const std::string& workflows_path) {
    offload::RunConfig cfg = load_run_config(args);
    json ckpt = offload::load_json_file(checkpoint_path);
    offload::Engine engine = offload::Engine::restore(ckpt, cfg.env);

    std::vector<offload::Workflow> batch;
    if (!workflows_path.empty()) {
        json j = offload::load_json_file(workflows_path);
        try {
            batch = j.at("workflows").get<std::vector<offload::Workflow>>();
        } catch (const std::exception& e) {
            throw offload::CliError("config", std::string("bad workflow file: ") + e.what());
        }
    } else {
        batch = batch_for(cfg);
    }

    fs::create_directories(args.out_dir);
    {
        offload::CsvWriter csv(fs::path(args.out_dir) / "decisions.csv",
                               "workflow,plan,objective,delay_s,energy_j");
        for (std::size_t x = 0; x < batch.size(); ++x) {
            auto [plan, cost] = engine.decide(batch[x]);
            csv.row(static_cast<long>(x), plan.to_string(), cost.objective, cost.total_delay_s,
                    cost.energy_j);
        }
    }
    offload::write_manifest(args.out_dir, cfg.resolved(), {"decisions.csv"});
    std::cout << "decided " << batch.size() << " workflows; results in " << args.out_dir << '\n';
    return 0;
}

int cmd_meta_train(const CommonArgs& args) {
    offload::RunConfig cfg = load_run_config(args);
    offload::TrainingTrace trace;
    offload::MetaParams psi = offload::train_meta(cfg.train, cfg.ranges, cfg.gen, cfg.seed,
                                                  cfg.meta_interaction_steps, &trace);
    fs::create_directories(args.out_dir);
    write_json_file(fs::path(args.out_dir) / "psi.json", json(psi.psi));
    offload::write_trace_csv(trace, fs::path(args.out_dir) / "trace.csv");
    offload::write_manifest(args.out_dir, cfg.resolved(), {"psi.json", "trace.csv"});
    std::cout << "meta-trained for " << cfg.meta_interaction_steps
              << " interaction steps; parameters in " << args.out_dir << "/psi.json\n";
    return 0;
}

int cmd_oracle(const CommonArgs& args) {
    offload::RunConfig cfg = load_run_config(args);
    std::vector<offload::Workflow> batch = batch_for(cfg);
    fs::create_directories(args.out_dir);
    {
        offload::CsvWriter csv(fs::path(args.out_dir) / "oracle.csv", "workflow,plan,objective");
        for (std::size_t x = 0; x < batch.size(); ++x) {
            offload::OracleResult best = offload::dp_optimal(batch[x], cfg.env);
            csv.row(static_cast<long>(x), best.plan.to_string(), best.objective);
        }
    }
    offload::write_manifest(args.out_dir, cfg.resolved(), {"oracle.csv"});
    std::cout << "solved " << batch.size() << " workflows; results in " << args.out_dir << '\n';
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    json j = offload::load_json_file(args.config_path);
    offload::SweepConfig cfg =
        offload::parse_sweep_config(j, fs::path(args.config_path).parent_path());
    if (args.seed) cfg.seeds = {*args.seed};
    offload::SweepResult res = offload::run_convergence_sweep(cfg);
    offload::write_sweep_outputs(cfg, res, args.out_dir);
    std::cout << "swept " << res.cells.size() << " cells; results in " << args.out_dir << '\n';
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    json j = offload::load_json_file(args.config_path);
    offload::ComparisonConfig cfg =
        offload::parse_comparison_config(j, fs::path(args.config_path).parent_path());
    if (args.seed) cfg.seeds = {*args.seed};
    offload::ComparisonResult res = offload::run_scheme_comparison(cfg);
    offload::write_comparison_outputs(cfg, res, args.out_dir);
    std::cout << "compared schemes over " << cfg.deltas.size() << " weights; results in "
              << args.out_dir << '\n';
    return 0;
}

int cmd_meta_study(const CommonArgs& args) {
    json j = offload::load_json_file(args.config_path);
    offload::MetaStudyConfig cfg =
        offload::parse_meta_study_config(j, fs::path(args.config_path).parent_path());
    if (args.seed) cfg.seeds = {*args.seed};
    offload::MetaStudyResult res = offload::run_meta_study(cfg);
    offload::write_meta_outputs(cfg, res, args.out_dir);
    std::cout << "meta study over " << cfg.seeds.size() << " seeds; results in " << args.out_dir
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-offloading decision engine and experiment runner"};
    app.require_subcommand(1);

    CommonArgs train_args, decide_args, meta_args, oracle_args, sweep_args, compare_args,
        study_args;
    std::string checkpoint_path, workflows_path;

    CLI::App* train = app.add_subcommand("train", "train the decision engine on a workflow batch");
    add_common(train, train_args);
    train->add_option("--meta-params", train_args.meta_params_path,
                      "initialize all units from a meta-parameter checkpoint");

    CLI::App* decide = app.add_subcommand("decide", "run decisions from a trained checkpoint");
    add_common(decide, decide_args);
    decide->add_option("--checkpoint", checkpoint_path, "engine checkpoint (engine.json)")
        ->required();
    decide->add_option("--workflows", workflows_path,
                       "JSON workflow file; defaults to the config's generated batch");

    CLI::App* meta = app.add_subcommand("meta-train", "learn initial parameters across environments");
    add_common(meta, meta_args);

    CLI::App* oracle = app.add_subcommand("oracle", "exact optimal plans for the generated batch");
    add_common(oracle, oracle_args);

    CLI::App* sweep = app.add_subcommand("sweep-convergence",
                                         "loss curves across learning rates and batch sizes");
    add_common(sweep, sweep_args);

    CLI::App* compare = app.add_subcommand("compare-schemes",
                                           "fixed plans vs learned schemes vs the exact optimum");
    add_common(compare, compare_args);

    CLI::App* study = app.add_subcommand("meta-study",
                                         "meta vs random initialization in a fresh environment");
    add_common(study, study_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (decide->parsed()) return cmd_decide(decide_args, checkpoint_path, workflows_path);
        if (meta->parsed()) return cmd_meta_train(meta_args);
        if (oracle->parsed()) return cmd_oracle(oracle_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (compare->parsed()) return cmd_compare(compare_args);
        if (study->parsed()) return cmd_meta_study(study_args);
    } catch (const offload::CliError& e) {
        std::cerr << nlohmann::json{{"category", e.category}, {"message", e.what()}}.dump()
                  << '\n';
        return e.category == "config" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"category", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
