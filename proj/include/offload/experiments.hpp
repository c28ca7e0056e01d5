#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "offload/baselines.hpp"
#include "offload/csv.hpp"
#include "offload/drl_engine.hpp"
#include "offload/env_model.hpp"
#include "offload/meta_trainer.hpp"
#include "offload/neuralnet.hpp"
#include "offload/workflow_gen.hpp"

namespace offload {

namespace fs = std::filesystem;

/// Error with a machine-readable category ("config", "io"); the CLI maps
/// these onto exit codes and a JSON error report.
struct CliError : std::runtime_error {
    CliError(std::string cat, const std::string& msg)
        : std::runtime_error(msg), category(std::move(cat)) {}
    std::string category;
};

inline nlohmann::json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw CliError("io", "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CliError("config", "invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

/// Reads an object either inline (key) or from a file next to the config
/// (key_file). Returns the fallback when neither is present.
template <typename T>
T resolve_section(const nlohmann::json& cfg, const std::string& key, const fs::path& base_dir,
                  const T& fallback) {
    try {
        if (cfg.contains(key)) return cfg.at(key).get<T>();
        std::string file_key = key + "_file";
        if (cfg.contains(file_key)) {
            fs::path p = cfg.at(file_key).get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            return load_json_file(p).get<T>();
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError("config", "bad '" + key + "' section: " + e.what());
    }
    return fallback;
}

// ---------------------------------------------------------------------------
// Trace metrics shared by the experiment runners and the acceptance suite.
// ---------------------------------------------------------------------------

/// Losses of one unit in training-step order.
inline std::vector<double> unit_losses(const TrainingTrace& trace, int unit) {
    std::vector<double> out;
    for (const TraceRow& r : trace.rows)
        if (r.unit == unit) out.push_back(r.loss);
    return out;
}

inline std::vector<long> freeze_steps(const TrainingTrace& trace, int unit = 0) {
    std::vector<long> out;
    for (const TraceRow& r : trace.rows)
        if (r.unit == unit && r.freeze_flag) out.push_back(r.step);
    return out;
}

/// First 1-based step whose trailing `window`-mean loss is at or below the
/// threshold; -1 when never reached.
inline long steps_to_threshold(const std::vector<double>& losses, double threshold, int window = 10) {
    double acc = 0.0;
    for (std::size_t t = 0; t < losses.size(); ++t) {
        acc += losses[t];
        if (t >= static_cast<std::size_t>(window)) acc -= losses[t - window];
        std::size_t n = std::min<std::size_t>(t + 1, window);
        if (acc / static_cast<double>(n) <= threshold) return static_cast<long>(t + 1);
    }
    return -1;
}

/// Mean over all sliding windows of the in-window standard deviation.
inline double mean_rolling_std(const std::vector<double>& losses, int window = 50) {
    if (losses.size() < static_cast<std::size_t>(window)) return 0.0;
    double sum = 0.0;
    long count = 0;
    for (std::size_t start = 0; start + window <= losses.size(); ++start) {
        double mean = 0.0;
        for (int k = 0; k < window; ++k) mean += losses[start + k];
        mean /= window;
        double var = 0.0;
        for (int k = 0; k < window; ++k) {
            double d = losses[start + k] - mean;
            var += d * d;
        }
        sum += std::sqrt(var / window);
        ++count;
    }
    return sum / static_cast<double>(count);
}

/// Fraction of freeze-interval-long windows whose largest single-step loss
/// increase lands within `tol` steps of a target-network sync. Windows
/// before the first sync are not counted (no sync, no mechanism). Losses
/// are 1-based by training step; sync events are the steps flagged in the
/// trace.
inline double freeze_alignment_fraction(const std::vector<double>& losses,
                                        const std::vector<long>& syncs, int interval,
                                        int tol = 5) {
    const long total = static_cast<long>(losses.size());
    long windows = 0, aligned = 0;
    for (long w0 = interval + 1; w0 + interval - 1 <= total; w0 += interval) {
        long best_t = -1;
        double best_jump = -std::numeric_limits<double>::infinity();
        for (long t = w0; t < w0 + interval; ++t) {
            if (t < 2) continue;
            double jump = losses[t - 1] - losses[t - 2];
            if (jump > best_jump) {
                best_jump = jump;
                best_t = t;
            }
        }
        if (best_t < 0) continue;
        ++windows;
        for (long f : syncs)
            if (std::abs(best_t - f) <= tol) {
                ++aligned;
                break;
            }
    }
    return windows == 0 ? 0.0 : static_cast<double>(aligned) / static_cast<double>(windows);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[v & 0xf];
        v >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

/// Writes manifest.json next to the artifacts: the resolved config, its
/// hash, and the relative artifact paths. No timestamps, so reruns are
/// byte-identical.
inline fs::path write_manifest(const fs::path& out_dir, const nlohmann::json& resolved_config,
                               const std::vector<std::string>& artifacts) {
    nlohmann::json m{{"config", resolved_config},
                     {"config_hash", hex64(fnv1a(resolved_config.dump()))},
                     {"artifacts", artifacts}};
    fs::path p = out_dir / "manifest.json";
    std::ofstream out(p);
    if (!out) throw CliError("io", "cannot write " + p.string());
    out << m.dump(2) << '\n';
    return p;
}

inline void write_trace_csv(const TrainingTrace& trace, const fs::path& path) {
    CsvWriter csv(path, "step,unit,loss,epsilon,freeze_flag");
    for (const TraceRow& r : trace.rows) csv.row(r.step, r.unit, r.loss, r.epsilon, r.freeze_flag);
}

// ---------------------------------------------------------------------------
// Convergence sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
    EnvironmentSpec env;
    GenConfig gen;
    TrainConfig train;  // base settings; the sweep overrides one axis at a time
    std::vector<double> learning_rates{0.1, 0.01, 0.001, 0.0001};
    std::vector<int> batch_sizes{128, 256, 512, 1024};
    long train_steps = 1500;  // budget in training steps per cell
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double loss_threshold_fraction = 0.05;
    int smoothing_window = 10;

    void validate() const {
        env.validate();
        gen.validate();
        train.validate();
        if (learning_rates.empty() && batch_sizes.empty())
            throw CliError("config", "sweep needs at least one learning rate or batch size");
        if (train_steps < 1) throw CliError("config", "train_steps must be positive");
        if (seeds.empty()) throw CliError("config", "sweep needs at least one seed");
        if (!(loss_threshold_fraction > 0.0) || loss_threshold_fraction >= 1.0)
            throw CliError("config", "loss_threshold_fraction must be in (0, 1)");
    }

    nlohmann::json resolved() const {
        return nlohmann::json{{"env", env},
                              {"generator", gen},
                              {"training", train},
                              {"learning_rates", learning_rates},
                              {"batch_sizes", batch_sizes},
                              {"train_steps", train_steps},
                              {"seeds", seeds},
                              {"loss_threshold_fraction", loss_threshold_fraction},
                              {"smoothing_window", smoothing_window}};
    }
};

struct SweepCell {
    std::string axis;  // which knob this cell varies
    double learning_rate = 0.0;
    int batch_size = 0;
    std::uint64_t seed = 0;
    TrainingTrace trace;
    double initial_loss = 0.0;
    long steps_to_thresh = -1;
    double rolling_std = 0.0;
    double freeze_alignment = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

/// Trains one engine on a fixed workflow batch until the training-step
/// budget is spent and computes the per-cell convergence metrics.
inline SweepCell run_sweep_cell(const SweepConfig& cfg, const std::string& axis,
                                const TrainConfig& tc, std::uint64_t seed) {
    SweepCell cell;
    cell.axis = axis;
    cell.learning_rate = tc.learning_rate;
    cell.batch_size = tc.batch_size;
    cell.seed = seed;

    RandomStream wstream = derive_stream(seed, "workflows");
    std::vector<Workflow> batch = generate_batch(wstream, cfg.gen);
    Engine engine(tc, cfg.env, seed);
    while (engine.train_events() < cfg.train_steps)
        engine.train_on_workflows(batch);

    cell.trace = engine.trace();
    std::vector<double> losses = unit_losses(cell.trace, 0);
    if (losses.size() > static_cast<std::size_t>(cfg.train_steps)) losses.resize(cfg.train_steps);
    cell.initial_loss = losses.empty() ? 0.0 : losses.front();
    cell.steps_to_thresh = steps_to_threshold(losses, cfg.loss_threshold_fraction * cell.initial_loss,
                                              cfg.smoothing_window);
    cell.rolling_std = mean_rolling_std(losses);
    cell.freeze_alignment =
        freeze_alignment_fraction(losses, freeze_steps(cell.trace), tc.freeze_interval);
    return cell;
}

inline SweepResult run_convergence_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult res;
    for (double lr : cfg.learning_rates) {
        TrainConfig tc = cfg.train;
        tc.learning_rate = lr;
        for (std::uint64_t seed : cfg.seeds)
            res.cells.push_back(run_sweep_cell(cfg, "learning_rate", tc, seed));
    }
    for (int bs : cfg.batch_sizes) {
        TrainConfig tc = cfg.train;
        tc.batch_size = bs;
        for (std::uint64_t seed : cfg.seeds)
            res.cells.push_back(run_sweep_cell(cfg, "batch_size", tc, seed));
    }
    return res;
}

inline std::vector<std::string> write_sweep_outputs(const SweepConfig& cfg, const SweepResult& res,
                                                    const fs::path& out_dir) {
    fs::create_directories(out_dir);
    {
        CsvWriter csv(out_dir / "convergence.csv",
                      "axis,learning_rate,batch_size,seed,step,unit,loss,epsilon,freeze_flag");
        for (const SweepCell& c : res.cells)
            for (const TraceRow& r : c.trace.rows)
                csv.row(c.axis, c.learning_rate, c.batch_size, c.seed, r.step, r.unit, r.loss,
                        r.epsilon, r.freeze_flag);
    }
    {
        CsvWriter csv(out_dir / "convergence_summary.csv",
                      "axis,learning_rate,batch_size,seed,initial_loss,steps_to_threshold,"
                      "rolling_std,freeze_alignment");
        for (const SweepCell& c : res.cells)
            csv.row(c.axis, c.learning_rate, c.batch_size, c.seed, c.initial_loss,
                    c.steps_to_thresh, c.rolling_std, c.freeze_alignment);
    }
    std::vector<std::string> artifacts{"convergence.csv", "convergence_summary.csv"};
    write_manifest(out_dir, cfg.resolved(), artifacts);
    return artifacts;
}

// ---------------------------------------------------------------------------
// Scheme comparison
// ---------------------------------------------------------------------------

struct ComparisonConfig {
    EnvironmentSpec env;
    GenConfig gen;
    TrainConfig train;  // `units` is the ensemble width; the dqn arm forces 1
    std::vector<double> deltas{0.0, 0.25, 0.5, 1.0, 2.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    long epochs = 80;

    void validate() const {
        env.validate();
        gen.validate();
        train.validate();
        if (deltas.empty() || seeds.empty()) throw CliError("config", "deltas and seeds must be nonempty");
        for (double d : deltas)
            if (d < 0.0) throw CliError("config", "delta must be nonnegative");
        if (epochs < 1) throw CliError("config", "epochs must be positive");
    }

    nlohmann::json resolved() const {
        return nlohmann::json{{"env", env},      {"generator", gen}, {"training", train},
                              {"deltas", deltas}, {"seeds", seeds},   {"epochs", epochs}};
    }
};

struct ComparisonRow {
    std::string scheme;
    double delta = 0.0;
    std::uint64_t seed = 0;
    double objective = 0.0;  // mean over the workflow batch
};

struct ComparisonResult {
    std::vector<ComparisonRow> rows;

    double mean_objective(const std::string& scheme, double delta) const {
        double sum = 0.0;
        long n = 0;
        for (const ComparisonRow& r : rows)
            if (r.scheme == scheme && r.delta == delta) {
                sum += r.objective;
                ++n;
            }
        return n ? sum / n : 0.0;
    }
};

inline double mean_fixed_objective(const std::vector<Workflow>& batch, Tier tier,
                                   const EnvironmentSpec& env) {
    double sum = 0.0;
    for (const Workflow& w : batch) sum += workflow_cost(w, fixed_plan(w, tier), env).objective;
    return sum / static_cast<double>(batch.size());
}

inline double mean_decide_objective(const Engine& engine, const std::vector<Workflow>& batch) {
    double sum = 0.0;
    for (const Workflow& w : batch) sum += engine.decide(w).second.objective;
    return sum / static_cast<double>(batch.size());
}

inline ComparisonResult run_scheme_comparison(const ComparisonConfig& cfg) {
    cfg.validate();
    ComparisonResult res;
    for (double delta : cfg.deltas) {
        EnvironmentSpec env = cfg.env;
        env.delta = delta;
        for (std::uint64_t seed : cfg.seeds) {
            RandomStream wstream = derive_stream(seed, "workflows");
            std::vector<Workflow> batch = generate_batch(wstream, cfg.gen);

            auto add = [&](const std::string& scheme, double obj) {
                res.rows.push_back(ComparisonRow{scheme, delta, seed, obj});
            };
            add("local", mean_fixed_objective(batch, Tier::Device, env));
            add("edge", mean_fixed_objective(batch, Tier::Edge, env));
            add("cloud", mean_fixed_objective(batch, Tier::Cloud, env));

            double oracle_sum = 0.0;
            for (const Workflow& w : batch) oracle_sum += dp_optimal(w, env).objective;
            add("oracle", oracle_sum / static_cast<double>(batch.size()));

            TrainConfig dqn_cfg = cfg.train;
            dqn_cfg.units = 1;
            Engine dqn(dqn_cfg, env, seed);
            for (long e = 0; e < cfg.epochs; ++e) dqn.train_on_workflows(batch);
            add("dqn", mean_decide_objective(dqn, batch));

            Engine ensemble(cfg.train, env, seed);
            for (long e = 0; e < cfg.epochs; ++e) ensemble.train_on_workflows(batch);
            add("ensemble", mean_decide_objective(ensemble, batch));
        }
    }
    return res;
}

inline std::vector<std::string> write_comparison_outputs(const ComparisonConfig& cfg,
                                                         const ComparisonResult& res,
                                                         const fs::path& out_dir) {
    fs::create_directories(out_dir);
    {
        CsvWriter csv(out_dir / "schemes.csv", "scheme,delta,seed,objective");
        for (const ComparisonRow& r : res.rows) csv.row(r.scheme, r.delta, r.seed, r.objective);
    }
    {
        // per (scheme, delta): mean and median over seeds
        CsvWriter csv(out_dir / "schemes_summary.csv", "scheme,delta,mean_objective,median_objective");
        std::map<std::pair<std::string, double>, std::vector<double>> groups;
        for (const ComparisonRow& r : res.rows) groups[{r.scheme, r.delta}].push_back(r.objective);
        for (auto& [key, vals] : groups) {
            std::sort(vals.begin(), vals.end());
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double median = vals.size() % 2 ? vals[vals.size() / 2]
                                            : 0.5 * (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]);
            csv.row(key.first, key.second, mean, median);
        }
    }
    std::vector<std::string> artifacts{"schemes.csv", "schemes_summary.csv"};
    write_manifest(out_dir, cfg.resolved(), artifacts);
    return artifacts;
}

// ---------------------------------------------------------------------------
// Meta study
// ---------------------------------------------------------------------------

struct MetaStudyConfig {
    EnvironmentSpec test_env;
    EnvRanges train_ranges;
    GenConfig gen;
    TrainConfig train;  // adaptation settings; forced to a single unit
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    long rounds = 80;
    long meta_interaction_steps = 10000;
    double loss_threshold_fraction = 0.05;
    int smoothing_window = 10;

    void validate() const {
        test_env.validate();
        train_ranges.validate();
        gen.validate();
        train.validate();
        if (seeds.empty()) throw CliError("config", "meta study needs seeds");
        if (rounds < 1 || meta_interaction_steps < 1)
            throw CliError("config", "rounds and meta_interaction_steps must be positive");
        if (!(loss_threshold_fraction > 0.0) || loss_threshold_fraction >= 1.0)
            throw CliError("config", "loss_threshold_fraction must be in (0, 1)");
    }

    nlohmann::json resolved() const {
        return nlohmann::json{{"test_env", test_env},
                              {"train_ranges", train_ranges},
                              {"generator", gen},
                              {"training", train},
                              {"seeds", seeds},
                              {"rounds", rounds},
                              {"meta_interaction_steps", meta_interaction_steps},
                              {"loss_threshold_fraction", loss_threshold_fraction},
                              {"smoothing_window", smoothing_window}};
    }
};

struct MetaArm {
    std::string arm;  // "meta" or "random"
    std::uint64_t seed = 0;
    std::vector<double> losses;       // unit-0 loss per training step
    std::vector<double> round_costs;  // mean decision cost after each round
    double initial_loss = 0.0;
    long steps_to_thresh = -1;
};

struct MetaStudyResult {
    std::vector<MetaArm> arms;
    std::vector<double> thresholds;  // per seed, shared by both arms

    const MetaArm& find(const std::string& arm, std::uint64_t seed) const {
        for (const MetaArm& a : arms)
            if (a.arm == arm && a.seed == seed) return a;
        throw std::logic_error("missing meta-study arm");
    }
};

/// Adaptation run in the test environment: train `rounds` passes over the
/// batch, recording the loss trace and the post-round mean decision cost.
inline MetaArm run_adaptation(const std::string& name, const TrainConfig& tc,
                              const EnvironmentSpec& env, const std::vector<Workflow>& batch,
                              std::uint64_t seed, long rounds, const MlpParams* psi) {
    MetaArm arm;
    arm.arm = name;
    arm.seed = seed;
    Engine engine(tc, env, seed, psi);
    arm.round_costs.reserve(rounds);
    for (long r = 0; r < rounds; ++r) {
        engine.train_on_workflows(batch);
        arm.round_costs.push_back(mean_decide_objective(engine, batch));
    }
    arm.losses = unit_losses(engine.trace(), 0);
    arm.initial_loss = arm.losses.empty() ? 0.0 : arm.losses.front();
    return arm;
}

inline MetaStudyResult run_meta_study(const MetaStudyConfig& cfg) {
    cfg.validate();
    MetaStudyResult res;
    TrainConfig tc = cfg.train;
    tc.units = 1;
    for (std::uint64_t seed : cfg.seeds) {
        std::uint64_t meta_seed = derive_stream(seed, "meta").state();
        MetaParams psi = train_meta(tc, cfg.train_ranges, cfg.gen, meta_seed,
                                    cfg.meta_interaction_steps);

        RandomStream wstream = derive_stream(seed, "workflows");
        std::vector<Workflow> batch = generate_batch(wstream, cfg.gen);

        MetaArm random_arm =
            run_adaptation("random", tc, cfg.test_env, batch, seed, cfg.rounds, nullptr);
        MetaArm meta_arm =
            run_adaptation("meta", tc, cfg.test_env, batch, seed, cfg.rounds, &psi.psi);

        double threshold = cfg.loss_threshold_fraction * random_arm.initial_loss;
        random_arm.steps_to_thresh =
            steps_to_threshold(random_arm.losses, threshold, cfg.smoothing_window);
        meta_arm.steps_to_thresh =
            steps_to_threshold(meta_arm.losses, threshold, cfg.smoothing_window);
        res.thresholds.push_back(threshold);
        res.arms.push_back(std::move(random_arm));
        res.arms.push_back(std::move(meta_arm));
    }
    return res;
}

inline std::vector<std::string> write_meta_outputs(const MetaStudyConfig& cfg,
                                                   const MetaStudyResult& res,
                                                   const fs::path& out_dir) {
    fs::create_directories(out_dir);
    {
        CsvWriter csv(out_dir / "meta_loss.csv", "arm,seed,step,loss");
        for (const MetaArm& a : res.arms)
            for (std::size_t t = 0; t < a.losses.size(); ++t)
                csv.row(a.arm, a.seed, static_cast<long>(t + 1), a.losses[t]);
    }
    {
        CsvWriter csv(out_dir / "meta_cost.csv", "arm,seed,round,mean_cost");
        for (const MetaArm& a : res.arms)
            for (std::size_t r = 0; r < a.round_costs.size(); ++r)
                csv.row(a.arm, a.seed, static_cast<long>(r + 1), a.round_costs[r]);
    }
    {
        CsvWriter csv(out_dir / "meta_summary.csv",
                      "seed,threshold,random_initial_loss,meta_initial_loss,"
                      "random_steps_to_threshold,meta_steps_to_threshold");
        for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
            const MetaArm& rnd = res.find("random", cfg.seeds[k]);
            const MetaArm& meta = res.find("meta", cfg.seeds[k]);
            csv.row(cfg.seeds[k], res.thresholds[k], rnd.initial_loss, meta.initial_loss,
                    rnd.steps_to_thresh, meta.steps_to_thresh);
        }
    }
    std::vector<std::string> artifacts{"meta_loss.csv", "meta_cost.csv", "meta_summary.csv"};
    write_manifest(out_dir, cfg.resolved(), artifacts);
    return artifacts;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// ---------------------------------------------------------------------------
// Config parsing (shared by the CLI and the tests)
// ---------------------------------------------------------------------------

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& field) {
    try {
        if (j.contains(key)) j.at(key).get_to(field);
    } catch (const std::exception& e) {
        throw CliError("config", std::string("bad '") + key + "': " + e.what());
    }
}

/// Settings for the train / decide / oracle / meta-train subcommands.
struct RunConfig {
    EnvironmentSpec env;
    GenConfig gen;
    TrainConfig train;
    long epochs = 80;
    std::uint64_t seed = 1;
    EnvRanges ranges;  // meta-train only
    long meta_interaction_steps = 10000;

    nlohmann::json resolved() const {
        return nlohmann::json{{"env", env},
                              {"generator", gen},
                              {"training", train},
                              {"epochs", epochs},
                              {"seed", seed},
                              {"train_ranges", ranges},
                              {"meta_interaction_steps", meta_interaction_steps}};
    }
};

inline RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
    RunConfig c;
    c.env = resolve_section(j, "env", base_dir, EnvironmentSpec{});
    c.gen = resolve_section(j, "generator", base_dir, GenConfig{});
    c.train = resolve_section(j, "training", base_dir, TrainConfig{});
    c.ranges = resolve_section(j, "train_ranges", base_dir, EnvRanges{});
    read_opt(j, "epochs", c.epochs);
    read_opt(j, "seed", c.seed);
    read_opt(j, "meta_interaction_steps", c.meta_interaction_steps);
    if (c.epochs < 1 || c.meta_interaction_steps < 1)
        throw CliError("config", "epochs and meta_interaction_steps must be positive");
    try {
        c.env.validate();
        c.gen.validate();
        c.train.validate();
        c.ranges.validate();
    } catch (const std::exception& e) {
        throw CliError("config", e.what());
    }
    return c;
}

inline SweepConfig parse_sweep_config(const nlohmann::json& j, const fs::path& base_dir) {
    SweepConfig c;
    c.env = resolve_section(j, "env", base_dir, EnvironmentSpec{});
    c.gen = resolve_section(j, "generator", base_dir, GenConfig{});
    c.train = resolve_section(j, "training", base_dir, TrainConfig{});
    read_opt(j, "learning_rates", c.learning_rates);
    read_opt(j, "batch_sizes", c.batch_sizes);
    read_opt(j, "train_steps", c.train_steps);
    read_opt(j, "seeds", c.seeds);
    read_opt(j, "loss_threshold_fraction", c.loss_threshold_fraction);
    read_opt(j, "smoothing_window", c.smoothing_window);
    try {
        c.validate();
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError("config", e.what());
    }
    return c;
}

inline ComparisonConfig parse_comparison_config(const nlohmann::json& j, const fs::path& base_dir) {
    ComparisonConfig c;
    c.env = resolve_section(j, "env", base_dir, EnvironmentSpec{});
    c.gen = resolve_section(j, "generator", base_dir, GenConfig{});
    c.train = resolve_section(j, "training", base_dir, TrainConfig{});
    read_opt(j, "deltas", c.deltas);
    read_opt(j, "seeds", c.seeds);
    read_opt(j, "epochs", c.epochs);
    try {
        c.validate();
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError("config", e.what());
    }
    return c;
}

inline MetaStudyConfig parse_meta_study_config(const nlohmann::json& j, const fs::path& base_dir) {
    MetaStudyConfig c;
    c.test_env = resolve_section(j, "test_env", base_dir, EnvironmentSpec{});
    c.train_ranges = resolve_section(j, "train_ranges", base_dir, EnvRanges{});
    c.gen = resolve_section(j, "generator", base_dir, GenConfig{});
    c.train = resolve_section(j, "training", base_dir, TrainConfig{});
    read_opt(j, "seeds", c.seeds);
    read_opt(j, "rounds", c.rounds);
    read_opt(j, "meta_interaction_steps", c.meta_interaction_steps);
    read_opt(j, "loss_threshold_fraction", c.loss_threshold_fraction);
    read_opt(j, "smoothing_window", c.smoothing_window);
    try {
        c.validate();
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        throw CliError("config", e.what());
    }
    return c;
}

}  // namespace offload
