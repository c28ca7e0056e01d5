#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace offload {

/// Execution tier for one task: the IoT device itself, the edge server,
/// or the cloud server.
enum class Tier : int { Device = 0, Edge = 1, Cloud = 2 };

constexpr int kNumTiers = 3;

inline int tier_index(Tier t) { return static_cast<int>(t); }

inline Tier tier_from_int(int i) {
    if (i < 0 || i >= kNumTiers) throw std::invalid_argument("tier index out of range");
    return static_cast<Tier>(i);
}

inline char tier_char(Tier t) { return static_cast<char>('0' + tier_index(t)); }

/// Static description of the three-tier system: compute capacities (MHz),
/// link bandwidths (MB/s), per-MB energy densities (J/MB), the edge/cloud
/// energy weights alpha/beta, and the energy-vs-delay weight delta.
struct EnvironmentSpec {
    double c_local = 30.0;
    double c_edge = 70.0;
    double c_cloud = 150.0;
    double b_device_edge = 800.0;
    double b_edge_cloud = 200.0;
    double b_device_cloud = 10.0;
    double d_local = 0.3;
    double d_edge = 0.15;
    double d_cloud = 0.1;
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 1.0;

    void validate() const {
        const double caps[] = {c_local, c_edge, c_cloud, b_device_edge, b_edge_cloud,
                               b_device_cloud, d_local, d_edge, d_cloud};
        for (double v : caps)
            if (!(v > 0.0)) throw std::invalid_argument("environment capacities, bandwidths and densities must be positive");
        if (!(alpha >= 0.0) || !(beta >= 0.0) || !(delta >= 0.0))
            throw std::invalid_argument("alpha, beta, delta must be nonnegative");
    }
};

inline void to_json(nlohmann::json& j, const EnvironmentSpec& e) {
    j = nlohmann::json{{"c_local", e.c_local},
                       {"c_edge", e.c_edge},
                       {"c_cloud", e.c_cloud},
                       {"b_device_edge", e.b_device_edge},
                       {"b_edge_cloud", e.b_edge_cloud},
                       {"b_device_cloud", e.b_device_cloud},
                       {"d_local", e.d_local},
                       {"d_edge", e.d_edge},
                       {"d_cloud", e.d_cloud},
                       {"alpha", e.alpha},
                       {"beta", e.beta},
                       {"delta", e.delta}};
}

inline void from_json(const nlohmann::json& j, EnvironmentSpec& e) {
    j.at("c_local").get_to(e.c_local);
    j.at("c_edge").get_to(e.c_edge);
    j.at("c_cloud").get_to(e.c_cloud);
    j.at("b_device_edge").get_to(e.b_device_edge);
    j.at("b_edge_cloud").get_to(e.b_edge_cloud);
    j.at("b_device_cloud").get_to(e.b_device_cloud);
    j.at("d_local").get_to(e.d_local);
    j.at("d_edge").get_to(e.d_edge);
    j.at("d_cloud").get_to(e.d_cloud);
    e.alpha = j.value("alpha", 1.0);
    e.beta = j.value("beta", 1.0);
    e.delta = j.value("delta", 1.0);
    e.validate();
}

/// One subtask: how much compute it needs (M-cycles) and how large its
/// payload is (MB). The two are independent quantities; compute drives
/// delay, payload drives energy.
struct Task {
    double compute_demand = 0.0;
    double data_size = 0.0;

    void validate() const {
        if (!(compute_demand > 0.0) || !(data_size > 0.0))
            throw std::invalid_argument("task compute_demand and data_size must be positive");
    }
};

inline void to_json(nlohmann::json& j, const Task& t) {
    j = nlohmann::json{{"compute_demand", t.compute_demand}, {"data_size", t.data_size}};
}

inline void from_json(const nlohmann::json& j, Task& t) {
    j.at("compute_demand").get_to(t.compute_demand);
    j.at("data_size").get_to(t.data_size);
}

/// Data moved between two consecutive tasks (MB).
struct EdgeFlow {
    double transfer_mb = 0.0;
};

/// A linear chain of N dependent tasks with N-1 inter-task flows;
/// flows[k] carries the data from task k to task k+1.
struct Workflow {
    std::vector<Task> tasks;
    std::vector<EdgeFlow> flows;

    std::size_t size() const { return tasks.size(); }

    void validate() const {
        if (tasks.empty()) throw std::invalid_argument("workflow needs at least one task");
        if (flows.size() + 1 != tasks.size())
            throw std::invalid_argument("workflow needs exactly N-1 flows");
        for (const Task& t : tasks) t.validate();
        for (const EdgeFlow& f : flows)
            if (!(f.transfer_mb >= 0.0)) throw std::invalid_argument("flow transfer_mb must be nonnegative");
    }
};

inline void to_json(nlohmann::json& j, const Workflow& w) {
    j = nlohmann::json{{"tasks", w.tasks}, {"flows", nlohmann::json::array()}};
    for (const EdgeFlow& f : w.flows) j["flows"].push_back(f.transfer_mb);
}

inline void from_json(const nlohmann::json& j, Workflow& w) {
    j.at("tasks").get_to(w.tasks);
    w.flows.clear();
    for (const auto& v : j.at("flows")) w.flows.push_back(EdgeFlow{v.get<double>()});
    w.validate();
}

/// Placement of every task of one workflow.
struct Plan {
    std::vector<Tier> decisions;

    std::size_t size() const { return decisions.size(); }
    std::string to_string() const {
        std::string s;
        s.reserve(decisions.size());
        for (Tier t : decisions) s.push_back(tier_char(t));
        return s;
    }
};

/// Cost of executing one workflow under one plan, split into its parts.
struct CostBreakdown {
    double compute_delay_s = 0.0;
    double transmit_delay_s = 0.0;
    double total_delay_s = 0.0;
    double energy_j = 0.0;  // after alpha/beta weighting
    double objective = 0.0; // total_delay_s + delta * energy_j
};

inline double tier_capacity(const EnvironmentSpec& env, Tier t) {
    switch (t) {
        case Tier::Device: return env.c_local;
        case Tier::Edge: return env.c_edge;
        case Tier::Cloud: return env.c_cloud;
    }
    throw std::invalid_argument("bad tier");
}

inline double tier_energy_density(const EnvironmentSpec& env, Tier t) {
    switch (t) {
        case Tier::Device: return env.d_local;
        case Tier::Edge: return env.d_edge;
        case Tier::Cloud: return env.d_cloud;
    }
    throw std::invalid_argument("bad tier");
}

/// Weight applied to a task's energy depending on where it runs:
/// 1 on the device, alpha at the edge, beta in the cloud.
inline double tier_energy_weight(const EnvironmentSpec& env, Tier t) {
    switch (t) {
        case Tier::Device: return 1.0;
        case Tier::Edge: return env.alpha;
        case Tier::Cloud: return env.beta;
    }
    throw std::invalid_argument("bad tier");
}

inline double link_bandwidth(const EnvironmentSpec& env, Tier a, Tier b) {
    if (a == b) throw std::invalid_argument("no link between identical tiers");
    int lo = std::min(tier_index(a), tier_index(b));
    int hi = std::max(tier_index(a), tier_index(b));
    if (lo == 0 && hi == 1) return env.b_device_edge;
    if (lo == 1 && hi == 2) return env.b_edge_cloud;
    return env.b_device_cloud;
}

/// Computational delay of a task on the chosen tier, seconds.
inline double compute_delay(const Task& task, Tier dec, const EnvironmentSpec& env) {
    return task.compute_demand / tier_capacity(env, dec);
}

/// Delay for moving a flow between the tiers of two consecutive tasks,
/// seconds. Zero when both run in the same place; symmetric in direction.
inline double transmission_delay(const EdgeFlow& flow, Tier from, Tier to,
                                 const EnvironmentSpec& env) {
    if (from == to) return 0.0;
    return flow.transfer_mb / link_bandwidth(env, from, to);
}

/// Energy for executing a task on the chosen tier, joules, before the
/// alpha/beta weighting. Transmission energy is not modeled.
inline double task_energy(const Task& task, Tier dec, const EnvironmentSpec& env) {
    return task.data_size * tier_energy_density(env, dec);
}

/// Delay + transmission + weighted-energy cost of one step, for all three
/// candidate placements of the current task. `prev` and `inbound_mb`
/// describe where the previous task ran and how much data it hands over;
/// the first task of a workflow has inbound_mb == 0, which makes the
/// transmission term vanish for every action.
inline std::array<double, kNumTiers> local_objective_vec(Tier prev, double inbound_mb,
                                                         const Task& task,
                                                         const EnvironmentSpec& env) {
    std::array<double, kNumTiers> f{};
    EdgeFlow inbound{inbound_mb};
    for (int a = 0; a < kNumTiers; ++a) {
        Tier action = static_cast<Tier>(a);
        double t_c = compute_delay(task, action, env);
        double t_t = transmission_delay(inbound, prev, action, env);
        double e = tier_energy_weight(env, action) * task_energy(task, action, env);
        f[a] = t_c + t_t + env.delta * e;
    }
    return f;
}

/// Per-step objective F for a single action. `inbound_flow` must be empty
/// exactly for the first task of a workflow.
inline double local_objective_f(Tier prev, const std::optional<EdgeFlow>& inbound_flow,
                                const Task& task, Tier action, const EnvironmentSpec& env) {
    double inbound_mb = inbound_flow ? inbound_flow->transfer_mb : 0.0;
    return local_objective_vec(prev, inbound_mb, task, env)[tier_index(action)];
}

/// Total cost of a workflow under a plan: summed compute delays, summed
/// inter-task transmission delays (nothing is charged after the last
/// task), alpha/beta-weighted energy, and the delta-weighted objective.
inline CostBreakdown workflow_cost(const Workflow& w, const Plan& plan,
                                   const EnvironmentSpec& env) {
    if (plan.size() != w.size())
        throw std::invalid_argument("plan length does not match workflow length");
    CostBreakdown c;
    for (std::size_t i = 0; i < w.size(); ++i) {
        Tier dec = plan.decisions[i];
        c.compute_delay_s += compute_delay(w.tasks[i], dec, env);
        if (i + 1 < w.size())
            c.transmit_delay_s += transmission_delay(w.flows[i], dec, plan.decisions[i + 1], env);
        c.energy_j += tier_energy_weight(env, dec) * task_energy(w.tasks[i], dec, env);
    }
    c.total_delay_s = c.compute_delay_s + c.transmit_delay_s;
    c.objective = c.total_delay_s + env.delta * c.energy_j;
    return c;
}

/// Joint objective over a set of workflows: the sum of per-workflow
/// objectives.
inline double objective_q(std::span<const Workflow> workflows, std::span<const Plan> plans,
                          const EnvironmentSpec& env) {
    if (workflows.size() != plans.size())
        throw std::invalid_argument("workflows and plans must have equal length");
    double q = 0.0;
    for (std::size_t x = 0; x < workflows.size(); ++x)
        q += workflow_cost(workflows[x], plans[x], env).objective;
    return q;
}

}  // namespace offload
