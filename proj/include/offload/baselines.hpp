#pragma once

#include <array>
#include <limits>
#include <stdexcept>

#include "offload/env_model.hpp"

namespace offload {

/// Plan that places every task on one fixed tier (local-only, edge-only,
/// cloud-only reference schemes).
inline Plan fixed_plan(const Workflow& w, Tier tier) {
    Plan p;
    p.decisions.assign(w.size(), tier);
    return p;
}

struct OracleResult {
    Plan plan;
    double objective = 0.0;
};

/// Exact optimum by enumerating all 3^N plans. Plans are visited in
/// lexicographic order (task 0 is the most significant digit, Device <
/// Edge < Cloud), and only strictly better objectives replace the
/// incumbent, so ties resolve to the lexicographically smallest plan.
inline OracleResult brute_force_optimal(const Workflow& w, const EnvironmentSpec& env,
                                        int max_tasks = 10) {
    const std::size_t n = w.size();
    if (n > static_cast<std::size_t>(max_tasks))
        throw std::invalid_argument("workflow too long for brute-force enumeration");
    Plan current;
    current.decisions.assign(n, Tier::Device);
    OracleResult best;
    best.objective = std::numeric_limits<double>::infinity();
    while (true) {
        double obj = workflow_cost(w, current, env).objective;
        if (obj < best.objective) {
            best.objective = obj;
            best.plan = current;
        }
        // advance the base-3 counter, least significant digit last
        std::size_t i = n;
        while (i-- > 0) {
            int d = tier_index(current.decisions[i]);
            if (d < kNumTiers - 1) {
                current.decisions[i] = static_cast<Tier>(d + 1);
                break;
            }
            current.decisions[i] = Tier::Device;
            if (i == 0) return best;
        }
    }
}

/// Exact optimum by dynamic programming over (task index, previous tier).
/// The chain structure makes this polynomial: 9 transitions per step.
/// Ties at every choice resolve to the lowest tier index, which yields the
/// same lexicographically-smallest optimal plan as the brute force.
inline OracleResult dp_optimal(const Workflow& w, const EnvironmentSpec& env) {
    const std::size_t n = w.size();
    auto step_cost = [&](std::size_t i, Tier prev, Tier a) {
        double inbound = (i == 0) ? 0.0 : w.flows[i - 1].transfer_mb;
        return local_objective_vec(prev, inbound, w.tasks[i], env)[tier_index(a)];
    };

    // value[i][p]: cost-to-go from task i given task i-1 ran on tier p
    std::vector<std::array<double, kNumTiers>> value(n + 1);
    value[n].fill(0.0);
    for (std::size_t i = n; i-- > 0;) {
        for (int p = 0; p < kNumTiers; ++p) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < kNumTiers; ++a) {
                double c = step_cost(i, static_cast<Tier>(p), static_cast<Tier>(a)) +
                           value[i + 1][a];
                if (c < best) best = c;
            }
            value[i][p] = best;
        }
    }

    OracleResult res;
    res.plan.decisions.reserve(n);
    Tier prev = Tier::Device;  // task 0 has no inbound flow, so this is inert
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        int pick = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < kNumTiers; ++a) {
            double c = step_cost(i, prev, static_cast<Tier>(a)) + value[i + 1][a];
            if (c < best) {
                best = c;
                pick = a;
            }
        }
        total += step_cost(i, prev, static_cast<Tier>(pick));
        prev = static_cast<Tier>(pick);
        res.plan.decisions.push_back(prev);
    }
    res.objective = total;
    return res;
}

}  // namespace offload
