#pragma once

#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "offload/env_model.hpp"
#include "offload/rng.hpp"

namespace offload {

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    void validate() const {
        if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("range must satisfy 0 < lo <= hi");
    }
};

inline void to_json(nlohmann::json& j, const Range& r) { j = nlohmann::json::array({r.lo, r.hi}); }

inline void from_json(const nlohmann::json& j, Range& r) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("range must be a [lo, hi] pair");
    r.lo = j[0].get<double>();
    r.hi = j[1].get<double>();
}

/// Workflow generator settings. Defaults follow the simulated workload:
/// the first task of a workflow carries a large payload (50-100 MB),
/// later tasks 10-50 MB, and compute demand spans 1e3-1e5 M-cycles.
struct GenConfig {
    Range first_task_data_mb{50.0, 100.0};
    Range later_task_data_mb{10.0, 50.0};
    Range compute_demand{1e3, 1e5};
    int tasks_per_workflow = 5;
    int workflows_per_user = 5;
    int users = 4;

    void validate() const {
        first_task_data_mb.validate();
        later_task_data_mb.validate();
        compute_demand.validate();
        if (tasks_per_workflow < 1) throw std::invalid_argument("tasks_per_workflow must be >= 1");
        if (workflows_per_user < 0 || users < 0)
            throw std::invalid_argument("workflow counts must be nonnegative");
    }
};

inline void to_json(nlohmann::json& j, const GenConfig& c) {
    j = nlohmann::json{{"first_task_data_mb", c.first_task_data_mb},
                       {"later_task_data_mb", c.later_task_data_mb},
                       {"compute_demand", c.compute_demand},
                       {"tasks_per_workflow", c.tasks_per_workflow},
                       {"workflows_per_user", c.workflows_per_user},
                       {"users", c.users}};
}

inline void from_json(const nlohmann::json& j, GenConfig& c) {
    c = GenConfig{};
    if (j.contains("first_task_data_mb")) j.at("first_task_data_mb").get_to(c.first_task_data_mb);
    if (j.contains("later_task_data_mb")) j.at("later_task_data_mb").get_to(c.later_task_data_mb);
    if (j.contains("compute_demand")) j.at("compute_demand").get_to(c.compute_demand);
    if (j.contains("tasks_per_workflow")) j.at("tasks_per_workflow").get_to(c.tasks_per_workflow);
    if (j.contains("workflows_per_user")) j.at("workflows_per_user").get_to(c.workflows_per_user);
    if (j.contains("users")) j.at("users").get_to(c.users);
    c.validate();
}

/// Draws one random workflow. Per task, data size is drawn first and
/// compute demand second (the draw order is part of the reproducibility
/// contract). Each inter-task flow carries exactly the downstream task's
/// payload: what must move is the data the next task works on.
inline Workflow generate_workflow(RandomStream& rs, const GenConfig& cfg) {
    cfg.validate();
    Workflow w;
    w.tasks.reserve(cfg.tasks_per_workflow);
    for (int i = 0; i < cfg.tasks_per_workflow; ++i) {
        const Range& r = (i == 0) ? cfg.first_task_data_mb : cfg.later_task_data_mb;
        Task t;
        t.data_size = rs.uniform(r.lo, r.hi);
        t.compute_demand = rs.uniform(cfg.compute_demand.lo, cfg.compute_demand.hi);
        w.tasks.push_back(t);
    }
    w.flows.reserve(cfg.tasks_per_workflow - 1);
    for (int i = 0; i + 1 < cfg.tasks_per_workflow; ++i)
        w.flows.push_back(EdgeFlow{w.tasks[i + 1].data_size});
    return w;
}

/// Draws users * workflows_per_user workflows from one stream.
inline std::vector<Workflow> generate_batch(RandomStream& rs, const GenConfig& cfg) {
    cfg.validate();
    std::vector<Workflow> batch;
    batch.reserve(static_cast<std::size_t>(cfg.users) * cfg.workflows_per_user);
    for (int u = 0; u < cfg.users; ++u)
        for (int k = 0; k < cfg.workflows_per_user; ++k) batch.push_back(generate_workflow(rs, cfg));
    return batch;
}

}  // namespace offload
