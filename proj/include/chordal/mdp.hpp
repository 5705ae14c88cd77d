#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "chordal/graph.hpp"
#include "chordal/policy.hpp"
#include "chordal/rng.hpp"

namespace chordal {

// The elimination MDP: a state is a Graph, an action is an active vertex,
// the transition eliminates it and the step cost is the fill it inserts.

struct TrajectoryStep {
    std::size_t state_size = 0;
    Vertex action = -1;
    std::size_t step_cost = 0;
    std::optional<double> loss;

    friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::size_t total_cost = 0;

    std::vector<Vertex> ordering() const {
        std::vector<Vertex> out;
        out.reserve(steps.size());
        for (const auto& s : steps) {
            out.push_back(s.action);
        }
        return out;
    }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

inline std::size_t total_cost(const Trajectory& t) {
    std::size_t sum = 0;
    for (const auto& s : t.steps) {
        sum += s.step_cost;
    }
    return sum;
}

/// Appends one step to `t` after eliminating `action` from `state`.
inline void apply_action(Graph& state, Vertex action, Trajectory& t,
                         std::optional<double> loss = std::nullopt) {
    const std::size_t size = state.num_active();
    const std::size_t cost = state.eliminate(action);
    t.steps.push_back({size, action, cost, loss});
    t.total_cost += cost;
}

/// Samples actions from `policy` until every vertex has been eliminated.
inline Trajectory rollout(const Graph& g, const Policy& policy, Rng& rng) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    Graph state = g;
    Trajectory t;
    t.steps.reserve(g.num_active());
    while (!state.empty()) {
        const PolicyDistribution d = policy(state);
        validate_distribution(d, state);
        apply_action(state, sample_action(d, rng), t);
    }
    return t;
}

/// Exact expectation of the one-step fill cost under policy(g).
inline double expected_immediate_cost(const Graph& g, const Policy& policy) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    const PolicyDistribution d = policy(g);
    validate_distribution(d, g);
    double c = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.probs[i] > 0.0) {
            c += d.probs[i] * static_cast<double>(g.fill_if_eliminated(d.labels[i]));
        }
    }
    return c;
}

inline void write_trajectory_csv_header(std::ostream& os) {
    os << "graph_id,step,state_size,action,step_cost\n";
}

inline void write_trajectory_csv(std::ostream& os, const std::string& graph_id,
                                 const Trajectory& t) {
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        os << graph_id << ',' << i << ',' << s.state_size << ',' << s.action << ','
           << s.step_cost << '\n';
    }
}

} // namespace chordal
