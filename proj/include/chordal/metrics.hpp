#pragma once

#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chordal/errors.hpp"
#include "chordal/format.hpp"
#include "chordal/gnn.hpp"
#include "chordal/graph.hpp"
#include "chordal/mdp.hpp"
#include "chordal/policy.hpp"
#include "chordal/rng.hpp"

namespace chordal {

enum class PolicyKind { gnn, min_degree, uniform };

inline PolicyKind parse_policy_kind(std::string_view name) {
    if (name == "gnn") {
        return PolicyKind::gnn;
    }
    if (name == "mindeg" || name == "min_degree") {
        return PolicyKind::min_degree;
    }
    if (name == "uniform" || name == "random") {
        return PolicyKind::uniform;
    }
    throw ConfigError("unknown policy '" + std::string(name) + "'");
}

inline std::string_view policy_name(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::gnn:
        return "gnn";
    case PolicyKind::min_degree:
        return "mindeg";
    case PolicyKind::uniform:
        return "uniform";
    }
    return "?";
}

inline Policy make_policy(PolicyKind kind, const GnnParams* params = nullptr) {
    switch (kind) {
    case PolicyKind::gnn:
        if (params == nullptr) {
            throw ConfigError("gnn policy requires parameters");
        }
        return gnn_policy(*params);
    case PolicyKind::min_degree:
        return min_degree_policy;
    case PolicyKind::uniform:
        return uniform_policy;
    }
    throw ConfigError("unknown policy kind");
}

// Stream tags. Every policy evaluated on graph g, repeat r draws from the
// same stream, so comparisons between policies use common random numbers.
inline constexpr std::uint64_t kKlStream = 0x4b4c;
inline constexpr std::uint64_t kFillStream = 0x46494c4c;

/// Average KL(expert || learner) over the states visited by rolling out
/// the learner: sum of per-state losses over sum of graph sizes, averaged
/// over `repeats` rollouts per graph.
inline double on_policy_kl(std::span<const Graph> graphs, const Policy& learner,
                           std::size_t repeats, std::uint64_t seed) {
    if (graphs.empty()) {
        throw ConfigError("KL evaluation needs at least one graph");
    }
    if (repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    double loss = 0.0;
    std::size_t states = 0;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        for (std::size_t r = 0; r < repeats; ++r) {
            Rng rng = make_stream({seed, kKlStream, gi, r});
            Graph state = graphs[gi];
            while (!state.empty()) {
                const PolicyDistribution q = learner(state);
                validate_distribution(q, state);
                loss += kl_loss(min_degree_policy(state), q);
                ++states;
                state.eliminate(sample_action(q, rng));
            }
        }
    }
    return states ? loss / static_cast<double>(states) : 0.0;
}

/// One on-policy rollout per graph with a frozen parameter snapshot.
inline double avg_kl_loss(std::span<const Graph> graphs, const GnnParams& params,
                          std::uint64_t seed) {
    return on_policy_kl(graphs, gnn_policy(params), 1, seed);
}

/// Mean total fill-in per graph over `repeats` seeded rollouts.
inline std::vector<double> per_graph_fillin(std::span<const Graph> graphs, const Policy& policy,
                                            std::size_t repeats, std::uint64_t seed) {
    if (repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    std::vector<double> out;
    out.reserve(graphs.size());
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        if (graphs[gi].empty()) {
            out.push_back(0.0);
            continue;
        }
        std::size_t total = 0;
        for (std::size_t r = 0; r < repeats; ++r) {
            Rng rng = make_stream({seed, kFillStream, gi, r});
            total += rollout(graphs[gi], policy, rng).total_cost;
        }
        out.push_back(static_cast<double>(total) / static_cast<double>(repeats));
    }
    return out;
}

inline double mean(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s / static_cast<double>(values.size());
}

inline double avg_fillin(std::span<const Graph> graphs, const Policy& policy, std::size_t repeats,
                         std::uint64_t seed) {
    const auto per_graph = per_graph_fillin(graphs, policy, repeats, seed);
    return mean(per_graph);
}

inline double avg_fillin(std::span<const Graph> graphs, PolicyKind kind, const GnnParams* params,
                         std::size_t repeats, std::uint64_t seed) {
    return avg_fillin(graphs, make_policy(kind, params), repeats, seed);
}

inline double avg_fillin(std::span<const Graph> graphs, std::string_view policy_name,
                         const GnnParams* params, std::size_t repeats, std::uint64_t seed) {
    return avg_fillin(graphs, parse_policy_kind(policy_name), params, repeats, seed);
}

struct GraphFillRow {
    std::string graph_id;
    std::size_t num_vertices = 0;
    double gnn = 0.0;
    double min_degree = 0.0;
    double uniform = 0.0;
};

struct EvalReport {
    std::string dataset_id;
    std::size_t num_graphs = 0;
    double avg_kl_loss = 0.0;
    std::map<std::string, double> avg_fillin; // keyed by policy_name()
    std::vector<GraphFillRow> per_graph;
};

/// Average KL loss plus average fill-in of the GNN, minimum-degree and
/// uniform policies. `ids` may be empty, in which case graphs are named by
/// index.
inline EvalReport evaluate(std::string dataset_id, std::span<const Graph> graphs,
                           std::span<const std::string> ids, const GnnParams& params,
                           std::size_t repeats, std::uint64_t seed) {
    if (!ids.empty() && ids.size() != graphs.size()) {
        throw ConfigError("ids and graphs differ in length");
    }
    EvalReport rep;
    rep.dataset_id = std::move(dataset_id);
    rep.num_graphs = graphs.size();
    rep.avg_kl_loss = avg_kl_loss(graphs, params, seed);
    const auto gnn = per_graph_fillin(graphs, gnn_policy(params), repeats, seed);
    const auto md = per_graph_fillin(graphs, min_degree_policy, repeats, seed);
    const auto un = per_graph_fillin(graphs, uniform_policy, repeats, seed);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        rep.per_graph.push_back({ids.empty() ? std::to_string(i) : ids[i], graphs[i].num_active(),
                                 gnn[i], md[i], un[i]});
    }
    rep.avg_fillin[std::string(policy_name(PolicyKind::gnn))] = mean(gnn);
    rep.avg_fillin[std::string(policy_name(PolicyKind::min_degree))] = mean(md);
    rep.avg_fillin[std::string(policy_name(PolicyKind::uniform))] = mean(un);
    return rep;
}

inline void write_report_csv(std::ostream& os, const EvalReport& rep) {
    os << "dataset_id,num_graphs,avg_kl_loss,avg_fillin_gnn,avg_fillin_mindeg,avg_fillin_uniform\n"
       << rep.dataset_id << ',' << rep.num_graphs << ',' << format_double(rep.avg_kl_loss) << ','
       << format_double(rep.avg_fillin.at("gnn")) << ','
       << format_double(rep.avg_fillin.at("mindeg")) << ','
       << format_double(rep.avg_fillin.at("uniform")) << '\n';
}

inline void write_per_graph_csv(std::ostream& os, const EvalReport& rep) {
    os << "graph_id,n,fillin_gnn,fillin_mindeg,fillin_uniform\n";
    for (const auto& row : rep.per_graph) {
        os << row.graph_id << ',' << row.num_vertices << ',' << format_double(row.gnn) << ','
           << format_double(row.min_degree) << ',' << format_double(row.uniform) << '\n';
    }
}

inline void print_report_table(std::ostream& os, const EvalReport& rep) {
    const auto flags = os.flags();
    const auto precision = os.precision();
    os << "dataset     " << rep.dataset_id << '\n'
       << "graphs      " << rep.num_graphs << '\n'
       << "avg KL loss " << std::setprecision(6) << rep.avg_kl_loss << '\n'
       << "avg fill-in\n";
    for (const char* name : {"gnn", "mindeg", "uniform"}) {
        os << "  " << std::left << std::setw(9) << name << std::right << std::fixed
           << std::setprecision(2) << rep.avg_fillin.at(name) << '\n';
        os.flags(flags);
    }
    os.flags(flags);
    os.precision(precision);
}

} // namespace chordal
