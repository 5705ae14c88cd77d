#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "chordal/errors.hpp"
#include "chordal/format.hpp"
#include "chordal/graph.hpp"
#include "chordal/metrics.hpp"
#include "chordal/policy.hpp"

namespace chordal {

/// Weights of the two-layer scalar network
///
///   x1_i = relu(1 + w1 * deg(i)),  logit_i = w2 * sum_{j in N(i)} x1_j,
///
/// followed by a softmax over nodes.
struct ToyParams {
    double w1 = 0.0;
    double w2 = 0.0;
};

inline PolicyDistribution toy_forward(const ToyParams& t, const Graph& g) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    const auto active = g.active();
    std::vector<double> x1(g.num_labels(), 0.0);
    for (Vertex v : active) {
        x1[v] = std::max(0.0, 1.0 + t.w1 * static_cast<double>(g.degree(v)));
    }
    std::vector<double> logits;
    logits.reserve(active.size());
    for (Vertex v : active) {
        double s = 0.0;
        for (Vertex w : g.neighbors(v)) {
            s += x1[w];
        }
        logits.push_back(t.w2 * s);
    }
    return softmax_distribution({active.begin(), active.end()}, logits);
}

inline Policy toy_policy(ToyParams t) {
    return [t](const Graph& g) { return toy_forward(t, g); };
}

struct LandscapeGrid {
    std::vector<double> w1_values;
    std::vector<double> w2_values;
    std::vector<std::vector<double>> loss;            // [i][j] for (w1_i, w2_j)
    std::vector<std::vector<double>> normalized_fill; // same layout
    double baseline_fill = 0.0;                       // min-degree mean total fill-in
};

/// lo, lo + step, ..., up to hi inclusive (within half a step of rounding).
inline std::vector<double> grid_values(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) {
        throw ConfigError("grid needs lo <= hi and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(lo + static_cast<double>(i) * step);
    }
    return out;
}

/// Evaluates every (w1, w2) with the same seeds: the on-policy average KL
/// loss and the mean total fill-in relative to the minimum-degree policy.
inline LandscapeGrid sweep(std::span<const Graph> graphs, std::span<const double> w1_values,
                           std::span<const double> w2_values, std::size_t repeats,
                           std::uint64_t seed) {
    if (graphs.empty() || w1_values.empty() || w2_values.empty()) {
        throw ConfigError("sweep needs graphs and non-empty grids");
    }
    if (repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    LandscapeGrid grid;
    grid.w1_values.assign(w1_values.begin(), w1_values.end());
    grid.w2_values.assign(w2_values.begin(), w2_values.end());
    grid.baseline_fill = avg_fillin(graphs, min_degree_policy, repeats, seed);
    if (grid.baseline_fill <= 0.0) {
        throw NormalizationError("minimum-degree fill-in is zero on this dataset");
    }
    grid.loss.assign(w1_values.size(), std::vector<double>(w2_values.size(), 0.0));
    grid.normalized_fill = grid.loss;
    for (std::size_t i = 0; i < w1_values.size(); ++i) {
        for (std::size_t j = 0; j < w2_values.size(); ++j) {
            const Policy p = toy_policy({w1_values[i], w2_values[j]});
            grid.loss[i][j] = on_policy_kl(graphs, p, repeats, seed);
            grid.normalized_fill[i][j] = avg_fillin(graphs, p, repeats, seed) / grid.baseline_fill;
        }
    }
    return grid;
}

inline void write_grid_csv(std::ostream& os, const LandscapeGrid& grid) {
    os << "w1,w2,avg_kl_loss,normalized_fill\n";
    for (std::size_t i = 0; i < grid.w1_values.size(); ++i) {
        for (std::size_t j = 0; j < grid.w2_values.size(); ++j) {
            os << format_double(grid.w1_values[i]) << ',' << format_double(grid.w2_values[j])
               << ',' << format_double(grid.loss[i][j]) << ','
               << format_double(grid.normalized_fill[i][j]) << '\n';
        }
    }
}

} // namespace chordal
