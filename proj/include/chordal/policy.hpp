#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chordal/errors.hpp"
#include "chordal/graph.hpp"
#include "chordal/rng.hpp"

namespace chordal {

/// Probability vector over the active vertices of one graph state.
///
/// `labels` is ascending and covers every active vertex, including those
/// with probability zero. `log_probs` is optional; when present it holds
/// the natural log of each entry computed in the log domain, which lets
/// the KL loss stay finite when a softmax underflows.
struct PolicyDistribution {
    std::vector<Vertex> labels;
    std::vector<double> probs;
    std::vector<double> log_probs;

    std::size_t size() const { return labels.size(); }

    double log_prob(std::size_t i) const {
        if (!log_probs.empty()) {
            return log_probs[i];
        }
        return probs[i] > 0.0 ? std::log(probs[i]) : -std::numeric_limits<double>::infinity();
    }

    /// Probability of `v`, or 0 if `v` is not covered.
    double prob(Vertex v) const {
        auto it = std::lower_bound(labels.begin(), labels.end(), v);
        if (it == labels.end() || *it != v) {
            return 0.0;
        }
        return probs[static_cast<std::size_t>(it - labels.begin())];
    }

    /// Labels with strictly positive probability.
    std::vector<Vertex> support() const {
        std::vector<Vertex> out;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (probs[i] > 0.0) {
                out.push_back(labels[i]);
            }
        }
        return out;
    }
};

using Policy = std::function<PolicyDistribution(const Graph&)>;

/// Checks that `d` is a distribution over exactly the active vertices of `g`.
inline void validate_distribution(const PolicyDistribution& d, const Graph& g,
                                  double tolerance = 1e-9) {
    const auto active = g.active();
    if (d.labels.size() != active.size() || d.probs.size() != active.size() ||
        (!d.log_probs.empty() && d.log_probs.size() != active.size())) {
        throw PolicyContractError("distribution has " + std::to_string(d.probs.size()) +
                                  " entries for " + std::to_string(active.size()) +
                                  " active vertices");
    }
    if (!std::equal(active.begin(), active.end(), d.labels.begin())) {
        throw PolicyContractError("distribution labels differ from the active vertex set");
    }
    double sum = 0.0;
    for (double p : d.probs) {
        if (!(p >= 0.0)) {
            throw PolicyContractError("negative or NaN probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
        throw PolicyContractError("probabilities sum to " + std::to_string(sum));
    }
}

namespace detail {

/// Puts mass 1/k (log -ln k) on `chosen`, 0 on the rest of the active set.
inline PolicyDistribution uniform_over(const Graph& g, std::span<const Vertex> chosen) {
    PolicyDistribution d;
    const auto active = g.active();
    d.labels.assign(active.begin(), active.end());
    d.probs.assign(active.size(), 0.0);
    d.log_probs.assign(active.size(), -std::numeric_limits<double>::infinity());
    const double k = static_cast<double>(chosen.size());
    const double p = 1.0 / k;
    const double lp = -std::log(k);
    std::size_t j = 0;
    for (std::size_t i = 0; i < active.size() && j < chosen.size(); ++i) {
        if (active[i] == chosen[j]) {
            d.probs[i] = p;
            d.log_probs[i] = lp;
            ++j;
        }
    }
    return d;
}

} // namespace detail

/// The minimum-degree expert: 1/k on each of the k minimum-degree vertices.
inline PolicyDistribution min_degree_policy(const Graph& g) {
    const auto nodes = min_degree_nodes(g);
    return detail::uniform_over(g, nodes);
}

inline PolicyDistribution uniform_policy(const Graph& g) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    return detail::uniform_over(g, g.active());
}

/// Inverse-CDF sampling in ascending label order.
inline Vertex sample_action(const PolicyDistribution& d, Rng& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    Vertex last = -1;
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
        if (d.probs[i] <= 0.0) {
            continue;
        }
        cumulative += d.probs[i];
        last = d.labels[i];
        if (u < cumulative) {
            return last;
        }
    }
    if (last < 0) {
        throw PolicyContractError("distribution has no positive mass");
    }
    // Rounding left cumulative slightly below 1.
    return last;
}

/// KL(expert || learner), summed over the expert's support. Both
/// distributions must be over the same label set. Returns +inf if the
/// learner assigns zero probability to a supported vertex.
inline double kl_loss(const PolicyDistribution& expert, const PolicyDistribution& learner) {
    if (expert.labels != learner.labels) {
        throw PolicyContractError("KL between distributions over different vertex sets");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < expert.probs.size(); ++i) {
        const double p = expert.probs[i];
        if (p > 0.0) {
            loss += p * (expert.log_prob(i) - learner.log_prob(i));
        }
    }
    return loss;
}

/// Node-wise softmax of `logits` with max-subtraction; fills both
/// probabilities and log-probabilities.
inline PolicyDistribution softmax_distribution(std::vector<Vertex> labels,
                                               std::span<const double> logits) {
    PolicyDistribution d;
    d.labels = std::move(labels);
    const std::size_t n = logits.size();
    d.probs.resize(n);
    d.log_probs.resize(n);
    double mx = -std::numeric_limits<double>::infinity();
    for (double z : logits) {
        mx = std::max(mx, z);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d.probs[i] = std::exp(logits[i] - mx);
        sum += d.probs[i];
    }
    const double log_sum = std::log(sum);
    for (std::size_t i = 0; i < n; ++i) {
        d.probs[i] /= sum;
        d.log_probs[i] = (logits[i] - mx) - log_sum;
    }
    return d;
}

} // namespace chordal
