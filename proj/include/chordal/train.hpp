#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
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
#include "chordal/metrics.hpp"
#include "chordal/policy.hpp"
#include "chordal/rng.hpp"

namespace chordal {

/// Which policy picks the next state while training. `on_policy` samples
/// from the freshly updated learner; `expert_behavior` samples from the
/// minimum-degree expert (supervised imitation).
enum class BehaviorMode { on_policy, expert_behavior };

inline BehaviorMode parse_behavior_mode(std::string_view s) {
    if (s == "on_policy" || s == "on-policy") {
        return BehaviorMode::on_policy;
    }
    if (s == "expert_behavior" || s == "expert" || s == "expert-behavior") {
        return BehaviorMode::expert_behavior;
    }
    throw ConfigError("unknown behavior mode '" + std::string(s) + "'");
}

inline std::string_view behavior_mode_name(BehaviorMode m) {
    return m == BehaviorMode::on_policy ? "on_policy" : "expert_behavior";
}

enum class OptimizerKind { sgd, adam };

inline OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "sgd") {
        return OptimizerKind::sgd;
    }
    if (s == "adam") {
        return OptimizerKind::adam;
    }
    throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

inline std::string_view optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::sgd ? "sgd" : "adam";
}

struct TrainConfig {
    std::size_t epochs = 20;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;
    BehaviorMode behavior_mode = BehaviorMode::on_policy;
    std::vector<std::size_t> layer_dims{1, 8, 1};
    std::size_t checkpoint_every = 1; // 0 disables checkpoints
    std::size_t eval_repeats = 5;
    OptimizerKind optimizer = OptimizerKind::sgd;

    void validate() const {
        if (epochs < 1) {
            throw ConfigError("epochs must be >= 1");
        }
        if (!(learning_rate > 0.0)) {
            throw ConfigError("learning rate must be > 0");
        }
        if (eval_repeats < 1) {
            throw ConfigError("eval repeats must be >= 1");
        }
        validate_dims(layer_dims);
    }
};

struct EpisodeResult {
    GnnParams params;
    std::vector<double> losses; // pre-update loss at each visited state
    Trajectory trajectory;
};

/// One pass of the one-step imitation loop over a single graph: at every
/// state take a gradient step on KL(expert || learner), then act.
inline EpisodeResult run_episode(GnnParams params, const Graph& g, const TrainConfig& cfg,
                                 Rng& rng, AdamState* adam = nullptr) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    EpisodeResult out;
    out.losses.reserve(g.num_active());
    Graph state = g;
    while (!state.empty()) {
        const PolicyDistribution expert = min_degree_policy(state);
        const ForwardResult fwd = forward(params, state);
        const double loss = kl_loss(expert, fwd.dist);
        const GnnGradients grads = backward(fwd.tape, expert, state, params);
        if (cfg.optimizer == OptimizerKind::adam) {
            if (adam == nullptr) {
                throw ConfigError("adam optimizer needs a moment state");
            }
            params = adam_step(params, grads, cfg.learning_rate, *adam);
        } else {
            params = sgd_step(params, grads, cfg.learning_rate);
        }
        out.losses.push_back(loss);
        const Vertex action = cfg.behavior_mode == BehaviorMode::on_policy
                                  ? sample_action(forward(params, state).dist, rng)
                                  : sample_action(expert, rng);
        apply_action(state, action, out.trajectory, loss);
    }
    out.params = std::move(params);
    return out;
}

struct EpochRecord {
    std::size_t epoch = 0;
    std::string split;
    double avg_kl_loss = 0.0;
    double avg_fillin_gnn = 0.0;
    double avg_fillin_mindeg = 0.0;
    double avg_fillin_uniform = 0.0;
};

struct Checkpoint {
    std::size_t epoch = 0;
    GnnParams params;
};

struct TrainHistory {
    std::vector<EpochRecord> records;
    std::vector<Checkpoint> checkpoints;
};

struct TrainResult {
    GnnParams initial_params;
    GnnParams params;
    TrainHistory history;
};

// Stream tags below the master seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;
inline constexpr std::uint64_t kEpisodeStream = 3;
inline constexpr std::uint64_t kEvalStream = 4;

/// Trains from Xavier-initialized parameters. Each epoch shuffles the
/// dataset, runs one episode per graph, then evaluates a frozen snapshot.
///
/// The training-split KL is the mean of the per-state losses seen during
/// the epoch; validation KL is an on-policy evaluation of the snapshot.
/// Fill-in columns of both splits evaluate the snapshot and the two
/// baseline policies with `eval_repeats` rollouts per graph.
inline TrainResult train(std::span<const Graph> dataset, std::span<const Graph> val,
                         const TrainConfig& cfg,
                         const std::function<void(const EpochRecord&)>& on_record = {}) {
    cfg.validate();
    if (dataset.empty()) {
        throw ConfigError("training dataset is empty");
    }
    for (const Graph& g : dataset) {
        if (g.empty()) {
            throw ConfigError("training dataset contains an empty graph");
        }
    }
    Rng init_rng = make_stream({cfg.seed, kInitStream});
    TrainResult result;
    result.initial_params = xavier_init(cfg.layer_dims, init_rng);
    GnnParams params = result.initial_params;
    AdamState adam = adam_state(cfg.layer_dims);

    const std::uint64_t eval_seed = make_stream({cfg.seed, kEvalStream})();
    struct Baseline {
        double mindeg;
        double uniform;
    };
    auto baseline = [&](std::span<const Graph> gs) {
        return Baseline{avg_fillin(gs, min_degree_policy, cfg.eval_repeats, eval_seed),
                        avg_fillin(gs, uniform_policy, cfg.eval_repeats, eval_seed)};
    };
    const Baseline train_base = baseline(dataset);
    const std::optional<Baseline> val_base =
        val.empty() ? std::nullopt : std::optional<Baseline>(baseline(val));

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng = make_stream({cfg.seed, kShuffleStream, epoch});
        shuffle(order, shuffle_rng);

        double loss_sum = 0.0;
        std::size_t states = 0;
        for (std::size_t gi : order) {
            Rng episode_rng = make_stream({cfg.seed, kEpisodeStream, epoch, gi});
            EpisodeResult ep = run_episode(std::move(params), dataset[gi], cfg, episode_rng, &adam);
            params = std::move(ep.params);
            for (double l : ep.losses) {
                loss_sum += l;
            }
            states += ep.losses.size();
        }

        const Policy snapshot = gnn_policy(params);
        EpochRecord tr{epoch,
                       "train",
                       loss_sum / static_cast<double>(states),
                       avg_fillin(dataset, snapshot, cfg.eval_repeats, eval_seed),
                       train_base.mindeg,
                       train_base.uniform};
        result.history.records.push_back(tr);
        if (on_record) {
            on_record(tr);
        }
        if (val_base) {
            EpochRecord vr{epoch,
                           "val",
                           on_policy_kl(val, snapshot, 1, eval_seed),
                           avg_fillin(val, snapshot, cfg.eval_repeats, eval_seed),
                           val_base->mindeg,
                           val_base->uniform};
            result.history.records.push_back(vr);
            if (on_record) {
                on_record(vr);
            }
        }
        if (cfg.checkpoint_every > 0 &&
            (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs)) {
            result.history.checkpoints.push_back({epoch, params});
        }
    }
    result.params = std::move(params);
    return result;
}

inline void write_history_csv(std::ostream& os, const TrainHistory& h) {
    os << "epoch,split,avg_kl_loss,avg_fillin_gnn,avg_fillin_mindeg,avg_fillin_uniform\n";
    for (const auto& r : h.records) {
        os << r.epoch << ',' << r.split << ',' << format_double(r.avg_kl_loss) << ','
           << format_double(r.avg_fillin_gnn) << ',' << format_double(r.avg_fillin_mindeg) << ','
           << format_double(r.avg_fillin_uniform) << '\n';
    }
}

} // namespace chordal
