#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "chordal/errors.hpp"
#include "chordal/format.hpp"
#include "chordal/graph.hpp"
#include "chordal/policy.hpp"
#include "chordal/rng.hpp"

namespace chordal {

// Message-passing network over the adjacency matrix A (zero diagonal):
//
//   H^0 = 1 (n x 1),  Z^l = A H^l W^l + 1 B^l,
//   H^{l+1} = relu(Z^l) for hidden layers, softmax over nodes of Z^{L-1}.
//
// The last layer has width 1, so its pre-activation is one logit per node.

struct GnnLayer {
    Eigen::MatrixXd weight; // d_in x d_out
    Eigen::RowVectorXd bias; // 1 x d_out

    friend bool operator==(const GnnLayer& a, const GnnLayer& b) {
        return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
               a.bias.size() == b.bias.size() && a.weight == b.weight && a.bias == b.bias;
    }
};

struct GnnParams {
    std::vector<std::size_t> dims;
    std::vector<GnnLayer> layers;

    std::size_t num_layers() const { return layers.size(); }

    void validate() const {
        if (dims.size() < 2) {
            throw ParamsContractError("need at least two layer dims");
        }
        if (dims.front() != 1) {
            throw ParamsContractError("input dimension must be 1");
        }
        if (dims.back() != 1) {
            throw ParamsContractError("output dimension must be 1");
        }
        if (layers.size() != dims.size() - 1) {
            throw ParamsContractError("layer count does not match dims");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& L = layers[l];
            if (dims[l] == 0 || dims[l + 1] == 0 ||
                static_cast<std::size_t>(L.weight.rows()) != dims[l] ||
                static_cast<std::size_t>(L.weight.cols()) != dims[l + 1] ||
                static_cast<std::size_t>(L.bias.size()) != dims[l + 1]) {
                throw ParamsContractError("layer " + std::to_string(l) + " shape mismatch");
            }
        }
    }

    friend bool operator==(const GnnParams&, const GnnParams&) = default;
};

/// Gradients share the parameter layout.
using GnnGradients = GnnParams;

inline void validate_dims(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2 || dims.front() != 1 || dims.back() != 1) {
        throw ConfigError("layer dims must start and end with 1 and have at least two entries");
    }
    for (std::size_t d : dims) {
        if (d == 0) {
            throw ConfigError("layer dims must be positive");
        }
    }
}

inline GnnParams zero_params(const std::vector<std::size_t>& dims) {
    validate_dims(dims);
    GnnParams p;
    p.dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const auto rows = static_cast<Eigen::Index>(dims[l]);
        const auto cols = static_cast<Eigen::Index>(dims[l + 1]);
        p.layers.push_back({Eigen::MatrixXd::Zero(rows, cols), Eigen::RowVectorXd::Zero(cols)});
    }
    return p;
}

/// Weights ~ Normal(0, 2 / (d_in + d_out)) drawn row-major; biases zero.
inline GnnParams xavier_init(const std::vector<std::size_t>& dims, Rng& rng) {
    GnnParams p = zero_params(dims);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const double stddev = std::sqrt(2.0 / static_cast<double>(dims[l] + dims[l + 1]));
        std::normal_distribution<double> normal(0.0, stddev);
        auto& w = p.layers[l].weight;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = normal(rng);
            }
        }
    }
    return p;
}

/// Everything backward needs from one forward pass.
struct ForwardTape {
    std::vector<Vertex> labels;
    std::vector<std::vector<Eigen::Index>> adjacency; // compact indices
    std::vector<Eigen::MatrixXd> inputs;              // H^l
    std::vector<Eigen::MatrixXd> aggregated;          // A H^l
    std::vector<Eigen::MatrixXd> preactivations;      // Z^l
    std::vector<double> logits;
};

struct ForwardResult {
    PolicyDistribution dist;
    ForwardTape tape;
};

namespace detail {

inline std::vector<std::vector<Eigen::Index>> compact_adjacency(const Graph& g) {
    const auto active = g.active();
    std::vector<Eigen::Index> index(g.num_labels(), -1);
    for (std::size_t i = 0; i < active.size(); ++i) {
        index[active[i]] = static_cast<Eigen::Index>(i);
    }
    std::vector<std::vector<Eigen::Index>> adj(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        for (Vertex w : g.neighbors(active[i])) {
            adj[i].push_back(index[w]);
        }
    }
    return adj;
}

/// Row i of the result is the sum of rows j of h over neighbors j of i.
inline Eigen::MatrixXd aggregate(const std::vector<std::vector<Eigen::Index>>& adj,
                                 const Eigen::MatrixXd& h) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (Eigen::Index j : adj[i]) {
            out.row(static_cast<Eigen::Index>(i)) += h.row(j);
        }
    }
    return out;
}

/// x * w with one fixed summation order for every row. Blocked GEMM
/// kernels treat packet rows and tail rows differently, which would let
/// identical nodes drift apart by a few ulps and break exact symmetry.
inline Eigen::MatrixXd rowwise_product(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
    Eigen::MatrixXd out(x.rows(), w.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index k = 0; k < w.cols(); ++k) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                s += x(i, j) * w(j, k);
            }
            out(i, k) = s;
        }
    }
    return out;
}

} // namespace detail

inline ForwardResult forward(const GnnParams& p, const Graph& g) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    p.validate();
    ForwardResult r;
    ForwardTape& t = r.tape;
    const auto active = g.active();
    const auto n = static_cast<Eigen::Index>(active.size());
    t.labels.assign(active.begin(), active.end());
    t.adjacency = detail::compact_adjacency(g);

    Eigen::MatrixXd h = Eigen::MatrixXd::Ones(n, 1);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const auto& layer = p.layers[l];
        Eigen::MatrixXd ah = detail::aggregate(t.adjacency, h);
        Eigen::MatrixXd z = detail::rowwise_product(ah, layer.weight);
        z.rowwise() += layer.bias;
        t.inputs.push_back(std::move(h));
        t.aggregated.push_back(std::move(ah));
        if (l + 1 < p.layers.size()) {
            h = z.cwiseMax(0.0);
        }
        t.preactivations.push_back(std::move(z));
    }
    const Eigen::MatrixXd& z = t.preactivations.back();
    t.logits.assign(z.data(), z.data() + z.size());
    r.dist = softmax_distribution(t.labels, t.logits);
    return r;
}

/// Reverse-mode gradient of kl_loss(expert, softmax output) w.r.t. every
/// weight and bias. The logit gradient is (learner - expert).
inline GnnGradients backward(const ForwardTape& tape, const PolicyDistribution& expert,
                             const Graph& g, const GnnParams& p) {
    p.validate();
    const auto active = g.active();
    if (tape.labels.size() != active.size() ||
        !std::equal(active.begin(), active.end(), tape.labels.begin()) ||
        tape.preactivations.size() != p.layers.size() || tape.inputs.size() != p.layers.size()) {
        throw ParamsContractError("forward tape does not match graph or parameters");
    }
    if (expert.labels != tape.labels) {
        throw PolicyContractError("expert distribution is over a different vertex set");
    }
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        if (tape.preactivations[l].cols() != static_cast<Eigen::Index>(p.dims[l + 1])) {
            throw ParamsContractError("forward tape does not match graph or parameters");
        }
    }
    const auto n = static_cast<Eigen::Index>(tape.labels.size());
    const PolicyDistribution learner = softmax_distribution(tape.labels, tape.logits);

    GnnGradients grads = zero_params(p.dims);
    Eigen::MatrixXd delta(n, 1); // dL/dZ for the current layer
    for (Eigen::Index i = 0; i < n; ++i) {
        delta(i, 0) = learner.probs[i] - expert.probs[i];
    }
    for (std::size_t l = p.layers.size(); l-- > 0;) {
        grads.layers[l].weight = tape.aggregated[l].transpose() * delta;
        grads.layers[l].bias = delta.colwise().sum();
        if (l == 0) {
            break;
        }
        // dL/dH^l = A delta W^T (A symmetric), then through the ReLU of Z^{l-1}.
        Eigen::MatrixXd dh = detail::rowwise_product(detail::aggregate(tape.adjacency, delta),
                                                     p.layers[l].weight.transpose());
        const Eigen::MatrixXd& z = tape.preactivations[l - 1];
        delta = dh.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    }
    return grads;
}

/// Wraps a parameter snapshot as a policy.
inline Policy gnn_policy(GnnParams p) {
    return [params = std::move(p)](const Graph& g) { return forward(params, g).dist; };
}

inline GnnParams sgd_step(const GnnParams& p, const GnnGradients& grads, double alpha) {
    p.validate();
    if (grads.dims != p.dims) {
        throw ParamsContractError("gradient shape differs from parameters");
    }
    grads.validate();
    GnnParams out = p;
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        out.layers[l].weight -= alpha * grads.layers[l].weight;
        out.layers[l].bias -= alpha * grads.layers[l].bias;
    }
    return out;
}

/// Adam moment estimates for one parameter set.
struct AdamState {
    GnnParams first;
    GnnParams second;
    std::size_t steps = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

inline AdamState adam_state(const std::vector<std::size_t>& dims) {
    return {zero_params(dims), zero_params(dims)};
}

/// Bias-corrected Adam update; `state` is advanced in place.
inline GnnParams adam_step(const GnnParams& p, const GnnGradients& grads, double alpha,
                           AdamState& state) {
    p.validate();
    if (grads.dims != p.dims || state.first.dims != p.dims) {
        throw ParamsContractError("gradient shape differs from parameters");
    }
    ++state.steps;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.steps));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.steps));
    GnnParams out = p;
    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
        param.array() -= alpha * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
    };
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        update(out.layers[l].weight, grads.layers[l].weight, state.first.layers[l].weight,
               state.second.layers[l].weight);
        update(out.layers[l].bias, grads.layers[l].bias, state.first.layers[l].bias,
               state.second.layers[l].bias);
    }
    return out;
}

// Text format, shortest round-trip decimal representation:
//
//   gnn-params 1
//   dims 1 8 1
//   weight 0 1 8
//   <row-major values, one matrix row per line>
//   bias 0 8
//   <values>

inline constexpr int kParamsFormatVersion = 1;

namespace detail {

inline double parse_double(const std::string& tok, std::size_t line) {
    double x = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError("bad number '" + tok + "'", line);
    }
    return x;
}

inline std::vector<std::string> next_tokens(std::istream& is, std::size_t& line_no) {
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) {
            toks.push_back(t);
        }
        if (!toks.empty()) {
            return toks;
        }
    }
    throw ParseError("unexpected end of parameters", line_no);
}

inline std::size_t parse_count(const std::string& tok, std::size_t line) {
    std::size_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError("bad integer '" + tok + "'", line);
    }
    return v;
}

} // namespace detail

inline void write_params(std::ostream& os, const GnnParams& p) {
    p.validate();
    os << "gnn-params " << kParamsFormatVersion << '\n' << "dims";
    for (std::size_t d : p.dims) {
        os << ' ' << d;
    }
    os << '\n';
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const auto& w = p.layers[l].weight;
        os << "weight " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                os << (c ? " " : "") << format_double(w(r, c));
            }
            os << '\n';
        }
        const auto& b = p.layers[l].bias;
        os << "bias " << l << ' ' << b.size() << '\n';
        for (Eigen::Index c = 0; c < b.size(); ++c) {
            os << (c ? " " : "") << format_double(b(c));
        }
        os << '\n';
    }
}

inline std::string to_params_text(const GnnParams& p) {
    std::ostringstream os;
    write_params(os, p);
    return os.str();
}

inline GnnParams read_params(std::istream& is) {
    std::size_t line = 0;
    auto toks = detail::next_tokens(is, line);
    if (toks.size() != 2 || toks[0] != "gnn-params") {
        throw ParseError("expected 'gnn-params <version>' header", line);
    }
    if (toks[1] != std::to_string(kParamsFormatVersion)) {
        throw VersionError("unsupported gnn-params version '" + toks[1] + "'");
    }
    toks = detail::next_tokens(is, line);
    if (toks.empty() || toks[0] != "dims") {
        throw ParseError("expected 'dims' line", line);
    }
    std::vector<std::size_t> dims;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        dims.push_back(detail::parse_count(toks[i], line));
    }
    GnnParams p;
    try {
        p = zero_params(dims);
    } catch (const ConfigError& e) {
        throw ParseError(e.what(), line);
    }
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        auto& w = p.layers[l].weight;
        toks = detail::next_tokens(is, line);
        if (toks.size() != 4 || toks[0] != "weight" || detail::parse_count(toks[1], line) != l ||
            detail::parse_count(toks[2], line) != static_cast<std::size_t>(w.rows()) ||
            detail::parse_count(toks[3], line) != static_cast<std::size_t>(w.cols())) {
            throw ParseError("expected 'weight " + std::to_string(l) + " " +
                                 std::to_string(w.rows()) + " " + std::to_string(w.cols()) + "'",
                             line);
        }
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            toks = detail::next_tokens(is, line);
            if (toks.size() != static_cast<std::size_t>(w.cols())) {
                throw ParseError("weight row has wrong length", line);
            }
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = detail::parse_double(toks[c], line);
            }
        }
        auto& b = p.layers[l].bias;
        toks = detail::next_tokens(is, line);
        if (toks.size() != 3 || toks[0] != "bias" || detail::parse_count(toks[1], line) != l ||
            detail::parse_count(toks[2], line) != static_cast<std::size_t>(b.size())) {
            throw ParseError("expected 'bias " + std::to_string(l) + "' header", line);
        }
        toks = detail::next_tokens(is, line);
        if (toks.size() != static_cast<std::size_t>(b.size())) {
            throw ParseError("bias row has wrong length", line);
        }
        for (Eigen::Index c = 0; c < b.size(); ++c) {
            b(c) = detail::parse_double(toks[c], line);
        }
    }
    return p;
}

inline GnnParams from_params_text(const std::string& text) {
    std::istringstream is(text);
    return read_params(is);
}

} // namespace chordal
