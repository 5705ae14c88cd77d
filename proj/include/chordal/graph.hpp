#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chordal/errors.hpp"

namespace chordal {

using Vertex = std::int32_t;

struct Edge {
    Vertex u;
    Vertex v;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph over stable labels 0..num_labels-1.
///
/// Eliminated vertices leave the active set but keep their label, so
/// orderings and policy outputs always refer to the original numbering.
/// Adjacency lists are sorted and only ever contain active labels.
class Graph {
public:
    Graph() = default;

    explicit Graph(std::size_t num_labels)
        : adjacency_(num_labels), present_(num_labels, true), active_(num_labels) {
        for (std::size_t i = 0; i < num_labels; ++i) {
            active_[i] = static_cast<Vertex>(i);
        }
    }

    /// Builds a graph from an edge list. Duplicates are merged; self-loops
    /// and out-of-range endpoints are rejected.
    static Graph from_edges(std::size_t num_labels, std::span<const Edge> edges) {
        Graph g(num_labels);
        for (const Edge& e : edges) {
            g.add_edge(e.u, e.v);
        }
        return g;
    }

    std::size_t num_labels() const { return present_.size(); }
    std::size_t num_active() const { return active_.size(); }
    bool empty() const { return active_.empty(); }

    bool is_active(Vertex v) const {
        return v >= 0 && static_cast<std::size_t>(v) < present_.size() && present_[v];
    }

    /// Active labels in ascending order.
    std::span<const Vertex> active() const { return active_; }

    std::span<const Vertex> neighbors(Vertex v) const {
        require_active(v);
        return adjacency_[v];
    }

    std::size_t degree(Vertex v) const {
        require_active(v);
        return adjacency_[v].size();
    }

    bool has_edge(Vertex u, Vertex v) const {
        if (!is_active(u) || !is_active(v)) {
            return false;
        }
        const auto& a = adjacency_[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    /// Returns false when the edge was already present.
    bool add_edge(Vertex u, Vertex v) {
        require_active(u);
        require_active(v);
        if (u == v) {
            throw InvalidVertexError("self-loop on vertex " + std::to_string(u));
        }
        if (!insert_sorted(adjacency_[u], v)) {
            return false;
        }
        insert_sorted(adjacency_[v], u);
        ++num_edges_;
        return true;
    }

    std::size_t num_edges() const { return num_edges_; }

    /// Edges with u < v in lexicographic order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(num_edges_);
        for (Vertex u : active_) {
            for (Vertex v : adjacency_[u]) {
                if (u < v) {
                    out.push_back({u, v});
                }
            }
        }
        return out;
    }

    /// Number of edges eliminating `v` would insert, without modifying the graph.
    std::size_t fill_if_eliminated(Vertex v) const {
        require_active(v);
        const auto& nv = adjacency_[v];
        const std::size_t d = nv.size();
        std::size_t twice_present = 0;
        for (Vertex u : nv) {
            twice_present += count_common(adjacency_[u], nv);
        }
        return d * (d - (d > 0 ? 1 : 0)) / 2 - twice_present / 2;
    }

    /// Turns the neighborhood of `v` into a clique and removes `v`.
    /// Returns the number of inserted edges; appends them (u < w) to `fill`
    /// when provided.
    std::size_t eliminate(Vertex v, std::vector<Edge>* fill = nullptr) {
        require_active(v);
        std::vector<Vertex> nv = std::move(adjacency_[v]);
        adjacency_[v].clear();
        std::size_t added = 0;
        std::vector<Vertex> merged;
        for (Vertex u : nv) {
            auto& nu = adjacency_[u];
            nu.erase(std::lower_bound(nu.begin(), nu.end(), v));
            merged.clear();
            merged.reserve(nu.size() + nv.size());
            auto a = nu.begin();
            auto b = nv.begin();
            while (a != nu.end() || b != nv.end()) {
                if (b != nv.end() && *b == u) {
                    ++b;
                    continue;
                }
                if (b == nv.end() || (a != nu.end() && *a < *b)) {
                    merged.push_back(*a++);
                } else if (a == nu.end() || *b < *a) {
                    if (u < *b) {
                        ++added;
                        if (fill) {
                            fill->push_back({u, *b});
                        }
                    }
                    merged.push_back(*b++);
                } else {
                    merged.push_back(*a++);
                    ++b;
                }
            }
            nu.swap(merged);
        }
        num_edges_ = num_edges_ - nv.size() + added;
        present_[v] = false;
        active_.erase(std::lower_bound(active_.begin(), active_.end(), v));
        if (fill) {
            std::sort(fill->end() - static_cast<std::ptrdiff_t>(added), fill->end());
        }
        return added;
    }

    /// Symmetry, loop-freeness, closure over the active set and edge count.
    bool check_invariants() const {
        std::size_t twice = 0;
        for (std::size_t x = 0; x < adjacency_.size(); ++x) {
            const auto& a = adjacency_[x];
            if (!present_[x] && !a.empty()) {
                return false;
            }
            if (!std::is_sorted(a.begin(), a.end()) ||
                std::adjacent_find(a.begin(), a.end()) != a.end()) {
                return false;
            }
            for (Vertex y : a) {
                if (y == static_cast<Vertex>(x) || !is_active(y)) {
                    return false;
                }
                const auto& b = adjacency_[y];
                if (!std::binary_search(b.begin(), b.end(), static_cast<Vertex>(x))) {
                    return false;
                }
            }
            twice += a.size();
        }
        return twice == 2 * num_edges_;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.present_ == b.present_ && a.adjacency_ == b.adjacency_;
    }

private:
    void require_active(Vertex v) const {
        if (!is_active(v)) {
            throw InvalidVertexError("vertex " + std::to_string(v) + " is not active");
        }
    }

    static bool insert_sorted(std::vector<Vertex>& a, Vertex v) {
        auto it = std::lower_bound(a.begin(), a.end(), v);
        if (it != a.end() && *it == v) {
            return false;
        }
        a.insert(it, v);
        return true;
    }

    static std::size_t count_common(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
        std::size_t n = 0;
        auto i = a.begin();
        auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (*i < *j) {
                ++i;
            } else if (*j < *i) {
                ++j;
            } else {
                ++n;
                ++i;
                ++j;
            }
        }
        return n;
    }

    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<bool> present_;
    std::vector<Vertex> active_;
    std::size_t num_edges_ = 0;
};

inline std::size_t degree(const Graph& g, Vertex v) { return g.degree(v); }

struct EliminationResult {
    Graph graph;
    std::vector<Edge> fill_edges;
    std::size_t fill_count = 0;
};

inline EliminationResult eliminate(const Graph& g, Vertex v) {
    EliminationResult r{g, {}, 0};
    r.fill_count = r.graph.eliminate(v, &r.fill_edges);
    return r;
}

/// All active vertices of minimum degree, ascending.
inline std::vector<Vertex> min_degree_nodes(const Graph& g) {
    if (g.empty()) {
        throw EmptyGraphError();
    }
    std::vector<Vertex> out;
    std::size_t best = SIZE_MAX;
    for (Vertex v : g.active()) {
        const std::size_t d = g.degree(v);
        if (d < best) {
            best = d;
            out.clear();
        }
        if (d == best) {
            out.push_back(v);
        }
    }
    return out;
}

/// Throws unless `ordering` is a permutation of the active vertices of `g`.
inline void validate_ordering(const Graph& g, std::span<const Vertex> ordering) {
    if (ordering.size() != g.num_active()) {
        throw InvalidOrderingError("ordering has " + std::to_string(ordering.size()) +
                                   " entries, graph has " + std::to_string(g.num_active()) +
                                   " active vertices");
    }
    std::vector<bool> seen(g.num_labels(), false);
    for (Vertex v : ordering) {
        if (!g.is_active(v)) {
            throw InvalidOrderingError("ordering names inactive vertex " + std::to_string(v));
        }
        if (seen[v]) {
            throw InvalidOrderingError("ordering repeats vertex " + std::to_string(v));
        }
        seen[v] = true;
    }
}

struct ChordalExtension {
    Graph extension;
    std::size_t total_fill = 0;
};

/// Original graph plus every edge inserted while eliminating in `ordering`.
inline ChordalExtension chordal_extension(const Graph& g, std::span<const Vertex> ordering) {
    validate_ordering(g, ordering);
    Graph work = g;
    ChordalExtension out{g, 0};
    std::vector<Edge> fill;
    for (Vertex v : ordering) {
        fill.clear();
        out.total_fill += work.eliminate(v, &fill);
        for (const Edge& e : fill) {
            out.extension.add_edge(e.u, e.v);
        }
    }
    return out;
}

/// Maximum cardinality search over the active vertices. Returns the visit
/// order; its reverse is a perfect elimination ordering iff g is chordal.
inline std::vector<Vertex> maximum_cardinality_search(const Graph& g) {
    const std::size_t n = g.num_labels();
    std::vector<std::size_t> weight(n, 0);
    std::vector<bool> visited(n, false);
    std::vector<Vertex> order;
    order.reserve(g.num_active());
    for (std::size_t step = 0; step < g.num_active(); ++step) {
        Vertex best = -1;
        for (Vertex v : g.active()) {
            if (!visited[v] && (best < 0 || weight[v] > weight[best])) {
                best = v;
            }
        }
        visited[best] = true;
        order.push_back(best);
        for (Vertex w : g.neighbors(best)) {
            if (!visited[w]) {
                ++weight[w];
            }
        }
    }
    return order;
}

/// True iff eliminating in `ordering` adds no edge. Uses the parent test:
/// the later neighbors of v, minus the earliest of them p, must all be
/// adjacent to p.
inline bool is_perfect_elimination_ordering(const Graph& g, std::span<const Vertex> ordering) {
    validate_ordering(g, ordering);
    std::vector<std::size_t> position(g.num_labels(), 0);
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        position[ordering[i]] = i;
    }
    for (Vertex v : ordering) {
        Vertex parent = -1;
        for (Vertex w : g.neighbors(v)) {
            if (position[w] > position[v] && (parent < 0 || position[w] < position[parent])) {
                parent = w;
            }
        }
        if (parent < 0) {
            continue;
        }
        for (Vertex w : g.neighbors(v)) {
            if (w != parent && position[w] > position[v] && !g.has_edge(parent, w)) {
                return false;
            }
        }
    }
    return true;
}

inline bool is_chordal(const Graph& g) {
    std::vector<Vertex> order = maximum_cardinality_search(g);
    std::reverse(order.begin(), order.end());
    return is_perfect_elimination_ordering(g, order);
}

// Edge-list text format: "n m" then m lines "u v" (0-based, u < v,
// lexicographic). Inactive vertices are not represented.

inline void write_edge_list(std::ostream& os, const Graph& g) {
    const auto es = g.edges();
    os << g.num_labels() << ' ' << es.size() << '\n';
    for (const Edge& e : es) {
        os << e.u << ' ' << e.v << '\n';
    }
}

inline std::string to_edge_list(const Graph& g) {
    std::ostringstream os;
    write_edge_list(os, g);
    return os.str();
}

namespace detail {

inline bool next_content_line(std::istream& is, std::string& line, std::size_t& line_no) {
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] != '#') {
            return true;
        }
    }
    return false;
}

} // namespace detail

/// Reads one edge-list block. Lines starting with '#' are skipped.
/// `line_no` tracks the position for error messages across blocks.
inline Graph read_edge_list(std::istream& is, std::size_t& line_no) {
    std::string line;
    if (!detail::next_content_line(is, line, line_no)) {
        throw ParseError("missing 'n m' header", line_no);
    }
    long long n = -1;
    long long m = -1;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> n >> m) || n < 0 || m < 0 || (hs >> extra)) {
            throw ParseError("expected 'n m' header, got '" + line + "'", line_no);
        }
    }
    Graph g(static_cast<std::size_t>(n));
    for (long long i = 0; i < m; ++i) {
        if (!detail::next_content_line(is, line, line_no)) {
            throw ParseError("expected " + std::to_string(m) + " edges, found " + std::to_string(i),
                             line_no);
        }
        std::istringstream es(line);
        long long u = -1;
        long long v = -1;
        std::string extra;
        if (!(es >> u >> v) || (es >> extra)) {
            throw ParseError("expected 'u v', got '" + line + "'", line_no);
        }
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) {
            throw ParseError("invalid edge '" + line + "'", line_no);
        }
        g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return g;
}

inline Graph read_edge_list(std::istream& is) {
    std::size_t line_no = 0;
    return read_edge_list(is, line_no);
}

inline Graph from_edge_list(const std::string& text) {
    std::istringstream is(text);
    return read_edge_list(is);
}

} // namespace chordal
