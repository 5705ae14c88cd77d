#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "chordal/errors.hpp"
#include "chordal/format.hpp"
#include "chordal/graph.hpp"
#include "chordal/rng.hpp"

namespace chordal {

enum class DatasetKind { erdos_renyi, matrix_market };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::erdos_renyi;
    std::size_t count = 0;
    std::size_t n_min = 1;
    std::size_t n_max = 1;
    double p_min = 0.0;
    double p_max = 0.0;
    std::uint64_t seed = 0;
    std::filesystem::path source_dir;

    void validate() const {
        if (n_min < 1 || n_min > n_max) {
            throw ConfigError("n range must satisfy 1 <= n_min <= n_max");
        }
        if (!(p_min >= 0.0 && p_min <= p_max && p_max <= 1.0)) {
            throw ConfigError("p range must satisfy 0 <= p_min <= p_max <= 1");
        }
    }
};

struct GraphRecord {
    std::string id;
    Graph graph;
    std::string provenance;

    friend bool operator==(const GraphRecord&, const GraphRecord&) = default;
};

inline std::vector<Graph> graphs_of(const std::vector<GraphRecord>& records) {
    std::vector<Graph> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back(r.graph);
    }
    return out;
}

namespace detail {

inline std::string zero_padded(std::size_t i, int width) {
    std::string s = std::to_string(i);
    if (static_cast<int>(s.size()) < width) {
        s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    }
    return s;
}

} // namespace detail

/// One G(n, p) sample: every pair (u < v) in lexicographic order is kept
/// with probability p.
inline Graph sample_gnp(std::size_t n, double p, Rng& rng) {
    Graph g(n);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (uniform01(rng) < p) {
                g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
            }
        }
    }
    return g;
}

/// Record i draws n uniformly from [n_min, n_max] and p uniformly from
/// [p_min, p_max] using the stream (seed, i).
inline std::vector<GraphRecord> generate_er(const DatasetSpec& spec) {
    if (spec.kind != DatasetKind::erdos_renyi) {
        throw ConfigError("generate_er requires an erdos_renyi spec");
    }
    spec.validate();
    std::vector<GraphRecord> out;
    out.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        Rng rng = make_stream({spec.seed, i});
        const std::size_t n = spec.n_min + uniform_index(rng, spec.n_max - spec.n_min + 1);
        const double p = spec.p_min + (spec.p_max - spec.p_min) * uniform01(rng);
        out.push_back({"er-" + detail::zero_padded(i, 4), sample_gnp(n, p, rng),
                       "erdos_renyi n=" + std::to_string(n) + " p=" + format_double(p) +
                           " seed=" + std::to_string(spec.seed) + " index=" + std::to_string(i)});
    }
    return out;
}

/// The matrix is readable but cannot become a graph (e.g. not square).
class MatrixRejectedError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool parse_index(const std::string& tok, long long& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

inline bool parse_number(const std::string& tok) {
    double x = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string t; is >> t;) {
        out.push_back(t);
    }
    return out;
}

} // namespace detail

/// Sparsity pattern of a coordinate Matrix Market stream as an undirected
/// graph. Every stored off-diagonal entry (i, j) yields edge {i-1, j-1},
/// which also symmetrizes general matrices. Values are ignored.
inline Graph parse_matrix_market(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) {
        throw ParseError("empty file", 1);
    }
    ++line_no;
    const auto header = detail::split_ws(detail::lowercase(line));
    if (header.size() != 5 || header[0] != "%%matrixmarket") {
        throw ParseError("expected '%%MatrixMarket matrix coordinate <field> <symmetry>'", line_no);
    }
    if (header[1] != "matrix") {
        throw ParseError("unsupported object '" + header[1] + "'", line_no);
    }
    if (header[2] != "coordinate") {
        throw ParseError("unsupported format '" + header[2] + "', only coordinate is read", line_no);
    }
    std::size_t value_tokens = 0;
    if (header[3] == "pattern") {
        value_tokens = 0;
    } else if (header[3] == "real" || header[3] == "integer" || header[3] == "double") {
        value_tokens = 1;
    } else if (header[3] == "complex") {
        value_tokens = 2;
    } else {
        throw ParseError("unsupported field '" + header[3] + "'", line_no);
    }
    const std::string& symmetry = header[4];
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" &&
        symmetry != "hermitian") {
        throw ParseError("unsupported symmetry '" + symmetry + "'", line_no);
    }

    auto next_data_line = [&](std::vector<std::string>& toks) {
        while (std::getline(is, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '%') {
                continue;
            }
            toks = detail::split_ws(line);
            return true;
        }
        return false;
    };

    std::vector<std::string> toks;
    if (!next_data_line(toks)) {
        throw ParseError("missing size line", line_no);
    }
    long long rows = 0;
    long long cols = 0;
    long long nnz = 0;
    if (toks.size() != 3 || !detail::parse_index(toks[0], rows) ||
        !detail::parse_index(toks[1], cols) || !detail::parse_index(toks[2], nnz) || rows < 0 ||
        cols < 0 || nnz < 0) {
        throw ParseError("expected 'rows cols entries' size line", line_no);
    }
    if (rows != cols) {
        throw MatrixRejectedError("matrix is not square (" + std::to_string(rows) + " x " +
                                  std::to_string(cols) + ")");
    }
    Graph g(static_cast<std::size_t>(rows));
    for (long long k = 0; k < nnz; ++k) {
        if (!next_data_line(toks)) {
            throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                                 std::to_string(k),
                             line_no);
        }
        long long i = 0;
        long long j = 0;
        if (toks.size() != 2 + value_tokens || !detail::parse_index(toks[0], i) ||
            !detail::parse_index(toks[1], j)) {
            throw ParseError("malformed entry '" + line + "'", line_no);
        }
        for (std::size_t t = 2; t < toks.size(); ++t) {
            if (!detail::parse_number(toks[t])) {
                throw ParseError("malformed value '" + toks[t] + "'", line_no);
            }
        }
        if (i < 1 || j < 1 || i > rows || j > cols) {
            throw ParseError("index out of range in '" + line + "'", line_no);
        }
        if (i != j) {
            g.add_edge(static_cast<Vertex>(i - 1), static_cast<Vertex>(j - 1));
        }
    }
    if (next_data_line(toks)) {
        throw ParseError("more entries than declared", line_no);
    }
    return g;
}

inline GraphRecord load_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {path.stem().string(), parse_matrix_market(in), path.filename().string()};
}

/// Keeps records with n_min <= |V| <= n_max.
inline std::vector<GraphRecord> filter_square_sized(std::vector<GraphRecord> records,
                                                    std::size_t n_min, std::size_t n_max) {
    std::erase_if(records, [&](const GraphRecord& r) {
        const std::size_t n = r.graph.num_labels();
        return n < n_min || n > n_max;
    });
    return records;
}

struct DatasetSplit {
    std::vector<GraphRecord> train;
    std::vector<GraphRecord> val;
    std::vector<GraphRecord> test;
};

/// Seeded shuffle, then contiguous partition. Train and validation sizes
/// are rounded; the test split takes the remainder.
inline DatasetSplit split(std::vector<GraphRecord> records, std::array<double, 3> fractions,
                          std::uint64_t seed) {
    double sum = 0.0;
    for (double f : fractions) {
        if (!(f >= 0.0)) {
            throw ConfigError("split fractions must be non-negative");
        }
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
    Rng rng = make_stream({seed});
    shuffle(records, rng);
    const std::size_t n = records.size();
    const auto n_train =
        std::min(n, static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n))));
    const auto n_val = std::min(
        n - n_train, static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n))));
    DatasetSplit out;
    auto first = std::make_move_iterator(records.begin());
    out.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
    out.val.assign(first + static_cast<std::ptrdiff_t>(n_train),
                   first + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val),
                    std::make_move_iterator(records.end()));
    return out;
}

// Dataset file:
//
//   chordal-dataset 1 <count>
//   # id <id>
//   # provenance <text>
//   <edge-list block>
//   ...

inline constexpr int kDatasetFormatVersion = 1;

inline void save_dataset(std::ostream& os, const std::vector<GraphRecord>& records) {
    os << "chordal-dataset " << kDatasetFormatVersion << ' ' << records.size() << '\n';
    for (const auto& r : records) {
        os << "# id " << r.id << '\n' << "# provenance " << r.provenance << '\n';
        write_edge_list(os, r.graph);
    }
}

inline void save_dataset(const std::filesystem::path& path,
                         const std::vector<GraphRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    save_dataset(out, records);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

inline std::vector<GraphRecord> load_dataset(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) {
        throw ParseError("empty dataset file", 1);
    }
    ++line_no;
    const auto header = detail::split_ws(line);
    if (header.size() != 3 || header[0] != "chordal-dataset") {
        throw ParseError("expected 'chordal-dataset <version> <count>' header", line_no);
    }
    if (header[1] != std::to_string(kDatasetFormatVersion)) {
        throw VersionError("unsupported dataset version '" + header[1] + "'");
    }
    long long count = 0;
    if (!detail::parse_index(header[2], count) || count < 0) {
        throw ParseError("bad record count '" + header[2] + "'", line_no);
    }

    auto read_tagged = [&](const std::string& tag) {
        while (std::getline(is, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            const std::string prefix = "# " + tag;
            if (line.rfind(prefix, 0) != 0) {
                throw ParseError("expected '" + prefix + "' line", line_no);
            }
            std::string rest = line.substr(prefix.size());
            if (!rest.empty() && rest.front() == ' ') {
                rest.erase(0, 1);
            }
            return rest;
        }
        throw ParseError("unexpected end of dataset, missing '# " + tag + "'", line_no);
    };

    std::vector<GraphRecord> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long long k = 0; k < count; ++k) {
        GraphRecord r;
        r.id = read_tagged("id");
        r.provenance = read_tagged("provenance");
        r.graph = read_edge_list(is, line_no);
        out.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (out[i].id == out[j].id) {
                throw ParseError("duplicate record id '" + out[i].id + "'", 0);
            }
        }
    }
    return out;
}

inline std::vector<GraphRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return load_dataset(in);
}

} // namespace chordal
