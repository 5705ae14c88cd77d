// chordal: datasets, orderings, training and landscape sweeps from the shell.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chordal/data.hpp"
#include "chordal/gnn.hpp"
#include "chordal/graph.hpp"
#include "chordal/landscape.hpp"
#include "chordal/metrics.hpp"
#include "chordal/train.hpp"

namespace fs = std::filesystem;
using namespace chordal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Bad flag values. Reported with the flag name and exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
T parse_number(const std::string& flag, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw UsageError(flag + ": '" + text + "' is not a number");
    }
    return value;
}

template <class T>
std::pair<T, T> parse_range(const std::string& flag, const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const T v = parse_number<T>(flag, text);
        return {v, v};
    }
    const T lo = parse_number<T>(flag, text.substr(0, colon));
    const T hi = parse_number<T>(flag, text.substr(colon + 1));
    if (hi < lo) {
        throw UsageError(flag + ": range '" + text + "' has lo > hi");
    }
    return {lo, hi};
}

std::array<double, 3> parse_split(const std::string& flag, const std::string& text) {
    std::array<double, 3> out{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto colon = text.find(':', start);
        if ((colon == std::string::npos) != (i == 2)) {
            throw UsageError(flag + ": expected train:val:test, got '" + text + "'");
        }
        out[i] = parse_number<double>(flag, text.substr(start, colon - start));
        start = colon + 1;
    }
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create directory " + dir.string());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

// Resolved options as a config file: `chordal --config manifest.txt <cmd>`
// reruns the command.
void write_manifest(const fs::path& dir, const CLI::App& sub) {
    std::ostringstream os;
    os << "# chordal manifest\n[" << sub.get_name() << "]\n" << sub.config_to_str(true, false);
    write_text(dir / "manifest.txt", os.str());
}

Graph load_graph(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    if (path.extension() == ".mtx") {
        return parse_matrix_market(in);
    }
    return read_edge_list(in);
}

GnnParams load_params(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_params(in);
}

std::vector<std::string> ids_of(const std::vector<GraphRecord>& records) {
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const auto& r : records) {
        ids.push_back(r.id);
    }
    return ids;
}

void save_splits(const fs::path& out, const std::vector<GraphRecord>& records,
                 const std::string& flag, const std::string& text, std::uint64_t seed) {
    if (text.empty()) {
        return;
    }
    const auto parts = split(records, parse_split(flag, text), seed);
    save_dataset(out / "train.txt", parts.train);
    save_dataset(out / "val.txt", parts.val);
    save_dataset(out / "test.txt", parts.test);
}

// --- subcommands -----------------------------------------------------------

struct GenerateOpts {
    std::string kind = "er";
    std::size_t count = 10;
    std::string n = "20:50";
    std::string p = "0.1:0.3";
    std::uint64_t seed = 0;
    std::string split;
    std::string out = "data";
};

int run_generate(const GenerateOpts& o, const CLI::App& sub) {
    if (o.kind != "er" && o.kind != "erdos_renyi") {
        throw UsageError("--kind: only 'er' can be generated (use ingest for Matrix Market)");
    }
    DatasetSpec spec;
    spec.count = o.count;
    std::tie(spec.n_min, spec.n_max) = parse_range<std::size_t>("--n", o.n);
    std::tie(spec.p_min, spec.p_max) = parse_range<double>("--p", o.p);
    if (spec.n_min < 1) {
        throw UsageError("--n: sizes must be >= 1");
    }
    if (spec.p_min < 0.0 || spec.p_max > 1.0) {
        throw UsageError("--p: probabilities must lie in [0, 1]");
    }
    spec.seed = o.seed;
    const auto records = generate_er(spec);
    const fs::path out = o.out;
    ensure_dir(out);
    save_dataset(out / "dataset.txt", records);
    save_splits(out, records, "--split", o.split, o.seed);
    write_manifest(out, sub);
    std::cout << "wrote " << records.size() << " graphs to " << (out / "dataset.txt").string()
              << '\n';
    return kExitOk;
}

struct IngestOpts {
    std::string source;
    std::string n = "1:1000000";
    std::uint64_t seed = 0;
    std::string split;
    std::string out = "data";
};

int run_ingest(const IngestOpts& o, const CLI::App& sub) {
    const auto [n_min, n_max] = parse_range<std::size_t>("--n", o.n);
    const fs::path source = o.source;
    std::error_code ec;
    if (!fs::is_directory(source, ec)) {
        throw IoError("cannot read directory " + source.string());
    }
    std::vector<fs::path> files;
    for (fs::directory_iterator it(source, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".mtx") {
            files.push_back(it->path());
        }
    }
    if (ec) {
        throw IoError("cannot read directory " + source.string() + ": " + ec.message());
    }
    std::sort(files.begin(), files.end());

    std::vector<GraphRecord> records;
    std::ostringstream skipped;
    std::size_t num_skipped = 0;
    auto skip = [&](const fs::path& f, const std::string& why) {
        skipped << f.filename().string() << '\t' << why << '\n';
        ++num_skipped;
    };
    for (const auto& f : files) {
        try {
            GraphRecord rec = load_matrix_market(f);
            const std::size_t n = rec.graph.num_labels();
            if (n < n_min || n > n_max) {
                skip(f, "size " + std::to_string(n) + " outside [" + std::to_string(n_min) + ", " +
                            std::to_string(n_max) + "]");
                continue;
            }
            records.push_back(std::move(rec));
        } catch (const MatrixRejectedError& e) {
            skip(f, e.what());
        } catch (const ParseError& e) {
            skip(f, std::string("malformed: ") + e.what());
        }
    }
    if (files.empty()) {
        std::cerr << "warning: no .mtx files in " << source.string() << '\n';
    }
    const fs::path out = o.out;
    ensure_dir(out);
    save_dataset(out / "dataset.txt", records);
    write_text(out / "skipped.txt", skipped.str());
    save_splits(out, records, "--split", o.split, o.seed);
    write_manifest(out, sub);
    std::cout << "ingested " << records.size() << " graphs, skipped " << num_skipped << '\n';
    return kExitOk;
}

struct TrainOpts {
    std::string train;
    std::string val;
    std::size_t epochs = 20;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    std::string behavior = "on_policy";
    std::vector<std::size_t> dims{1, 8, 1};
    std::size_t checkpoint_every = 1;
    std::size_t eval_repeats = 5;
    std::string optimizer = "sgd";
    std::string out = "run";
};

int run_train(const TrainOpts& o, const CLI::App& sub) {
    TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.lr;
    cfg.seed = o.seed;
    cfg.behavior_mode = parse_behavior_mode(o.behavior);
    cfg.layer_dims = o.dims;
    cfg.checkpoint_every = o.checkpoint_every;
    cfg.eval_repeats = o.eval_repeats;
    cfg.optimizer = parse_optimizer(o.optimizer);
    cfg.validate();

    const auto train_graphs = graphs_of(load_dataset(fs::path(o.train)));
    const auto val_graphs =
        o.val.empty() ? std::vector<Graph>{} : graphs_of(load_dataset(fs::path(o.val)));

    const fs::path out = o.out;
    ensure_dir(out);
    write_manifest(out, sub);
    const auto result = train(train_graphs, val_graphs, cfg, [](const EpochRecord& r) {
        std::cout << "epoch " << r.epoch << ' ' << r.split << " kl=" << format_double(r.avg_kl_loss)
                  << " fill gnn=" << format_double(r.avg_fillin_gnn)
                  << " mindeg=" << format_double(r.avg_fillin_mindeg)
                  << " uniform=" << format_double(r.avg_fillin_uniform) << '\n';
    });

    std::ostringstream history;
    write_history_csv(history, result.history);
    write_text(out / "history.csv", history.str());
    write_text(out / "params.txt", to_params_text(result.params));
    if (!result.history.checkpoints.empty()) {
        ensure_dir(out / "checkpoints");
        for (const auto& c : result.history.checkpoints) {
            char name[32];
            std::snprintf(name, sizeof name, "epoch-%04zu.txt", c.epoch);
            write_text(out / "checkpoints" / name, to_params_text(c.params));
        }
    }
    return kExitOk;
}

struct EvalOpts {
    std::string dataset;
    std::string params;
    std::size_t repeats = 5;
    std::uint64_t seed = 0;
    std::string out = "eval";
};

int run_eval(const EvalOpts& o, const CLI::App& sub) {
    if (o.repeats < 1) {
        throw UsageError("--repeats: must be >= 1");
    }
    const auto params = load_params(o.params);
    const auto records = load_dataset(fs::path(o.dataset));
    if (records.empty()) {
        throw ConfigError("dataset " + o.dataset + " is empty");
    }
    const auto graphs = graphs_of(records);
    const auto ids = ids_of(records);
    const auto rep =
        evaluate(fs::path(o.dataset).stem().string(), graphs, ids, params, o.repeats, o.seed);

    const fs::path out = o.out;
    ensure_dir(out);
    std::ostringstream report;
    write_report_csv(report, rep);
    write_text(out / "report.csv", report.str());
    std::ostringstream per_graph;
    write_per_graph_csv(per_graph, rep);
    write_text(out / "per_graph.csv", per_graph.str());
    write_manifest(out, sub);
    print_report_table(std::cout, rep);
    return kExitOk;
}

struct OrderOpts {
    std::string graph;
    std::string policy = "mindeg";
    std::string params;
    std::uint64_t seed = 0;
    std::string out;
};

int run_order(const OrderOpts& o, const CLI::App& sub) {
    const PolicyKind kind = parse_policy_kind(o.policy);
    std::optional<GnnParams> params;
    if (kind == PolicyKind::gnn) {
        if (o.params.empty()) {
            throw UsageError("--params: required with --policy gnn");
        }
        params = load_params(o.params);
    }
    const Graph g = load_graph(o.graph);
    if (g.empty()) {
        throw EmptyGraphError();
    }
    Rng rng = make_stream({o.seed});
    const auto t = rollout(g, make_policy(kind, params ? &*params : nullptr), rng);
    const auto ordering = t.ordering();
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        std::cout << (i ? " " : "") << ordering[i];
    }
    std::cout << "\nfill-in " << t.total_cost << '\n';
    if (!o.out.empty()) {
        const fs::path out = o.out;
        ensure_dir(out);
        std::ostringstream csv;
        write_trajectory_csv_header(csv);
        write_trajectory_csv(csv, fs::path(o.graph).stem().string(), t);
        write_text(out / "trajectory.csv", csv.str());
        write_manifest(out, sub);
    }
    return kExitOk;
}

struct LandscapeOpts {
    std::string dataset;
    std::string w1 = "-2:2";
    std::string w2 = "-2:2";
    double step = 0.25;
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
    std::string out = "landscape";
};

int run_landscape(const LandscapeOpts& o, const CLI::App& sub) {
    const auto [w1_lo, w1_hi] = parse_range<double>("--w1", o.w1);
    const auto [w2_lo, w2_hi] = parse_range<double>("--w2", o.w2);
    if (!(o.step > 0.0)) {
        throw UsageError("--step: must be > 0");
    }
    if (o.repeats < 1) {
        throw UsageError("--repeats: must be >= 1");
    }
    const auto graphs = graphs_of(load_dataset(fs::path(o.dataset)));
    if (graphs.empty()) {
        throw ConfigError("dataset " + o.dataset + " is empty");
    }
    const auto w1 = grid_values(w1_lo, w1_hi, o.step);
    const auto w2 = grid_values(w2_lo, w2_hi, o.step);
    const auto grid = sweep(graphs, w1, w2, o.repeats, o.seed);

    const fs::path out = o.out;
    ensure_dir(out);
    std::ostringstream csv;
    write_grid_csv(csv, grid);
    write_text(out / "grid.csv", csv.str());
    write_manifest(out, sub);
    std::cout << "wrote " << w1.size() * w2.size() << " grid points, min-degree fill-in "
              << format_double(grid.baseline_fill) << '\n';
    return kExitOk;
}

struct CheckOpts {
    std::string graph;
    std::string ordering;
    std::string out;
};

std::vector<Vertex> read_ordering(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<Vertex> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(parse_number<Vertex>("--ordering", tok));
    }
    return out;
}

int run_check(const CheckOpts& o, const CLI::App& sub) {
    Graph g = load_graph(o.graph);
    if (!o.ordering.empty()) {
        g = chordal_extension(g, read_ordering(o.ordering)).extension;
    }
    const bool chordal = is_chordal(g);
    std::cout << (chordal ? "chordal" : "not chordal") << '\n';
    if (!o.out.empty()) {
        const fs::path out = o.out;
        ensure_dir(out);
        write_text(out / "result.txt", std::string("chordal = ") + (chordal ? "true" : "false") +
                                           "\n");
        write_manifest(out, sub);
    }
    return chordal ? kExitOk : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chordal extensions via elimination orderings and learned policies"};
    app.set_config("--config", "", "TOML/INI file with one [section] per command");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    GenerateOpts gen;
    auto* generate = app.add_subcommand("generate", "Sample an Erdos-Renyi dataset");
    generate->add_option("--kind", gen.kind, "Graph family (er)");
    generate->add_option("--count", gen.count, "Number of graphs");
    generate->add_option("--n", gen.n, "Vertex count range lo:hi");
    generate->add_option("--p", gen.p, "Edge probability range lo:hi");
    generate->add_option("--seed", gen.seed, "Seed");
    generate->add_option("--split", gen.split, "Also write train:val:test fractions");
    generate->add_option("--out", gen.out, "Output directory");

    IngestOpts ing;
    auto* ingest = app.add_subcommand("ingest", "Read a directory of Matrix Market files");
    ingest->add_option("--source", ing.source, "Directory of .mtx files")->required();
    ingest->add_option("--n", ing.n, "Accepted size range lo:hi");
    ingest->add_option("--seed", ing.seed, "Seed for --split");
    ingest->add_option("--split", ing.split, "Also write train:val:test fractions");
    ingest->add_option("--out", ing.out, "Output directory");

    TrainOpts tr;
    auto* train_cmd = app.add_subcommand("train", "Train a GNN policy by on-policy imitation");
    train_cmd->add_option("--train", tr.train, "Training dataset file")->required();
    train_cmd->add_option("--val", tr.val, "Validation dataset file");
    train_cmd->add_option("--epochs", tr.epochs, "Epochs");
    train_cmd->add_option("--lr", tr.lr, "Learning rate");
    train_cmd->add_option("--seed", tr.seed, "Seed");
    train_cmd->add_option("--behavior", tr.behavior, "on_policy or expert");
    train_cmd->add_option("--dims", tr.dims, "Layer widths, e.g. 1,8,1")->delimiter(',');
    train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "Epochs between checkpoints");
    train_cmd->add_option("--eval-repeats", tr.eval_repeats, "Rollouts per graph for fill-in");
    train_cmd->add_option("--optimizer", tr.optimizer, "sgd or adam");
    train_cmd->add_option("--out", tr.out, "Output directory");

    EvalOpts ev;
    auto* eval = app.add_subcommand("eval", "Evaluate parameters on a dataset");
    eval->add_option("--dataset", ev.dataset, "Dataset file")->required();
    eval->add_option("--params", ev.params, "Parameter file")->required();
    eval->add_option("--repeats", ev.repeats, "Rollouts per graph");
    eval->add_option("--seed", ev.seed, "Seed");
    eval->add_option("--out", ev.out, "Output directory");

    OrderOpts ord;
    auto* order = app.add_subcommand("order", "Print an elimination ordering and its fill-in");
    order->add_option("--graph", ord.graph, "Edge list or .mtx file")->required();
    order->add_option("--policy", ord.policy, "mindeg, uniform or gnn");
    order->add_option("--params", ord.params, "Parameter file for --policy gnn");
    order->add_option("--seed", ord.seed, "Seed");
    order->add_option("--out", ord.out, "Optional directory for trajectory.csv");

    LandscapeOpts ls;
    auto* landscape = app.add_subcommand("landscape", "Sweep the two-weight toy network");
    landscape->add_option("--dataset", ls.dataset, "Dataset file")->required();
    landscape->add_option("--w1", ls.w1, "w1 range lo:hi");
    landscape->add_option("--w2", ls.w2, "w2 range lo:hi");
    landscape->add_option("--step", ls.step, "Grid step");
    landscape->add_option("--repeats", ls.repeats, "Rollouts per graph");
    landscape->add_option("--seed", ls.seed, "Seed");
    landscape->add_option("--out", ls.out, "Output directory");

    CheckOpts chk;
    auto* check = app.add_subcommand("check", "Exit 0 if the graph (or its extension) is chordal");
    check->add_option("--graph", chk.graph, "Edge list or .mtx file")->required();
    check->add_option("--ordering", chk.ordering, "Check the extension under this ordering");
    check->add_option("--out", chk.out, "Optional output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*generate) {
            return run_generate(gen, *generate);
        }
        if (*ingest) {
            return run_ingest(ing, *ingest);
        }
        if (*train_cmd) {
            return run_train(tr, *train_cmd);
        }
        if (*eval) {
            return run_eval(ev, *eval);
        }
        if (*order) {
            return run_order(ord, *order);
        }
        if (*landscape) {
            return run_landscape(ls, *landscape);
        }
        if (*check) {
            return run_check(chk, *check);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        // Malformed input files.
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const VersionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
