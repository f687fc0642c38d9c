// Command-line front end: graph construction, metrics, aggregate views,
// sentence-type comparisons, hierarchy induction and synthetic data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semtype/aggregation.hpp"
#include "semtype/dataset.hpp"
#include "semtype/embedding_store.hpp"
#include "semtype/error.hpp"
#include "semtype/hierarchy.hpp"
#include "semtype/knn_graph.hpp"
#include "semtype/stat_tests.hpp"
#include "semtype/synth.hpp"
#include "semtype/type_metrics.hpp"

namespace fs = std::filesystem;
using namespace semtype;

namespace {

struct CommonOptions {
    std::string dataset;
    std::vector<std::string> bundles;
    std::vector<std::string> graphs;
    std::vector<std::string> metrics;
    std::size_t k = 10;
    std::string out_dir = ".";
    std::vector<std::string> filter_labels{"matching"};
    bool allow_deficit = false;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool multi_source) {
    cmd->add_option("--dataset", o.dataset, "Annotation file (JSON lines)");
    auto* bundle = cmd->add_option("--bundle", o.bundles, "Embedding bundle directory");
    auto* graph = cmd->add_option("--graph", o.graphs, "Previously exported graph file");
    if (!multi_source) {
        bundle->expected(0, 1);
        graph->expected(0, 1);
    }
    cmd->add_option("--k", o.k, "Neighbors per node")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--filter-label", o.filter_labels, "Sentence labels admitted by per-type/per-word views")
        ->capture_default_str();
    cmd->add_flag("--allow-deficit", o.allow_deficit,
                  "Allow nodes with fewer than k candidates; NTP then divides by out-degree");
    cmd->add_option("--threads", o.threads, "Worker threads for graph construction (0 = all cores)");
}

Dataset require_dataset(const CommonOptions& o) {
    if (o.dataset.empty()) throw CLI::ValidationError("--dataset", "an annotation file is required");
    return parse_dataset(fs::path(o.dataset));
}

fs::path out_path(const CommonOptions& o, const std::string& file) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / file;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    std::cerr << "wrote " << path.string() << '\n';
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
    std::ostringstream s;
    fn(s);
    write_text(path, s.str());
}

NeighborGraph graph_from_bundle(const Dataset& dataset, const std::string& dir, const CommonOptions& o) {
    const auto bundle = load_bundle(dir);
    const auto corpus = align(bundle, dataset);
    return build_graph(corpus, GraphOptions{o.k, o.allow_deficit, o.threads});
}

/// Every graph named by --bundle or --graph, in that order.
std::vector<NeighborGraph> graphs_from(const Dataset& dataset, const CommonOptions& o) {
    std::vector<NeighborGraph> graphs;
    for (const auto& b : o.bundles) graphs.push_back(graph_from_bundle(dataset, b, o));
    for (const auto& g : o.graphs) graphs.push_back(read_graph(fs::path(g)));
    return graphs;
}

/// Metric CSV named after its graph, dropping the "metrics_" prefix the CLI writes.
MetricTable table_from_csv(const std::string& file) {
    auto table = read_metric_csv(fs::path(file));
    if (table.graph.rfind("metrics_", 0) == 0) table.graph.erase(0, 8);
    return table;
}

std::vector<MetricTable> tables_from(const Dataset* dataset, const CommonOptions& o) {
    std::vector<MetricTable> tables;
    if (dataset) {
        for (const auto& g : graphs_from(*dataset, o)) tables.push_back(compute_metrics(g, *dataset));
    }
    for (const auto& m : o.metrics) tables.push_back(table_from_csv(m));
    if (tables.empty()) throw CLI::ValidationError("sources", "give --bundle, --graph or --metrics");
    return tables;
}

LabelFilter parse_filter(const CommonOptions& o) {
    LabelFilter f;
    for (const auto& l : o.filter_labels) f.insert(parse_sentence_label(l));
    return f;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void print_summary(const Dataset& d) {
    const auto s = dataset_summary(d);
    std::cerr << "dataset: " << s.total << " records";
    for (const auto l : kAllLabels) std::cerr << ", " << name(l) << "=" << s.per_label[index_of(l)];
    std::cerr << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighbor-type analysis of contextual embeddings"};
    app.require_subcommand(1);

    CommonOptions build_opts, metric_opts, agg_opts, cmp_opts, hier_opts;

    auto* build_cmd = app.add_subcommand("build-graph", "Build and export the kNN graph of a bundle");
    add_common(build_cmd, build_opts, false);

    auto* metrics_cmd = app.add_subcommand("metrics", "Per-instance NTP/NTMR/NTE table");
    add_common(metrics_cmd, metric_opts, true);

    auto* agg_cmd = app.add_subcommand("aggregate", "Heatmap, sentence-type and per-word views");
    add_common(agg_cmd, agg_opts, true);
    agg_cmd->add_option("--metrics", agg_opts.metrics, "Metric CSV instead of --bundle/--graph")->expected(0, 1);
    std::string lemma, peers, focus;
    agg_cmd->add_option("--lemma", lemma, "Also report where this lemma's edges land (needs a graph)");
    agg_cmd->add_option("--peers", peers, "Comma-separated peer lemmas for --lemma");
    agg_cmd->add_option("--focus-types", focus, "Comma-separated types kept outside the 'other' rollup");

    auto* cmp_cmd = app.add_subcommand("compare", "Mann-Whitney U comparisons of NTE across labels");
    add_common(cmp_cmd, cmp_opts, true);
    cmp_cmd->add_option("--metrics", cmp_opts.metrics, "Metric CSVs (graph name = file stem)");

    auto* hier_cmd = app.add_subcommand("hierarchy", "Induce a type hierarchy from the NTP heatmap");
    add_common(hier_cmd, hier_opts, false);
    std::string heatmap_file;
    std::size_t cut = 4;
    hier_cmd->add_option("--heatmap", heatmap_file, "Heatmap CSV instead of --bundle/--graph");
    hier_cmd->add_option("--cut", cut, "Clusters to print")->capture_default_str()->check(CLI::Range(1, 10));

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset and plain/masked bundles");
    SynthConfig sc;
    std::string synth_out = "synth";
    synth_cmd->add_option("--seed", sc.seed)->capture_default_str();
    synth_cmd->add_option("--dim", sc.dim)->capture_default_str();
    synth_cmd->add_option("--lemmas-per-type", sc.lemmas_per_type)->capture_default_str();
    synth_cmd->add_option("--instances-per-lemma", sc.instances_per_lemma)->capture_default_str();
    synth_cmd->add_option("--within-type-sigma", sc.within_type_sigma)->capture_default_str();
    synth_cmd->add_option("--coercion-fraction", sc.coercion_fraction)->capture_default_str();
    synth_cmd->add_option("--unrestricted-fraction", sc.unrestricted_fraction)->capture_default_str();
    synth_cmd->add_option("--coercion-mix", sc.coercion_mix)->capture_default_str();
    synth_cmd->add_option("--masked-context-sigma", sc.masked_context_sigma)->capture_default_str();
    synth_cmd->add_option("--model-id", sc.model_id)->capture_default_str();
    synth_cmd->add_option("--out-dir", synth_out)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build_cmd) {
            const auto dataset = require_dataset(build_opts);
            print_summary(dataset);
            if (build_opts.bundles.empty()) throw CLI::ValidationError("--bundle", "a bundle is required");
            const auto graph = graph_from_bundle(dataset, build_opts.bundles.front(), build_opts);
            write_with(out_path(build_opts, "graph_" + graph.variant().graph_name() + ".jsonl"),
                       [&](std::ostream& s) { write_graph(graph, s); });
        } else if (*metrics_cmd) {
            const auto dataset = require_dataset(metric_opts);
            for (const auto& table : tables_from(&dataset, metric_opts)) {
                write_with(out_path(metric_opts, "metrics_" + table.graph + ".csv"),
                           [&](std::ostream& s) { write_metric_csv(table, s); });
                write_metric_meta(table, out_path(metric_opts, "metrics_" + table.graph + ".meta.json"));
            }
        } else if (*agg_cmd) {
            std::optional<Dataset> dataset;
            if (!agg_opts.dataset.empty()) dataset = require_dataset(agg_opts);
            if (!dataset) throw CLI::ValidationError("--dataset", "an annotation file is required");
            const auto filter = parse_filter(agg_opts);
            std::vector<NeighborGraph> graphs = graphs_from(*dataset, agg_opts);
            std::vector<MetricTable> tables;
            for (const auto& g : graphs) tables.push_back(compute_metrics(g, *dataset));
            for (const auto& m : agg_opts.metrics) tables.push_back(table_from_csv(m));
            if (tables.empty()) throw CLI::ValidationError("sources", "give --bundle, --graph or --metrics");
            for (const auto& t : tables) {
                write_with(out_path(agg_opts, "heatmap_" + t.graph + ".csv"),
                           [&](std::ostream& s) { write_heatmap_csv(heatmap_by_lexical_type(t, filter), s); });
                write_with(out_path(agg_opts, "sentence_types_" + t.graph + ".csv"),
                           [&](std::ostream& s) { write_sentence_types_csv(table_by_sentence_type(t), s); });
                write_with(out_path(agg_opts, "per_word_" + t.graph + ".csv"),
                           [&](std::ostream& s) { write_per_word_csv(per_word_ntmr(t, *dataset, filter), s); });
            }
            if (!lemma.empty()) {
                if (graphs.empty()) throw CLI::ValidationError("--lemma", "needs --bundle or --graph");
                std::vector<SemanticType> focus_types;
                for (const auto& f : split_list(focus)) focus_types.push_back(parse_semantic_type(f));
                for (const auto& g : graphs) {
                    const auto dist = neighbor_word_distribution(g, *dataset, lemma, split_list(peers), focus_types);
                    write_with(out_path(agg_opts, "neighbor_words_" + lemma + "_" + g.variant().graph_name() + ".csv"),
                               [&](std::ostream& s) { write_neighbor_words_csv(dist, focus_types, s); });
                }
            }
        } else if (*cmp_cmd) {
            std::optional<Dataset> dataset;
            if (!cmp_opts.dataset.empty()) dataset = require_dataset(cmp_opts);
            const auto tables = tables_from(dataset ? &*dataset : nullptr, cmp_opts);
            const auto report = compare_sentence_types(tables);
            write_with(out_path(cmp_opts, "comparison.csv"), [&](std::ostream& s) { write_comparison_csv(report, s); });
            write_with(out_path(cmp_opts, "means.csv"), [&](std::ostream& s) { write_means_csv(report, s); });
            write_comparison_csv(report, std::cout);
        } else if (*hier_cmd) {
            TypeMatrix matrix;
            std::string graph_name;
            if (!heatmap_file.empty()) {
                std::ifstream in(heatmap_file);
                if (!in) throw IoError("cannot open " + heatmap_file);
                matrix = read_heatmap_csv(in);
                graph_name = fs::path(heatmap_file).stem().string();
                if (graph_name.rfind("heatmap_", 0) == 0) graph_name.erase(0, 8);
            } else {
                const auto dataset = require_dataset(hier_opts);
                const auto tables = tables_from(&dataset, hier_opts);
                matrix = heatmap_by_lexical_type(tables.front(), parse_filter(hier_opts));
                graph_name = tables.front().graph;
            }
            const auto dendrogram = induce_hierarchy(matrix);
            write_text(out_path(hier_opts, "hierarchy_" + graph_name + ".json"), hierarchy_json(dendrogram));
            for (const auto& cluster : dendrogram.cut(cut)) {
                std::string line;
                for (const auto t : cluster) line += (line.empty() ? "" : " ") + std::string(name(t));
                std::cout << "{" << line << "}\n";
            }
        } else if (*synth_cmd) {
            const auto corpus = generate(sc);
            fs::create_directories(synth_out);
            serialize_dataset(corpus.dataset, fs::path(synth_out) / "dataset.jsonl");
            write_bundle(corpus.plain, fs::path(synth_out) / "plain");
            write_bundle(corpus.masked, fs::path(synth_out) / "masked");
            print_summary(corpus.dataset);
            std::cerr << "wrote " << synth_out << "/{dataset.jsonl,plain,masked}\n";
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
