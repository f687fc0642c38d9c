#include "semtype/type_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "semtype/error.hpp"
#include "semtype/text_util.hpp"

namespace semtype {

namespace {

std::string csv_header() {
    std::string h = "id,label,lexical_type,contextual_type,ntmr_l,ntmr_c,other_ratio,nte";
    for (const auto t : kAllTypes) h += ",ntp_" + std::string(name(t));
    return h;
}

constexpr int kDecimals = 6;

// Fills the columns that are functions of the NTP and the record's types.
void derive(MetricRow& row) {
    row.ntmr_l = row.ntp[row.lexical_type];
    row.ntmr_c.reset();
    if (row.contextual_type && *row.contextual_type != row.lexical_type) {
        row.ntmr_c = row.ntp[*row.contextual_type];
    }
    row.other_ratio = std::max(0.0, 1.0 - row.ntmr_l - row.ntmr_c.value_or(0.0));
    row.nte = nte(row.ntp);
}

// Slack for comparing a stored 6-decimal column with its re-derived value.
constexpr double kStoredTolerance = 1e-6;

}  // namespace

TypeDistribution ntp(const NeighborGraph& graph, const Dataset& dataset, std::size_t node) {
    std::array<std::size_t, kTypeCount> counts{};
    for (const auto& nb : graph.neighbors(node)) {
        const auto rec = dataset.find(graph.id(nb.node));
        if (!rec) throw ValidationError("neighbor '" + graph.id(nb.node) + "' not found in dataset");
        ++counts[index_of(dataset[*rec].lexical_type)];
    }
    const double denom = static_cast<double>(graph.denominator(node));
    TypeDistribution dist;
    for (std::size_t t = 0; t < kTypeCount; ++t) dist.p[t] = static_cast<double>(counts[t]) / denom;
    return dist;
}

double nte(const TypeDistribution& dist) {
    double h = 0.0;
    for (const double p : dist.p) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

MetricRow metric_row(const NeighborGraph& graph, const Dataset& dataset, std::size_t node) {
    const auto& rec = dataset.at(graph.id(node));
    MetricRow row;
    row.id = rec.id;
    row.label = rec.label;
    row.lexical_type = rec.lexical_type;
    row.contextual_type = rec.contextual_type;
    row.ntp = ntp(graph, dataset, node);
    derive(row);
    return row;
}

MetricTable compute_metrics(const NeighborGraph& graph, const Dataset& dataset, std::string graph_name) {
    MetricTable table;
    table.graph = graph_name.empty() ? graph.variant().graph_name() : std::move(graph_name);
    table.k = graph.k();
    table.allow_deficit = graph.allow_deficit();
    table.rows.reserve(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) table.rows.push_back(metric_row(graph, dataset, i));
    return table;
}

void write_metric_csv(const MetricTable& table, std::ostream& out) {
    out << csv_header() << '\n';
    for (const auto& r : table.rows) {
        if (r.id.find_first_of(",\n\"") != std::string::npos) {
            throw ValidationError("id '" + r.id + "' cannot be written to CSV");
        }
        std::string line = r.id;
        line += ',' + std::string(name(r.label));
        line += ',' + std::string(name(r.lexical_type));
        line += ',';
        if (r.contextual_type) line += name(*r.contextual_type);
        line += ',' + text::format_fixed(r.ntmr_l, kDecimals);
        line += ',';
        if (r.ntmr_c) line += text::format_fixed(*r.ntmr_c, kDecimals);
        line += ',' + text::format_fixed(r.other_ratio, kDecimals);
        line += ',' + text::format_fixed(r.nte, kDecimals);
        for (const double p : r.ntp.p) line += ',' + text::format_fixed(p, kDecimals);
        out << line << '\n';
    }
}

void write_metric_csv(const MetricTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_metric_csv(table, out);
    if (!out) throw IoError("write failed for " + path.string());
}

MetricTable read_metric_csv(std::istream& in) {
    MetricTable table;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError("empty metric CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw ParseError("unexpected metric CSV header", 1);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = text::split_csv_line(line);
        if (f.size() != 8 + kTypeCount) {
            throw ParseError("expected " + std::to_string(8 + kTypeCount) + " fields, got " +
                             std::to_string(f.size()), line_no);
        }
        try {
            MetricRow r;
            r.id = f[0];
            r.label = parse_sentence_label(f[1]);
            r.lexical_type = parse_semantic_type(f[2]);
            if (!f[3].empty()) r.contextual_type = parse_semantic_type(f[3]);
            auto required = [&](const std::string& field) {
                const auto v = text::parse_optional_double(field);
                if (!v) throw ParseError("missing required value");
                return *v;
            };
            const double ntmr_l = required(f[4]);
            const auto ntmr_c = text::parse_optional_double(f[5]);
            const double other_ratio = required(f[6]);
            const double stored_nte = required(f[7]);
            for (std::size_t t = 0; t < kTypeCount; ++t) r.ntp.p[t] = required(f[8 + t]);
            // The NTP columns are authoritative; the rest are re-derived so
            // aggregates do not inherit the rounding of the stored columns.
            derive(r);
            const auto close = [](double a, double b) { return std::abs(a - b) <= kStoredTolerance; };
            if (ntmr_c.has_value() != r.ntmr_c.has_value() || (ntmr_c && !close(*ntmr_c, *r.ntmr_c)) ||
                !close(ntmr_l, r.ntmr_l) || !close(other_ratio, r.other_ratio) || !close(stored_nte, r.nte)) {
                throw ParseError("metric columns disagree with the NTP columns");
            }
            table.rows.push_back(std::move(r));
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return table;
}

MetricTable read_metric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    auto table = read_metric_csv(in);
    table.graph = path.stem().string();
    return table;
}

void write_metric_meta(const MetricTable& table, const std::filesystem::path& path) {
    nlohmann::ordered_json meta;
    meta["graph"] = table.graph;
    meta["k"] = table.k;
    meta["allow_deficit"] = table.allow_deficit;
    meta["ntp_denominator"] = table.allow_deficit ? "out_degree" : "k";
    meta["entropy_base"] = kEntropyBase;
    meta["neighbor_type"] = "lexical";
    meta["tie_rule"] = kTieRule;
    meta["rows"] = table.rows.size();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << meta.dump(2) << '\n';
}

}  // namespace semtype
