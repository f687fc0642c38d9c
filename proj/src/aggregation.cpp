#include "semtype/aggregation.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "semtype/error.hpp"
#include "semtype/text_util.hpp"

namespace semtype {

namespace {

constexpr int kDecimals = 6;

std::optional<double> mean_of(double sum, std::size_t n) {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::string optional_field(const std::optional<double>& v, int decimals = kDecimals) {
    return v ? text::format_fixed(*v, decimals) : std::string();
}

}  // namespace

LabelFilter default_label_filter() { return {SentenceLabel::matching}; }

bool TypeMatrix::complete() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.has_value(); });
}

TypeMatrix heatmap_by_lexical_type(const MetricTable& metrics, const LabelFilter& filter) {
    if (filter.empty()) throw ValidationError("heatmap label filter must not be empty");
    std::array<TypeMatrix::Row, kTypeCount> sums{};
    TypeMatrix m;
    for (const auto& row : metrics.rows) {
        if (!filter.contains(row.label)) continue;
        const auto t = index_of(row.lexical_type);
        for (std::size_t c = 0; c < kTypeCount; ++c) sums[t][c] += row.ntp.p[c];
        ++m.counts[t];
    }
    for (std::size_t t = 0; t < kTypeCount; ++t) {
        if (m.counts[t] == 0) continue;
        TypeMatrix::Row r{};
        for (std::size_t c = 0; c < kTypeCount; ++c) r[c] = sums[t][c] / static_cast<double>(m.counts[t]);
        m.rows[t] = r;
    }
    return m;
}

std::array<SentenceTypeRow, kLabelCount> table_by_sentence_type(const MetricTable& metrics) {
    struct Acc {
        std::size_t n = 0;
        std::size_t n_c = 0;
        double l = 0.0, c = 0.0, other = 0.0, nte = 0.0;
    };
    std::array<Acc, kLabelCount> acc{};
    for (const auto& row : metrics.rows) {
        auto& a = acc[index_of(row.label)];
        ++a.n;
        a.l += row.ntmr_l;
        a.other += row.other_ratio;
        a.nte += row.nte;
        if (row.ntmr_c) {
            ++a.n_c;
            a.c += *row.ntmr_c;
        }
    }
    std::array<SentenceTypeRow, kLabelCount> out{};
    for (const auto label : kAllLabels) {
        const auto& a = acc[index_of(label)];
        auto& r = out[index_of(label)];
        r.label = label;
        r.count = a.n;
        r.ntmr_l = mean_of(a.l, a.n);
        r.ntmr_c = mean_of(a.c, a.n_c);
        r.other_ratio = mean_of(a.other, a.n);
        r.nte = mean_of(a.nte, a.n);
    }
    return out;
}

std::vector<WordRow> per_word_ntmr(const MetricTable& metrics, const Dataset& dataset, const LabelFilter& filter) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& row : metrics.rows) {
        if (!filter.contains(row.label)) continue;
        auto& [sum, n] = acc[dataset.at(row.id).lemma];
        sum += row.ntmr_l;
        ++n;
    }
    std::vector<WordRow> out;
    out.reserve(acc.size());
    for (const auto& [lemma, sn] : acc) {
        out.push_back({*dataset.lemma_type(lemma), lemma, sn.second, sn.first / static_cast<double>(sn.second)});
    }
    std::stable_sort(out.begin(), out.end(), [](const WordRow& a, const WordRow& b) {
        return index_of(a.lexical_type) < index_of(b.lexical_type);
    });
    return out;
}

NeighborWordDistribution neighbor_word_distribution(const NeighborGraph& graph, const Dataset& dataset,
                                                    const std::string& lemma, const std::vector<std::string>& peers,
                                                    const std::vector<SemanticType>& focus_types) {
    const auto it = dataset.lemma_index().find(lemma);
    if (it == dataset.lemma_index().end()) throw ValidationError("unknown lemma '" + lemma + "'");
    for (const auto& p : peers) {
        if (!dataset.lemma_type(p)) throw ValidationError("unknown peer lemma '" + p + "'");
    }

    NeighborWordDistribution out;
    out.lemma = lemma;
    std::vector<std::size_t> peer_counts(peers.size(), 0);
    std::array<std::size_t, kTypeCount> type_counts{};
    for (const auto rec : it->second) {
        const auto node = graph.index_of(dataset[rec].id);
        for (const auto& nb : graph.neighbors(node)) {
            const auto& target = dataset.at(graph.id(nb.node));
            ++out.edges;
            const auto p = std::find(peers.begin(), peers.end(), target.lemma);
            if (p != peers.end()) {
                ++peer_counts[static_cast<std::size_t>(p - peers.begin())];
            } else {
                ++type_counts[index_of(target.lexical_type)];
            }
        }
    }
    const double total = static_cast<double>(out.edges);
    for (std::size_t i = 0; i < peers.size(); ++i) {
        out.peers.emplace_back(peers[i], static_cast<double>(peer_counts[i]) / total);
    }
    std::size_t other = 0;
    for (std::size_t t = 0; t < kTypeCount; ++t) {
        out.by_type[t] = static_cast<double>(type_counts[t]) / total;
        if (std::find(focus_types.begin(), focus_types.end(), kAllTypes[t]) == focus_types.end()) {
            other += type_counts[t];
        }
    }
    out.other = static_cast<double>(other) / total;
    return out;
}

void write_heatmap_csv(const TypeMatrix& matrix, std::ostream& out) {
    out << "lexical_type";
    for (const auto t : kAllTypes) out << ',' << name(t);
    out << ",count\n";
    for (const auto t : kAllTypes) {
        const auto& row = matrix.rows[index_of(t)];
        out << name(t);
        for (std::size_t c = 0; c < kTypeCount; ++c) {
            out << ',';
            if (row) out << text::format_fixed((*row)[c], kDecimals);
        }
        out << ',' << matrix.counts[index_of(t)] << '\n';
    }
}

TypeMatrix read_heatmap_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty heatmap CSV");
    const auto header = text::split_csv_line(line);
    if (header.size() < kTypeCount + 1 || header[0] != "lexical_type") {
        throw ParseError("unexpected heatmap header", 1);
    }
    for (std::size_t c = 0; c < kTypeCount; ++c) {
        if (header[c + 1] != name(kAllTypes[c])) throw ParseError("heatmap columns out of canonical order", 1);
    }
    TypeMatrix m;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = text::split_csv_line(line);
        if (f.size() < kTypeCount + 1) throw ParseError("short heatmap row", line_no);
        try {
            const auto t = index_of(parse_semantic_type(f[0]));
            if (f.size() > kTypeCount + 1 && !f[kTypeCount + 1].empty()) {
                m.counts[t] = static_cast<std::size_t>(*text::parse_optional_double(f[kTypeCount + 1]));
            }
            if (f[1].empty()) continue;
            TypeMatrix::Row r{};
            for (std::size_t c = 0; c < kTypeCount; ++c) {
                const auto v = text::parse_optional_double(f[c + 1]);
                if (!v) throw ParseError("partially empty heatmap row");
                r[c] = *v;
            }
            m.rows[t] = r;
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return m;
}

void write_sentence_types_csv(const std::array<SentenceTypeRow, kLabelCount>& rows, std::ostream& out) {
    out << "label,count,ntmr_l,ntmr_c,other_ratio,nte\n";
    for (const auto& r : rows) {
        out << name(r.label) << ',' << r.count << ',' << optional_field(r.ntmr_l) << ','
            << optional_field(r.ntmr_c) << ',' << optional_field(r.other_ratio) << ',' << optional_field(r.nte)
            << '\n';
    }
}

void write_per_word_csv(const std::vector<WordRow>& rows, std::ostream& out) {
    out << "lexical_type,lemma,count,ntmr_l_pct\n";
    for (const auto& r : rows) {
        out << name(r.lexical_type) << ',' << r.lemma << ',' << r.count << ','
            << text::format_fixed(r.mean_ntmr_l * 100.0, 2) << '\n';
    }
}

void write_neighbor_words_csv(const NeighborWordDistribution& dist, const std::vector<SemanticType>& focus_types,
                              std::ostream& out) {
    out << "lemma,target,kind,fraction\n";
    for (const auto& [peer, frac] : dist.peers) {
        out << dist.lemma << ',' << peer << ",lemma," << text::format_fixed(frac, kDecimals) << '\n';
    }
    for (const auto t : kAllTypes) {
        out << dist.lemma << ',' << name(t) << ",type," << text::format_fixed(dist.by_type[index_of(t)], kDecimals)
            << '\n';
    }
    if (!focus_types.empty()) {
        out << dist.lemma << ",other,rollup," << text::format_fixed(dist.other, kDecimals) << '\n';
    }
}

}  // namespace semtype
