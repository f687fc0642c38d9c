#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semtype/dataset.hpp"
#include "semtype/knn_graph.hpp"
#include "semtype/type_metrics.hpp"

namespace semtype {

using LabelFilter = std::set<SentenceLabel>;

/// {matching}: the default filter for per-type and per-word views.
LabelFilter default_label_filter();

/// Rows: lexical type of the source instances. Columns: neighbor type.
/// A row is empty when no instance of that type passed the filter.
struct TypeMatrix {
    using Row = std::array<double, kTypeCount>;
    std::array<std::optional<Row>, kTypeCount> rows{};
    std::array<std::size_t, kTypeCount> counts{};

    bool complete() const noexcept;
    double at(SemanticType row, SemanticType col) const { return rows[index_of(row)].value()[index_of(col)]; }
};

/// Row t = unweighted mean NTP over instances with lexical type t whose label
/// passes the filter. Throws ValidationError on an empty filter.
TypeMatrix heatmap_by_lexical_type(const MetricTable& metrics, const LabelFilter& filter = default_label_filter());

struct SentenceTypeRow {
    SentenceLabel label = SentenceLabel::matching;
    std::size_t count = 0;
    std::optional<double> ntmr_l;
    std::optional<double> ntmr_c;  // mean over rows where present
    std::optional<double> other_ratio;
    std::optional<double> nte;
};

/// One row per label in canonical label order; means are unweighted per instance.
std::array<SentenceTypeRow, kLabelCount> table_by_sentence_type(const MetricTable& metrics);

struct WordRow {
    SemanticType lexical_type = SemanticType::animal;
    std::string lemma;
    std::size_t count = 0;
    double mean_ntmr_l = 0.0;
};

/// Mean NTMR_L per lemma, ordered by canonical type, then lemma.
std::vector<WordRow> per_word_ntmr(const MetricTable& metrics, const Dataset& dataset,
                                   const LabelFilter& filter = default_label_filter());

/// Where the out-edges of a lemma's instances land: first on the named peer
/// lemmas, then (for the remaining edges) on each neighbor lexical type.
struct NeighborWordDistribution {
    std::string lemma;
    std::size_t edges = 0;
    std::vector<std::pair<std::string, double>> peers;
    std::array<double, kTypeCount> by_type{};
    /// Residual mass on types outside the requested focus types.
    double other = 0.0;
};

/// Throws ValidationError for a lemma or peer missing from the dataset.
NeighborWordDistribution neighbor_word_distribution(const NeighborGraph& graph, const Dataset& dataset,
                                                    const std::string& lemma,
                                                    const std::vector<std::string>& peers = {},
                                                    const std::vector<SemanticType>& focus_types = {});

void write_heatmap_csv(const TypeMatrix& matrix, std::ostream& out);
TypeMatrix read_heatmap_csv(std::istream& in);
void write_sentence_types_csv(const std::array<SentenceTypeRow, kLabelCount>& rows, std::ostream& out);
/// NTMR_L rendered as a percentage with 2 decimals.
void write_per_word_csv(const std::vector<WordRow>& rows, std::ostream& out);
void write_neighbor_words_csv(const NeighborWordDistribution& dist, const std::vector<SemanticType>& focus_types,
                              std::ostream& out);

}  // namespace semtype
