#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semtype/dataset.hpp"
#include "semtype/knn_graph.hpp"

namespace semtype {

/// Fraction of a node's out-neighbors per semantic type, canonical order.
struct TypeDistribution {
    std::array<double, kTypeCount> p{};

    double operator[](SemanticType t) const noexcept { return p[index_of(t)]; }
    double& operator[](SemanticType t) noexcept { return p[index_of(t)]; }

    friend bool operator==(const TypeDistribution&, const TypeDistribution&) = default;
};

struct MetricRow {
    std::string id;
    SentenceLabel label = SentenceLabel::matching;
    SemanticType lexical_type = SemanticType::animal;
    std::optional<SemanticType> contextual_type;
    TypeDistribution ntp;
    double ntmr_l = 0.0;
    /// Present only when the contextual type exists and differs from the lexical type.
    std::optional<double> ntmr_c;
    double other_ratio = 0.0;
    double nte = 0.0;
};

/// Per-instance metrics for one graph, plus the settings that produced them.
struct MetricTable {
    std::string graph;
    std::size_t k = 0;
    bool allow_deficit = false;
    std::vector<MetricRow> rows;
};

/// Neighbor types are the neighbors' lexical types on every graph.
TypeDistribution ntp(const NeighborGraph& graph, const Dataset& dataset, std::size_t node);

/// Shannon entropy in nats, with 0 ln 0 = 0.
double nte(const TypeDistribution& dist);

MetricRow metric_row(const NeighborGraph& graph, const Dataset& dataset, std::size_t node);

/// Rows in graph node order.
MetricTable compute_metrics(const NeighborGraph& graph, const Dataset& dataset, std::string graph_name = {});

inline constexpr const char* kEntropyBase = "e";

/// CSV with 6-decimal floats and empty fields for absent values.
void write_metric_csv(const MetricTable& table, std::ostream& out);
void write_metric_csv(const MetricTable& table, const std::filesystem::path& path);

/// Parses a metric CSV back into rows. NTMR, other ratio and NTE are recomputed
/// from the NTP columns and must agree with the stored values to 1e-6.
/// Graph settings are not part of the CSV and are left at their defaults.
MetricTable read_metric_csv(std::istream& in);
MetricTable read_metric_csv(const std::filesystem::path& path);

/// Sidecar JSON carrying k, the deficit flag, entropy base and tie rule.
void write_metric_meta(const MetricTable& table, const std::filesystem::path& path);

}  // namespace semtype
