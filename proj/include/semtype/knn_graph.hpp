#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semtype/embedding_store.hpp"

namespace semtype {

/// Tie rule recorded in graph metadata: score descending, then instance id ascending.
inline constexpr const char* kTieRule = "score_desc_id_asc";

/// Cosine similarity with 64-bit accumulation, clamped to [-1, 1].
/// Throws ValidationError on a dimension mismatch or a zero-norm input.
double cosine(std::span<const float> u, std::span<const float> v);

struct Neighbor {
    std::uint32_t node = 0;  // index into NeighborGraph::ids()
    double score = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct ScoredId {
    std::string id;
    double score = 0.0;

    friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

struct GraphOptions {
    std::size_t k = 10;
    /// Admit nodes with fewer than k eligible candidates; their out-degree shrinks.
    bool allow_deficit = false;
    /// Worker count; 0 picks the hardware concurrency. Output does not depend on it.
    unsigned threads = 0;
};

/// Directed kNN graph. Each adjacency list is sorted by the tie rule.
class NeighborGraph {
public:
    NeighborGraph() = default;
    NeighborGraph(std::size_t k, VariantTag variant, bool allow_deficit, std::vector<std::string> ids,
                  std::vector<std::vector<Neighbor>> adjacency);

    std::size_t k() const noexcept { return k_; }
    const VariantTag& variant() const noexcept { return variant_; }
    bool allow_deficit() const noexcept { return allow_deficit_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::string& id(std::size_t node) const { return ids_[node]; }
    const std::vector<Neighbor>& neighbors(std::size_t node) const { return adjacency_[node]; }
    std::size_t index_of(const std::string& id) const;

    /// Denominator for neighbor-type proportions: k, or the actual out-degree
    /// when the graph was built with allow_deficit.
    std::size_t denominator(std::size_t node) const {
        return allow_deficit_ ? adjacency_[node].size() : k_;
    }

    friend bool operator==(const NeighborGraph& a, const NeighborGraph& b) {
        return a.k_ == b.k_ && a.variant_ == b.variant_ && a.allow_deficit_ == b.allow_deficit_ &&
               a.ids_ == b.ids_ && a.adjacency_ == b.adjacency_;
    }

private:
    std::size_t k_ = 0;
    VariantTag variant_;
    bool allow_deficit_ = false;
    std::vector<std::string> ids_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Exact O(n^2) construction over all different-lemma pairs.
/// Throws ValidationError when a node has fewer than k eligible candidates
/// (unless allow_deficit, which still rejects nodes with none).
NeighborGraph build_graph(const AlignedCorpus& corpus, const GraphOptions& options);

/// Reference scan for a single node: scores every different-lemma candidate
/// with cosine() and fully sorts them under the tie rule.
std::vector<ScoredId> exhaustive_neighbors(const AlignedCorpus& corpus, const std::string& id, std::size_t k);

/// JSON-lines export: a header object, then one {"id", "neighbors"} object per node.
/// Scores are written with 9 significant digits.
void write_graph(const NeighborGraph& graph, std::ostream& out);
void write_graph(const NeighborGraph& graph, const std::filesystem::path& path);
NeighborGraph read_graph(std::istream& in);
NeighborGraph read_graph(const std::filesystem::path& path);

}  // namespace semtype
