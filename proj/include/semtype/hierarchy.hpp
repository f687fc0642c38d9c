#pragma once

#include <string>
#include <vector>

#include "semtype/aggregation.hpp"

namespace semtype {

/// Binary merge tree over the semantic types. Node ids 0..9 are the types in
/// canonical order; merge i creates node 10 + i.
struct Dendrogram {
    struct Merge {
        std::size_t left = 0;
        std::size_t right = 0;
        /// Mean symmetrized affinity across the two clusters.
        double similarity = 0.0;
        /// Average-linkage distance, max off-diagonal affinity minus similarity.
        double distance = 0.0;
        std::size_t size = 0;
    };

    std::vector<Merge> merges;

    std::size_t root() const noexcept { return kTypeCount + merges.size() - 1; }
    /// Leaves under a node, in canonical order.
    std::vector<SemanticType> members(std::size_t node) const;
    /// Clusters left after undoing the last (n - 1) merges; each sorted canonically,
    /// clusters ordered by their first member.
    std::vector<std::vector<SemanticType>> cut(std::size_t n_clusters) const;
};

/// Average-linkage clustering of the symmetrized off-diagonal affinities
/// S = (M + M^T) / 2, with distance max(S) - S. Ties merge the pair whose
/// smallest members come first in canonical order. Rows need not sum exactly
/// to 1, so rounded percentage matrices are accepted.
/// Throws ValidationError if a row is missing or a value is outside [0, 1].
Dendrogram induce_hierarchy(const TypeMatrix& matrix);

/// Nested JSON tree: leaves {"type": name}, merges {"similarity", "distance", "children"}.
std::string hierarchy_json(const Dendrogram& d);

}  // namespace semtype
