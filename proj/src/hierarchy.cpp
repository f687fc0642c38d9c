#include "semtype/hierarchy.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "semtype/error.hpp"

namespace semtype {

namespace {

struct Cluster {
    std::size_t node;
    std::vector<std::size_t> leaves;  // sorted
};

nlohmann::ordered_json node_json(const Dendrogram& d, std::size_t node) {
    nlohmann::ordered_json j;
    if (node < kTypeCount) {
        j["type"] = name(kAllTypes[node]);
        return j;
    }
    const auto& m = d.merges[node - kTypeCount];
    j["similarity"] = m.similarity;
    j["distance"] = m.distance;
    j["size"] = m.size;
    j["children"] = {node_json(d, m.left), node_json(d, m.right)};
    return j;
}

}  // namespace

std::vector<SemanticType> Dendrogram::members(std::size_t node) const {
    std::vector<SemanticType> out;
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
        const auto n = stack.back();
        stack.pop_back();
        if (n < kTypeCount) {
            out.push_back(kAllTypes[n]);
        } else {
            stack.push_back(merges.at(n - kTypeCount).left);
            stack.push_back(merges.at(n - kTypeCount).right);
        }
    }
    std::sort(out.begin(), out.end(), [](auto a, auto b) { return index_of(a) < index_of(b); });
    return out;
}

std::vector<std::vector<SemanticType>> Dendrogram::cut(std::size_t n_clusters) const {
    if (n_clusters == 0 || n_clusters > kTypeCount) {
        throw ValidationError("cluster count must be in [1, " + std::to_string(kTypeCount) + "]");
    }
    // Roots after applying the first (10 - n) merges.
    const std::size_t applied = kTypeCount - n_clusters;
    std::vector<bool> consumed(kTypeCount + applied, false);
    for (std::size_t i = 0; i < applied; ++i) {
        consumed[merges[i].left] = true;
        consumed[merges[i].right] = true;
    }
    std::vector<std::vector<SemanticType>> clusters;
    for (std::size_t node = 0; node < kTypeCount + applied; ++node) {
        if (!consumed[node]) clusters.push_back(members(node));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return index_of(a.front()) < index_of(b.front()); });
    return clusters;
}

Dendrogram induce_hierarchy(const TypeMatrix& matrix) {
    for (std::size_t r = 0; r < kTypeCount; ++r) {
        if (!matrix.rows[r]) {
            throw ValidationError("type matrix row '" + std::string(name(kAllTypes[r])) + "' is missing");
        }
        for (const double v : *matrix.rows[r]) {
            if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("type matrix value outside [0, 1]");
        }
    }

    std::array<std::array<double, kTypeCount>, kTypeCount> affinity{};
    double max_affinity = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kTypeCount; ++i) {
        for (std::size_t j = 0; j < kTypeCount; ++j) {
            affinity[i][j] = ((*matrix.rows[i])[j] + (*matrix.rows[j])[i]) / 2.0;
            if (i != j) max_affinity = std::max(max_affinity, affinity[i][j]);
        }
    }

    std::vector<Cluster> active;
    for (std::size_t i = 0; i < kTypeCount; ++i) active.push_back({i, {i}});

    auto mean_affinity = [&](const Cluster& a, const Cluster& b) {
        double s = 0.0;
        for (const auto x : a.leaves) {
            for (const auto y : b.leaves) s += affinity[x][y];
        }
        return s / static_cast<double>(a.leaves.size() * b.leaves.size());
    };

    Dendrogram d;
    while (active.size() > 1) {
        // `active` stays ordered by smallest leaf, so scanning (a < b) visits
        // candidate pairs in tie-break order and strict '<' keeps the first.
        std::size_t best_a = 0, best_b = 1;
        double best_distance = std::numeric_limits<double>::infinity();
        double best_similarity = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double sim = mean_affinity(active[a], active[b]);
                const double dist = max_affinity - sim;
                if (dist < best_distance) {
                    best_distance = dist;
                    best_similarity = sim;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        Cluster merged;
        merged.node = kTypeCount + d.merges.size();
        merged.leaves = active[best_a].leaves;
        merged.leaves.insert(merged.leaves.end(), active[best_b].leaves.begin(), active[best_b].leaves.end());
        std::sort(merged.leaves.begin(), merged.leaves.end());
        d.merges.push_back({active[best_a].node, active[best_b].node, best_similarity, best_distance,
                            merged.leaves.size()});
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
        active[best_a] = std::move(merged);
        std::sort(active.begin(), active.end(),
                  [](const Cluster& x, const Cluster& y) { return x.leaves.front() < y.leaves.front(); });
    }
    return d;
}

std::string hierarchy_json(const Dendrogram& d) {
    nlohmann::ordered_json j;
    j["linkage"] = "average";
    j["affinity"] = "symmetrized_ntp";
    j["root"] = node_json(d, d.root());
    return j.dump(2) + "\n";
}

}  // namespace semtype
