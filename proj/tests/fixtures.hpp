#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "semtype/dataset.hpp"
#include "semtype/embedding_store.hpp"
#include "semtype/knn_graph.hpp"

namespace semtype::testing {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / fmt::format("semtype-test-{:016x}", rng());
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline InstanceRecord make_record(std::string id, std::string lemma, SemanticType lt,
                                  SentenceLabel label = SentenceLabel::matching,
                                  std::optional<SemanticType> ct = std::nullopt) {
    InstanceRecord r;
    r.id = std::move(id);
    r.lemma = std::move(lemma);
    r.sentence = "the " + r.lemma + " is here";
    r.span = {4, 4 + r.lemma.size()};
    r.lexical_type = lt;
    r.label = label;
    r.contextual_type = ct;
    return r;
}

/// Dataset plus a bundle with matching ids. Align after the value is in place:
/// AlignedCorpus keeps pointers into both members.
struct Corpus {
    Dataset dataset;
    EmbeddingBundle bundle;
};

/// Random corpus: `lemmas` lemmas with `per_lemma` instances each, Gaussian
/// vectors, lexical type uniform per lemma. Row order is shuffled so bundle
/// order differs from id order.
inline Corpus random_corpus(std::mt19937_64& rng, std::size_t lemmas, std::size_t per_lemma, std::size_t dim,
                            bool quantize = false) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    std::uniform_int_distribution<std::size_t> type_pick(0, kTypeCount - 1);
    std::vector<InstanceRecord> records;
    for (std::size_t l = 0; l < lemmas; ++l) {
        const auto lt = kAllTypes[type_pick(rng)];
        for (std::size_t i = 0; i < per_lemma; ++i) {
            records.push_back(make_record(fmt::format("w{}_{}", l, i), fmt::format("w{}", l), lt));
        }
    }
    std::shuffle(records.begin(), records.end(), rng);
    std::vector<std::string> ids;
    std::vector<float> values;
    for (const auto& r : records) {
        ids.push_back(r.id);
        bool nonzero = false;
        while (!nonzero) {
            std::vector<float> row(dim);
            for (auto& v : row) {
                v = normal(rng);
                // Coarse grid values make exact score ties common.
                if (quantize) v = std::round(v);
                nonzero = nonzero || v != 0.0f;
            }
            if (nonzero) values.insert(values.end(), row.begin(), row.end());
        }
    }
    return {Dataset(std::move(records)), EmbeddingBundle(VariantTag{"rand", false}, dim, std::move(ids), std::move(values))};
}

/// Graph with hand-written adjacency: node i -> listed neighbors (scores descending).
inline NeighborGraph manual_graph(std::size_t k, const std::vector<std::string>& ids,
                                  const std::vector<std::vector<std::size_t>>& adjacency, bool deficit = false) {
    std::vector<std::vector<Neighbor>> adj(adjacency.size());
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
        double score = 1.0;
        for (const auto j : adjacency[i]) {
            adj[i].push_back({static_cast<std::uint32_t>(j), score});
            score -= 0.01;
        }
    }
    return NeighborGraph(k, VariantTag{"manual", false}, deficit, ids, std::move(adj));
}

}  // namespace semtype::testing
