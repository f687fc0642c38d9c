#include "semtype/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "semtype/error.hpp"

namespace semtype {

namespace {

double finish_cosine(double dot, double sq_norm_u, double sq_norm_v) {
    const double c = dot / (std::sqrt(sq_norm_u) * std::sqrt(sq_norm_v));
    return std::clamp(c, -1.0, 1.0);
}

double squared_norm(std::span<const float> u) {
    double s = 0.0;
    for (const float x : u) s += static_cast<double>(x) * static_cast<double>(x);
    return s;
}

double dot(std::span<const float> u, std::span<const float> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<double>(u[i]) * static_cast<double>(v[i]);
    return s;
}

struct Candidate {
    double score;
    std::uint32_t id_rank;
    std::uint32_t node;
};

bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id_rank < b.id_rank;
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) {
        throw ValidationError("cosine: dimension mismatch " + std::to_string(u.size()) + " vs " +
                              std::to_string(v.size()));
    }
    const double nu = squared_norm(u);
    const double nv = squared_norm(v);
    if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine: zero-norm vector");
    return finish_cosine(dot(u, v), nu, nv);
}

NeighborGraph::NeighborGraph(std::size_t k, VariantTag variant, bool allow_deficit, std::vector<std::string> ids,
                             std::vector<std::vector<Neighbor>> adjacency)
    : k_(k),
      variant_(std::move(variant)),
      allow_deficit_(allow_deficit),
      ids_(std::move(ids)),
      adjacency_(std::move(adjacency)) {
    if (k_ == 0) throw ValidationError("graph k must be positive");
    if (ids_.size() != adjacency_.size()) throw ValidationError("graph ids/adjacency size mismatch");
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second) throw ValidationError("duplicate graph node '" + ids_[i] + "'");
    }
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
        const auto& adj = adjacency_[i];
        if (adj.size() > k_ || (!allow_deficit_ && adj.size() != k_) || adj.empty()) {
            throw ValidationError("node '" + ids_[i] + "' has out-degree " + std::to_string(adj.size()) +
                                  " with k=" + std::to_string(k_));
        }
        for (const auto& nb : adj) {
            if (nb.node >= ids_.size()) throw ValidationError("node '" + ids_[i] + "' has a dangling edge");
            if (nb.node == i) throw ValidationError("node '" + ids_[i] + "' has a self-edge");
        }
    }
}

std::size_t NeighborGraph::index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown graph node '" + id + "'");
    return it->second;
}

NeighborGraph build_graph(const AlignedCorpus& corpus, const GraphOptions& options) {
    if (options.k == 0) throw ValidationError("k must be positive");
    const std::size_t n = corpus.size();
    const auto& bundle = corpus.bundle();

    // Dense lemma ids and id ranks so the hot loop compares integers.
    std::vector<std::uint32_t> lemma_of(n);
    std::unordered_map<std::string, std::uint32_t> lemma_ids;
    std::vector<std::size_t> lemma_sizes;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [it, fresh] = lemma_ids.emplace(corpus.record(i).lemma, lemma_ids.size());
        if (fresh) lemma_sizes.push_back(0);
        lemma_of[i] = it->second;
        ++lemma_sizes[it->second];
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return bundle.ids()[a] < bundle.ids()[b]; });
    std::vector<std::uint32_t> id_rank(n);
    for (std::size_t r = 0; r < n; ++r) id_rank[order[r]] = static_cast<std::uint32_t>(r);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t eligible = n - lemma_sizes[lemma_of[i]];
        if (eligible == 0 || (eligible < options.k && !options.allow_deficit)) {
            throw ValidationError("node '" + corpus.id(i) + "' has " + std::to_string(eligible) +
                                  " different-lemma candidates, k=" + std::to_string(options.k));
        }
    }

    std::vector<double> sq_norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        sq_norms[i] = squared_norm(bundle.row(i));
        if (sq_norms[i] == 0.0) throw ValidationError("zero-norm vector for '" + corpus.id(i) + "'");
    }

    std::vector<std::vector<Neighbor>> adjacency(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<Candidate> candidates;
        candidates.reserve(n);
        for (std::size_t i = begin; i < end; ++i) {
            candidates.clear();
            const auto query = bundle.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (lemma_of[j] == lemma_of[i]) continue;
                const double score = finish_cosine(dot(query, bundle.row(j)), sq_norms[i], sq_norms[j]);
                candidates.push_back({score, id_rank[j], static_cast<std::uint32_t>(j)});
            }
            const std::size_t take = std::min(options.k, candidates.size());
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                              candidates.end(), ranks_before);
            auto& adj = adjacency[i];
            adj.reserve(take);
            for (std::size_t c = 0; c < take; ++c) adj.push_back({candidates[c].node, candidates[c].score});
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (std::size_t begin = 0; begin < n; begin += chunk) {
            pool.emplace_back(work, begin, std::min(n, begin + chunk));
        }
    }

    return NeighborGraph(options.k, bundle.variant(), options.allow_deficit, bundle.ids(), std::move(adjacency));
}

std::vector<ScoredId> exhaustive_neighbors(const AlignedCorpus& corpus, const std::string& id, std::size_t k) {
    if (k == 0) throw ValidationError("k must be positive");
    const std::size_t row = corpus.row_of(id);
    const auto& lemma = corpus.record(row).lemma;
    std::vector<ScoredId> all;
    for (std::size_t j = 0; j < corpus.size(); ++j) {
        if (j == row || corpus.record(j).lemma == lemma) continue;
        all.push_back({corpus.id(j), cosine(corpus.bundle().row(row), corpus.bundle().row(j))});
    }
    if (all.size() < k) {
        throw ValidationError("node '" + id + "' has " + std::to_string(all.size()) +
                              " different-lemma candidates, k=" + std::to_string(k));
    }
    std::sort(all.begin(), all.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    all.resize(k);
    return all;
}

void write_graph(const NeighborGraph& graph, std::ostream& out) {
    nlohmann::ordered_json header;
    header["k"] = graph.k();
    header["variant"] = {{"model_id", graph.variant().model_id},
                         {"masked", graph.variant().masked},
                         {"layer_policy", graph.variant().layer_policy}};
    header["nodes"] = graph.size();
    header["similarity"] = "cosine";
    header["tie_rule"] = kTieRule;
    header["allow_deficit"] = graph.allow_deficit();
    out << header.dump() << '\n';

    for (std::size_t i = 0; i < graph.size(); ++i) {
        std::string line = R"({"id":)" + nlohmann::json(graph.id(i)).dump() + R"(,"neighbors":[)";
        bool first = true;
        for (const auto& nb : graph.neighbors(i)) {
            if (!first) line += ',';
            first = false;
            line += '[' + nlohmann::json(graph.id(nb.node)).dump() + ',' + fmt::format("{:.9g}", nb.score) + ']';
        }
        line += "]}\n";
        out << line;
    }
}

void write_graph(const NeighborGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write graph file " + path.string());
    write_graph(graph, out);
    if (!out) throw IoError("write failed for " + path.string());
}

NeighborGraph read_graph(std::istream& in) {
    using nlohmann::json;
    std::string line;
    std::size_t line_no = 0;
    try {
        if (!std::getline(in, line)) throw ParseError("empty graph file");
        ++line_no;
        const auto header = json::parse(line);
        const auto k = header.at("k").get<std::size_t>();
        VariantTag variant{header.at("variant").at("model_id").get<std::string>(),
                           header.at("variant").at("masked").get<bool>(),
                           header.at("variant").at("layer_policy").get<std::string>()};
        const auto nodes = header.at("nodes").get<std::size_t>();
        const bool deficit = header.at("allow_deficit").get<bool>();

        std::vector<std::string> ids;
        std::vector<std::vector<std::pair<std::string, double>>> raw;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto obj = json::parse(line);
            ids.push_back(obj.at("id").get<std::string>());
            auto& adj = raw.emplace_back();
            for (const auto& pair : obj.at("neighbors")) {
                adj.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
            }
        }
        if (ids.size() != nodes) {
            throw ParseError("graph header declares " + std::to_string(nodes) + " nodes, found " +
                             std::to_string(ids.size()));
        }
        std::unordered_map<std::string, std::uint32_t> index;
        for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<std::uint32_t>(i));
        std::vector<std::vector<Neighbor>> adjacency(ids.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            for (const auto& [nid, score] : raw[i]) {
                const auto it = index.find(nid);
                if (it == index.end()) throw ParseError("edge to unknown node '" + nid + "'");
                adjacency[i].push_back({it->second, score});
            }
        }
        return NeighborGraph(k, std::move(variant), deficit, std::move(ids), std::move(adjacency));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed graph: ") + e.what(), line_no);
    }
}

NeighborGraph read_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file " + path.string());
    return read_graph(in);
}

}  // namespace semtype
