#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "semtype/error.hpp"
#include "semtype/knn_graph.hpp"

using namespace semtype;
using semtype::testing::Corpus;
using semtype::testing::make_record;
using semtype::testing::random_corpus;

namespace {

std::vector<float> v(std::initializer_list<float> xs) { return xs; }

void check_invariants(const NeighborGraph& g, const AlignedCorpus& c) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& adj = g.neighbors(i);
        REQUIRE(adj.size() == g.k());
        const auto& lemma = c.record(c.row_of(g.id(i))).lemma;
        for (std::size_t e = 0; e < adj.size(); ++e) {
            CHECK(adj[e].node != i);
            CHECK(c.record(c.row_of(g.id(adj[e].node))).lemma != lemma);
            if (e > 0) CHECK(adj[e - 1].score >= adj[e].score);
        }
    }
}

bool matches_oracle(const NeighborGraph& g, const AlignedCorpus& c) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto expected = exhaustive_neighbors(c, g.id(i), g.k());
        const auto& adj = g.neighbors(i);
        if (expected.size() != adj.size()) return false;
        for (std::size_t e = 0; e < adj.size(); ++e) {
            if (g.id(adj[e].node) != expected[e].id || adj[e].score != expected[e].score) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("cosine") {
    CHECK(cosine(v({3, 4}), v({3, 4})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine(v({1, 0}), v({0, 1})) == 0.0);
    CHECK(std::fabs(cosine(v({1, 0}), v({1, 1})) - 0.7071067811865475) < 1e-12);
    CHECK(cosine(v({1, 0}), v({-2, 0})) == -1.0);
    CHECK_THROWS_AS(cosine(v({0, 0}), v({1, 1})), ValidationError);
    CHECK_THROWS_AS(cosine(v({1, 0}), v({1, 1, 1})), ValidationError);
}

TEST_CASE("forced selection when every eligible peer is needed") {
    // Two lemmas of three instances: each node has exactly k = 3 eligible peers.
    const Dataset d({make_record("a0", "ant", SemanticType::animal), make_record("a1", "ant", SemanticType::animal),
                     make_record("a2", "ant", SemanticType::animal), make_record("b0", "bee", SemanticType::animal),
                     make_record("b1", "bee", SemanticType::animal), make_record("b2", "bee", SemanticType::animal)});
    const EmbeddingBundle b(VariantTag{"m", false}, 2, {"a0", "a1", "a2", "b0", "b1", "b2"},
                            {1, 0, 1, 0.1f, 1, 0.2f, 0, 1, 0.1f, 1, 0.2f, 1});
    const auto c = align(b, d);
    const auto g = build_graph(c, {3});
    for (std::size_t i = 0; i < 3; ++i) {
        std::set<std::string> got;
        for (const auto& nb : g.neighbors(i)) got.insert(g.id(nb.node));
        CHECK(got == std::set<std::string>{"b0", "b1", "b2"});
    }
    check_invariants(g, c);
    CHECK_THROWS_AS(build_graph(c, {4}), ValidationError);
}

TEST_CASE("same-lemma nearest vectors are never linked") {
    const Dataset d({make_record("x1", "cat", SemanticType::animal), make_record("x2", "cat", SemanticType::animal),
                     make_record("y", "dog", SemanticType::animal), make_record("z", "owl", SemanticType::animal)});
    // x1 and x2 are identical; y and z point elsewhere.
    const EmbeddingBundle b(VariantTag{"m", false}, 2, {"x1", "x2", "y", "z"}, {1, 0, 1, 0, 0.5f, 1, -1, 0.3f});
    const auto c = align(b, d);
    const auto g = build_graph(c, {1});
    CHECK(g.id(g.neighbors(0)[0].node) == "y");
    CHECK(g.id(g.neighbors(1)[0].node) == "y");
    CHECK(g.id(g.neighbors(2)[0].node) != "y");
}

TEST_CASE("insufficient candidates") {
    const Dataset d({make_record("a", "ant", SemanticType::animal), make_record("b", "bee", SemanticType::animal)});
    const EmbeddingBundle b(VariantTag{"m", false}, 1, {"a", "b"}, {1, 2});
    const auto c = align(b, d);
    try {
        build_graph(c, {2});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("1 different-lemma candidates") != std::string::npos);
    }
    CHECK_THROWS_AS(exhaustive_neighbors(c, "a", 2), ValidationError);

    const auto g = build_graph(c, {2, true});
    CHECK(g.allow_deficit());
    CHECK(g.neighbors(0).size() == 1);
    CHECK(g.denominator(0) == 1);

    const Dataset lone({make_record("a", "ant", SemanticType::animal)});
    const EmbeddingBundle lb(VariantTag{"m", false}, 1, {"a"}, {1});
    CHECK_THROWS_AS(build_graph(align(lb, lone), {1, true}), ValidationError);
}

TEST_CASE("tie rule: identical scores resolve by ascending id") {
    std::vector<InstanceRecord> recs{make_record("q", "query", SemanticType::food)};
    std::vector<std::string> ids{"q"};
    std::vector<float> values{1, 0};
    for (const auto* id : {"m", "c", "x", "a", "k"}) {
        recs.push_back(make_record(id, std::string("n") + id, SemanticType::food));
        ids.emplace_back(id);
        values.insert(values.end(), {2, 0});  // all collinear with q
    }
    const Dataset d(std::move(recs));
    const EmbeddingBundle b(VariantTag{"m", false}, 2, ids, values);
    const auto c = align(b, d);
    const auto top = exhaustive_neighbors(c, "q", 3);
    REQUIRE(top.size() == 3);
    CHECK(top[0].id == "a");
    CHECK(top[1].id == "c");
    CHECK(top[2].id == "k");
    const auto g = build_graph(c, {3});
    CHECK(g.id(g.neighbors(0)[0].node) == "a");
    CHECK(g.id(g.neighbors(0)[2].node) == "k");
}

TEST_CASE("k = 1 picks the unique argmax") {
    std::mt19937_64 rng(11);
    auto corpus = random_corpus(rng, 5, 3, 6);
    const auto c = align(corpus.bundle, corpus.dataset);
    const auto row = c.row_of("w0_0");
    double best = -2.0;
    std::string arg;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c.record(j).lemma == "w0") continue;
        const double s = cosine(c.bundle().row(row), c.bundle().row(j));
        if (s > best) {
            best = s;
            arg = c.id(j);
        }
    }
    const auto top = exhaustive_neighbors(c, "w0_0", 1);
    CHECK(top.front().id == arg);
    CHECK(top.front().score == best);
}

TEST_CASE("build_graph matches the exhaustive scan") {
    std::mt19937_64 rng(2024);
    for (const std::size_t dim : {2, 8, 32, 256}) {
        for (const std::size_t k : {1, 3, 10}) {
            CAPTURE(dim);
            CAPTURE(k);
            const bool quantize = dim <= 8;  // many exact ties in low dimensions
            auto corpus = random_corpus(rng, 12 + rng() % 10, 3 + rng() % 4, dim, quantize);
            const auto c = align(corpus.bundle, corpus.dataset);
            const auto g = build_graph(c, {k, false, 1});
            check_invariants(g, c);
            CHECK(matches_oracle(g, c));
        }
    }
}

TEST_CASE("thread count does not change the graph") {
    std::mt19937_64 rng(5);
    auto corpus = random_corpus(rng, 20, 5, 16, true);
    const auto c = align(corpus.bundle, corpus.dataset);
    const auto one = build_graph(c, {10, false, 1});
    for (unsigned t : {2u, 3u, 7u}) CHECK(build_graph(c, {10, false, t}) == one);
    std::ostringstream a, b;
    write_graph(one, a);
    write_graph(build_graph(c, {10, false, 4}), b);
    CHECK(a.str() == b.str());
}

TEST_CASE("scaling a vector leaves the graph unchanged") {
    std::mt19937_64 rng(99);
    auto corpus = random_corpus(rng, 15, 4, 12);
    const auto c = align(corpus.bundle, corpus.dataset);
    const auto g = build_graph(c, {5, false, 1});

    for (int trial = 0; trial < 5; ++trial) {
        auto values = corpus.bundle.values();
        const std::size_t row = rng() % corpus.bundle.size();
        // Powers of two keep the float rescaling exact.
        const float factor = std::ldexp(1.0f, static_cast<int>(rng() % 9) - 4);
        for (std::size_t d = 0; d < corpus.bundle.dim(); ++d) values[row * corpus.bundle.dim() + d] *= factor;
        const EmbeddingBundle scaled(corpus.bundle.variant(), corpus.bundle.dim(), corpus.bundle.ids(), values);
        const auto gs = build_graph(align(scaled, corpus.dataset), {5, false, 1});
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::vector<std::uint32_t> a, b;
            for (const auto& nb : g.neighbors(i)) a.push_back(nb.node);
            for (const auto& nb : gs.neighbors(i)) b.push_back(nb.node);
            CHECK(a == b);
        }
    }
}

TEST_CASE("graph export") {
    std::mt19937_64 rng(17);
    auto corpus = random_corpus(rng, 6, 3, 4);
    const auto c = align(corpus.bundle, corpus.dataset);
    const auto g = build_graph(c, {3});
    std::ostringstream out;
    write_graph(g, out);
    const auto text = out.str();

    std::istringstream lines(text);
    std::string header;
    std::getline(lines, header);
    CHECK(header.find(R"("k":3)") != std::string::npos);
    CHECK(header.find(R"("nodes":18)") != std::string::npos);
    CHECK(header.find(R"("tie_rule":"score_desc_id_asc")") != std::string::npos);
    CHECK(header.find(R"("model_id":"rand")") != std::string::npos);
    std::string first;
    std::getline(lines, first);
    CHECK(first.rfind(R"({"id":")", 0) == 0);
    CHECK(first.find(R"("neighbors":[[")") != std::string::npos);

    std::istringstream in(text);
    const auto back = read_graph(in);
    CHECK(back.k() == 3);
    CHECK(back.ids() == g.ids());
    CHECK(back.variant() == g.variant());
    for (std::size_t i = 0; i < g.size(); ++i) {
        REQUIRE(back.neighbors(i).size() == 3);
        for (std::size_t e = 0; e < 3; ++e) {
            CHECK(back.neighbors(i)[e].node == g.neighbors(i)[e].node);
            // 9 significant digits
            CHECK(std::fabs(back.neighbors(i)[e].score - g.neighbors(i)[e].score) <= 5e-9);
        }
    }
    std::ostringstream again;
    write_graph(back, again);
    CHECK(again.str() == text);
}

TEST_CASE("NeighborGraph rejects malformed adjacency") {
    CHECK_THROWS_AS(semtype::testing::manual_graph(1, {"a", "b"}, {{0}, {0}}), ValidationError);  // self-edge
    CHECK_THROWS_AS(semtype::testing::manual_graph(2, {"a", "b"}, {{1}, {0}}), ValidationError);  // degree < k
    CHECK_NOTHROW(semtype::testing::manual_graph(2, {"a", "b"}, {{1}, {0}}, true));
}
