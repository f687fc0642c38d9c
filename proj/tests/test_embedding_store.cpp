#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "semtype/embedding_store.hpp"
#include "semtype/error.hpp"

using namespace semtype;
using semtype::testing::make_record;
using semtype::testing::read_bytes;
using semtype::testing::TempDir;

namespace {

EmbeddingBundle small_bundle() {
    return EmbeddingBundle(VariantTag{"bert", false}, 4, {"a", "b", "c"},
                           {1, 2, 3, 4, -1, 0.5f, 0, 0, 1e-30f, 0, 0, 7});
}

}  // namespace

TEST_CASE("well-formed bundle loads") {
    TempDir tmp;
    write_bundle(small_bundle(), tmp.path());
    const auto b = load_bundle(tmp.path());
    CHECK(b.size() == 3);
    CHECK(b.dim() == 4);
    CHECK(b.variant().model_id == "bert");
    CHECK(b.variant().layer_policy == "avg-last-4");
    CHECK(b.row(1)[1] == 0.5f);
}

TEST_CASE("on-disk layout") {
    TempDir tmp;
    write_bundle(small_bundle(), tmp.path());
    CHECK(read_bytes(tmp / "manifest.txt") == "a\nb\nc\n");
    const auto blob = read_bytes(tmp / "vectors.f32le");
    REQUIRE(blob.size() == 3 * 4 * 4);
    // 1.0f little-endian
    CHECK(blob.substr(0, 4) == std::string("\x00\x00\x80\x3f", 4));
    const auto meta = read_bytes(tmp / "meta.json");
    CHECK(meta.find("\"dim\": 4") != std::string::npos);
    CHECK(meta.find("\"count\": 3") != std::string::npos);
    CHECK(meta.find("\"masked\": false") != std::string::npos);
}

TEST_CASE("blob size mismatch names expected and actual byte counts") {
    TempDir tmp;
    write_bundle(small_bundle(), tmp.path());
    {
        std::ofstream out(tmp / "vectors.f32le", std::ios::binary | std::ios::app);
        out << "xy";
    }
    try {
        load_bundle(tmp.path());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("50 bytes") != std::string::npos);
        CHECK(msg.find("expected 48") != std::string::npos);
    }
}

TEST_CASE("load errors") {
    TempDir tmp;
    CHECK_THROWS_AS(load_bundle(tmp / "nothing"), IoError);

    write_bundle(small_bundle(), tmp.path());
    SUBCASE("missing manifest") {
        std::filesystem::remove(tmp / "manifest.txt");
        CHECK_THROWS_AS(load_bundle(tmp.path()), IoError);
    }
    SUBCASE("non-finite value reports its row") {
        auto blob = read_bytes(tmp / "vectors.f32le");
        const float nan = std::numeric_limits<float>::quiet_NaN();
        std::memcpy(blob.data() + 4 * 4 + 8, &nan, 4);  // row 1
        std::ofstream(tmp / "vectors.f32le", std::ios::binary) << blob;
        try {
            load_bundle(tmp.path());
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("row 1") != std::string::npos);
        }
    }
    SUBCASE("duplicate id") {
        std::ofstream(tmp / "manifest.txt", std::ios::binary) << "a\nb\na\n";
        CHECK_THROWS_WITH_AS(load_bundle(tmp.path()), doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("count mismatch between meta and manifest") {
        std::ofstream(tmp / "manifest.txt", std::ios::binary) << "a\nb\n";
        CHECK_THROWS_AS(load_bundle(tmp.path()), ValidationError);
    }
}

TEST_CASE("bundle invariants") {
    CHECK_THROWS_AS(EmbeddingBundle(VariantTag{"m", false}, 2, {"a"}, {0, 0}), ValidationError);
    CHECK_THROWS_AS(EmbeddingBundle(VariantTag{"m", false}, 2, {"a"}, {1, 0, 0}), ValidationError);
    CHECK_THROWS_AS(EmbeddingBundle(VariantTag{"m", false}, 0, {}, {}), ValidationError);
    CHECK_THROWS_AS(EmbeddingBundle(VariantTag{"m", false}, 1, {"a", "a"}, {1, 2}), ValidationError);
    CHECK_THROWS_AS(EmbeddingBundle(VariantTag{"m", false}, 1, {"a"}, {std::numeric_limits<float>::infinity()}),
                    ValidationError);
}

TEST_CASE("write then load is bit-identical") {
    std::mt19937_64 rng(3);
    std::normal_distribution<float> normal;
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t dim = 1 + rng() % 40;
        const std::size_t count = 1 + rng() % 30;
        std::vector<std::string> ids;
        std::vector<float> values(dim * count);
        for (std::size_t i = 0; i < count; ++i) ids.push_back("id-" + std::to_string(i));
        for (auto& v : values) v = normal(rng) * 1e3f;
        values[0] = -0.0f;
        values[1] = std::numeric_limits<float>::denorm_min();
        if (dim == 1) values[0] = 1.0f;
        const EmbeddingBundle original(VariantTag{"sense", true}, dim, ids, values);

        TempDir a, b;
        write_bundle(original, a.path());
        const auto loaded = load_bundle(a.path());
        CHECK(loaded == original);
        CHECK(std::memcmp(loaded.values().data(), original.values().data(), values.size() * 4) == 0);
        write_bundle(loaded, b.path());
        for (const char* f : {"meta.json", "manifest.txt", "vectors.f32le"}) {
            CHECK(read_bytes(a / f) == read_bytes(b / f));
        }
    }
}

TEST_CASE("empty bundle") {
    TempDir tmp;
    const EmbeddingBundle empty(VariantTag{"bert", true}, 8, {}, {});
    write_bundle(empty, tmp.path());
    CHECK(read_bytes(tmp / "manifest.txt").empty());
    CHECK(read_bytes(tmp / "vectors.f32le").empty());
    CHECK(read_bytes(tmp / "meta.json").find("\"count\": 0") != std::string::npos);
    CHECK(load_bundle(tmp.path()) == empty);
}

TEST_CASE("write failure is an I/O error") {
    TempDir tmp;
    std::ofstream(tmp / "plainfile") << "x";
    CHECK_THROWS_AS(write_bundle(small_bundle(), tmp / "plainfile" / "sub"), IoError);
}

TEST_CASE("align") {
    const Dataset d({make_record("a", "pizza", SemanticType::food), make_record("b", "cake", SemanticType::food)});

    SUBCASE("bijection") {
        const EmbeddingBundle bundle(VariantTag{"m", false}, 1, {"b", "a"}, {1, 2});
        const auto c = align(bundle, d);
        CHECK(c.size() == 2);
        CHECK(c.row_of("a") == 1);
        CHECK(c.record(0).id == "b");
    }
    SUBCASE("missing id") {
        const EmbeddingBundle bundle(VariantTag{"m", false}, 1, {"a"}, {1});
        try {
            align(bundle, d);
            FAIL("expected AlignmentError");
        } catch (const AlignmentError& e) {
            CHECK(e.missing() == std::vector<std::string>{"b"});
            CHECK(e.extra().empty());
        }
    }
    SUBCASE("extra id") {
        const Dataset one({make_record("a", "pizza", SemanticType::food)});
        const EmbeddingBundle bundle(VariantTag{"m", false}, 1, {"a", "x"}, {1, 2});
        try {
            align(bundle, one);
            FAIL("expected AlignmentError");
        } catch (const AlignmentError& e) {
            CHECK(e.missing().empty());
            CHECK(e.extra() == std::vector<std::string>{"x"});
        }
    }
    SUBCASE("both sides reported") {
        const EmbeddingBundle bundle(VariantTag{"m", false}, 1, {"a", "y", "x"}, {1, 2, 3});
        try {
            align(bundle, d);
            FAIL("expected AlignmentError");
        } catch (const AlignmentError& e) {
            CHECK(e.missing() == std::vector<std::string>{"b"});
            CHECK(e.extra() == std::vector<std::string>{"x", "y"});
            CHECK(std::string(e.what()).find("[x]") != std::string::npos);
        }
    }
}
