#include "semtype/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "semtype/error.hpp"

namespace semtype {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kManifestFile = "manifest.txt";
constexpr const char* kVectorsFile = "vectors.f32le";

std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing or unreadable bundle file " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return data;
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string VariantTag::graph_name() const { return masked ? model_id + "_masked" : model_id; }

EmbeddingBundle::EmbeddingBundle(VariantTag variant, std::size_t dim, std::vector<std::string> ids,
                                 std::vector<float> values)
    : variant_(std::move(variant)), dim_(dim), ids_(std::move(ids)), values_(std::move(values)) {
    if (dim_ == 0) throw ValidationError("bundle dim must be positive");
    if (values_.size() != ids_.size() * dim_) {
        throw ValidationError("bundle has " + std::to_string(values_.size()) + " values, expected " +
                              std::to_string(ids_.size()) + " rows x " + std::to_string(dim_));
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i].empty()) throw ValidationError("row " + std::to_string(i) + " has an empty id");
        if (!seen.insert(ids_[i]).second) throw ValidationError("duplicate bundle id '" + ids_[i] + "'");
        bool nonzero = false;
        for (const float v : row(i)) {
            if (!std::isfinite(v)) {
                throw ValidationError("non-finite value in row " + std::to_string(i) + " ('" + ids_[i] + "')");
            }
            nonzero = nonzero || v != 0.0f;
        }
        if (!nonzero) throw ValidationError("all-zero vector in row " + std::to_string(i) + " ('" + ids_[i] + "')");
    }
}

EmbeddingBundle load_bundle(const fs::path& dir) {
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(dir / kMetaFile));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed meta.json: ") + e.what());
    }
    VariantTag variant;
    std::size_t dim = 0;
    std::size_t count = 0;
    try {
        variant.model_id = meta.at("model_id").get<std::string>();
        variant.masked = meta.at("masked").get<bool>();
        variant.layer_policy = meta.at("layer_policy").get<std::string>();
        dim = meta.at("dim").get<std::size_t>();
        count = meta.at("count").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid meta.json: ") + e.what());
    }
    if (variant.layer_policy != kLayerPolicy) {
        throw ValidationError("unsupported layer_policy '" + variant.layer_policy + "'");
    }

    std::vector<std::string> ids;
    ids.reserve(count);
    {
        const auto manifest = read_file(dir / kManifestFile);
        std::size_t start = 0;
        while (start < manifest.size()) {
            auto nl = manifest.find('\n', start);
            if (nl == std::string::npos) throw ParseError("manifest.txt is not LF-terminated");
            ids.emplace_back(manifest.substr(start, nl - start));
            start = nl + 1;
        }
    }
    if (ids.size() != count) {
        throw ValidationError("manifest.txt lists " + std::to_string(ids.size()) + " ids, meta count is " +
                              std::to_string(count));
    }

    const auto blob = read_file(dir / kVectorsFile);
    const std::size_t expected = count * dim * sizeof(float);
    if (blob.size() != expected) {
        throw ValidationError("vectors.f32le has " + std::to_string(blob.size()) + " bytes, expected " +
                              std::to_string(expected) + " (count " + std::to_string(count) + " x dim " +
                              std::to_string(dim) + " x 4)");
    }
    std::vector<float> values(count * dim);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t raw = 0;
        std::memcpy(&raw, blob.data() + i * 4, 4);
        values[i] = std::bit_cast<float>(to_little_endian(raw));
    }
    return EmbeddingBundle(std::move(variant), dim, std::move(ids), std::move(values));
}

void write_bundle(const EmbeddingBundle& bundle, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create bundle directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    }

    nlohmann::ordered_json meta;
    meta["model_id"] = bundle.variant().model_id;
    meta["masked"] = bundle.variant().masked;
    meta["layer_policy"] = bundle.variant().layer_policy;
    meta["dim"] = bundle.dim();
    meta["count"] = bundle.size();
    write_file(dir / kMetaFile, meta.dump(2) + "\n");

    std::string manifest;
    for (const auto& id : bundle.ids()) {
        if (id.find('\n') != std::string::npos) throw ValidationError("id contains a newline: '" + id + "'");
        manifest += id;
        manifest += '\n';
    }
    write_file(dir / kManifestFile, manifest);

    std::string blob(bundle.values().size() * 4, '\0');
    for (std::size_t i = 0; i < bundle.values().size(); ++i) {
        const auto raw = to_little_endian(std::bit_cast<std::uint32_t>(bundle.values()[i]));
        std::memcpy(blob.data() + i * 4, &raw, 4);
    }
    write_file(dir / kVectorsFile, blob);
}

AlignedCorpus::AlignedCorpus(const Dataset& dataset, const EmbeddingBundle& bundle)
    : dataset_(&dataset), bundle_(&bundle) {
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    row_to_record_.reserve(bundle.size());
    for (std::size_t row = 0; row < bundle.size(); ++row) {
        const auto& id = bundle.ids()[row];
        id_to_row_.emplace(id, row);
        if (const auto rec = dataset.find(id)) {
            row_to_record_.push_back(*rec);
        } else {
            extra.push_back(id);
        }
    }
    for (const auto& r : dataset.records()) {
        if (!id_to_row_.contains(r.id)) missing.push_back(r.id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::sort(missing.begin(), missing.end());
        std::sort(extra.begin(), extra.end());
        throw AlignmentError(std::move(missing), std::move(extra));
    }
}

std::size_t AlignedCorpus::row_of(const std::string& id) const {
    const auto it = id_to_row_.find(id);
    if (it == id_to_row_.end()) throw ValidationError("unknown instance id '" + id + "'");
    return it->second;
}

AlignedCorpus align(const EmbeddingBundle& bundle, const Dataset& dataset) {
    return AlignedCorpus(dataset, bundle);
}

}  // namespace semtype
