#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semtype/dataset.hpp"

namespace semtype {

inline constexpr const char* kLayerPolicy = "avg-last-4";

/// Which model and input variant produced a bundle.
struct VariantTag {
    std::string model_id;
    bool masked = false;
    std::string layer_policy = kLayerPolicy;

    /// Short label used in output file names, e.g. "bert" or "bert_masked".
    std::string graph_name() const;

    friend bool operator==(const VariantTag&, const VariantTag&) = default;
};

/// Row-major float32 matrix of instance embeddings keyed by instance id.
class EmbeddingBundle {
public:
    EmbeddingBundle() = default;

    /// Validates shape, id uniqueness, finiteness and non-zero rows. Throws ValidationError.
    EmbeddingBundle(VariantTag variant, std::size_t dim, std::vector<std::string> ids,
                    std::vector<float> values);

    const VariantTag& variant() const noexcept { return variant_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::vector<float>& values() const noexcept { return values_; }

    std::span<const float> row(std::size_t i) const {
        return std::span<const float>(values_).subspan(i * dim_, dim_);
    }

    friend bool operator==(const EmbeddingBundle&, const EmbeddingBundle&) = default;

private:
    VariantTag variant_;
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> values_;
};

/// Reads meta.json, manifest.txt and vectors.f32le from a bundle directory.
EmbeddingBundle load_bundle(const std::filesystem::path& dir);

/// Writes the three bundle files, creating the directory if needed.
/// Output bytes depend only on the bundle contents.
void write_bundle(const EmbeddingBundle& bundle, const std::filesystem::path& dir);

/// A Dataset joined to a bundle. Rows follow bundle order.
class AlignedCorpus {
public:
    /// Throws AlignmentError listing every unmatched id on either side.
    AlignedCorpus(const Dataset& dataset, const EmbeddingBundle& bundle);

    const Dataset& dataset() const noexcept { return *dataset_; }
    const EmbeddingBundle& bundle() const noexcept { return *bundle_; }
    std::size_t size() const noexcept { return bundle_->size(); }

    /// Bundle row -> dataset record.
    const InstanceRecord& record(std::size_t row) const { return dataset_->records()[row_to_record_[row]]; }
    const std::string& id(std::size_t row) const { return bundle_->ids()[row]; }
    std::size_t row_of(const std::string& id) const;

private:
    const Dataset* dataset_;
    const EmbeddingBundle* bundle_;
    std::vector<std::size_t> row_to_record_;
    std::unordered_map<std::string, std::size_t> id_to_row_;
};

/// Caller keeps `dataset` and `bundle` alive for the lifetime of the result.
AlignedCorpus align(const EmbeddingBundle& bundle, const Dataset& dataset);

}  // namespace semtype
