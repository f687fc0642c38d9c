#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "semtype/semantic_types.hpp"

namespace semtype {

/// Character offsets [start, end) into the sentence, counted in Unicode code points.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

/// One annotated noun occurrence.
struct InstanceRecord {
    std::string id;
    std::string lemma;
    std::string sentence;
    Span span;
    SemanticType lexical_type = SemanticType::animal;
    SentenceLabel label = SentenceLabel::matching;
    /// Normalized: equals lexical_type for matching, empty for unrestricted.
    std::optional<SemanticType> contextual_type;

    friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

/// Checks span bounds, loose lemma overlap and the label/type triple, and
/// normalizes contextual_type in place. Throws ValidationError naming the record.
void validate_record(InstanceRecord& record);

/// An immutable, validated collection of records with lookup indexes.
class Dataset {
public:
    Dataset() = default;

    /// Validates every record and the cross-record invariants (unique ids,
    /// one lexical type per lemma). Throws ValidationError.
    explicit Dataset(std::vector<InstanceRecord> records);

    const std::vector<InstanceRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const InstanceRecord& operator[](std::size_t i) const { return records_[i]; }

    /// Record index for an id, if present.
    std::optional<std::size_t> find(const std::string& id) const;
    const InstanceRecord& at(const std::string& id) const;

    /// lemma -> record indexes in file order.
    const std::map<std::string, std::vector<std::size_t>>& lemma_index() const noexcept {
        return lemma_index_;
    }
    /// Record indexes per lexical type, indexed by index_of(SemanticType).
    const std::array<std::vector<std::size_t>, kTypeCount>& type_index() const noexcept {
        return type_index_;
    }
    std::optional<SemanticType> lemma_type(const std::string& lemma) const;

    friend bool operator==(const Dataset& a, const Dataset& b) { return a.records_ == b.records_; }

private:
    std::vector<InstanceRecord> records_;
    std::unordered_map<std::string, std::size_t> id_index_;
    std::map<std::string, std::vector<std::size_t>> lemma_index_;
    std::array<std::vector<std::size_t>, kTypeCount> type_index_;
};

/// Reads the JSON-lines annotation format. Errors carry the 1-based line number.
Dataset parse_dataset(std::istream& in);
Dataset parse_dataset(const std::filesystem::path& path);

/// Writes the JSON-lines annotation format; matching records omit contextual_type.
void serialize_dataset(const Dataset& d, std::ostream& out);
void serialize_dataset(const Dataset& d, const std::filesystem::path& path);

struct DatasetSummary {
    std::array<std::size_t, kLabelCount> per_label{};
    std::array<std::size_t, kTypeCount> per_lexical_type{};
    std::size_t total = 0;
};

DatasetSummary dataset_summary(const Dataset& d);

}  // namespace semtype
