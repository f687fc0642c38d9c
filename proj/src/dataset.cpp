#include "semtype/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "semtype/error.hpp"
#include "semtype/text_util.hpp"

namespace semtype {

using nlohmann::json;

namespace {

// Loose lemma check: case-folded span text and lemma share a non-empty prefix,
// which admits inflections ("gulps"/"gulp", "mice"/"mouse").
bool loosely_matches(const std::string& surface, const std::string& lemma) {
    const auto a = text::ascii_lower(surface);
    const auto b = text::ascii_lower(lemma);
    return !a.empty() && !b.empty() && a.front() == b.front();
}

const json& require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) throw ParseError(std::string("key '") + key + "' must be a string");
    return v.get<std::string>();
}

InstanceRecord record_from_json(const json& obj) {
    if (!obj.is_object()) throw ParseError("expected a JSON object");
    InstanceRecord r;
    r.id = require_string(obj, "id");
    r.lemma = require_string(obj, "lemma");
    r.sentence = require_string(obj, "sentence");

    const auto& span = require(obj, "span");
    if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() ||
        !span[1].is_number_unsigned()) {
        throw ParseError("key 'span' must be an array of two non-negative integers");
    }
    r.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};

    r.lexical_type = parse_semantic_type(require_string(obj, "lexical_type"));
    r.label = parse_sentence_label(require_string(obj, "label"));
    if (const auto it = obj.find("contextual_type"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("key 'contextual_type' must be a string");
        r.contextual_type = parse_semantic_type(it->get<std::string>());
    }
    return r;
}

}  // namespace

void validate_record(InstanceRecord& r) {
    try {
        if (r.id.empty()) throw ValidationError("empty id");
        if (r.lemma.empty()) throw ValidationError("empty lemma");
        const auto length = text::codepoint_length(r.sentence);
        if (r.span.start >= r.span.end || r.span.end > length) {
            throw ValidationError("span [" + std::to_string(r.span.start) + ", " +
                                  std::to_string(r.span.end) + ") is empty or outside sentence of length " +
                                  std::to_string(length));
        }
        const auto surface = text::codepoint_substr(r.sentence, r.span.start, r.span.end);
        if (!loosely_matches(surface, r.lemma)) {
            throw ValidationError("span text '" + surface + "' does not overlap lemma '" + r.lemma + "'");
        }
        r.contextual_type = normalize_contextual_type(r.label, r.lexical_type, r.contextual_type);
    } catch (const Error& e) {
        throw ValidationError("record '" + r.id + "': " + e.what());
    }
}

Dataset::Dataset(std::vector<InstanceRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        auto& r = records_[i];
        validate_record(r);
        if (!id_index_.emplace(r.id, i).second) {
            throw ValidationError("duplicate instance id '" + r.id + "'");
        }
        auto& lemma_rows = lemma_index_[r.lemma];
        if (!lemma_rows.empty()) {
            const auto& first = records_[lemma_rows.front()];
            if (first.lexical_type != r.lexical_type) {
                throw ValidationError("lemma '" + r.lemma + "' has conflicting lexical types " +
                                      std::string(name(first.lexical_type)) + " (record '" + first.id +
                                      "') and " + std::string(name(r.lexical_type)) + " (record '" +
                                      r.id + "')");
            }
        }
        lemma_rows.push_back(i);
        type_index_[index_of(r.lexical_type)].push_back(i);
    }
}

std::optional<std::size_t> Dataset::find(const std::string& id) const {
    const auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
}

const InstanceRecord& Dataset::at(const std::string& id) const {
    const auto idx = find(id);
    if (!idx) throw ValidationError("unknown instance id '" + id + "'");
    return records_[*idx];
}

std::optional<SemanticType> Dataset::lemma_type(const std::string& lemma) const {
    const auto it = lemma_index_.find(lemma);
    if (it == lemma_index_.end()) return std::nullopt;
    return records_[it->second.front()].lexical_type;
}

Dataset parse_dataset(std::istream& in) {
    std::vector<InstanceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    std::unordered_map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            auto record = record_from_json(json::parse(line));
            validate_record(record);
            if (const auto [it, fresh] = seen.emplace(record.id, line_no); !fresh) {
                throw ValidationError("duplicate instance id '" + record.id + "' (first seen on line " +
                                      std::to_string(it->second) + ")");
            }
            records.push_back(std::move(record));
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return Dataset(std::move(records));
}

Dataset parse_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file " + path.string());
    return parse_dataset(in);
}

void serialize_dataset(const Dataset& d, std::ostream& out) {
    for (const auto& r : d.records()) {
        nlohmann::ordered_json obj;
        obj["id"] = r.id;
        obj["lemma"] = r.lemma;
        obj["sentence"] = r.sentence;
        obj["span"] = {r.span.start, r.span.end};
        obj["lexical_type"] = name(r.lexical_type);
        obj["label"] = name(r.label);
        if (r.label != SentenceLabel::matching && r.contextual_type) {
            obj["contextual_type"] = name(*r.contextual_type);
        }
        out << obj.dump() << '\n';
    }
}

void serialize_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write annotation file " + path.string());
    serialize_dataset(d, out);
    if (!out) throw IoError("write failed for " + path.string());
}

DatasetSummary dataset_summary(const Dataset& d) {
    DatasetSummary s;
    for (const auto& r : d.records()) {
        ++s.per_label[index_of(r.label)];
        ++s.per_lexical_type[index_of(r.lexical_type)];
    }
    s.total = d.size();
    return s;
}

}  // namespace semtype
