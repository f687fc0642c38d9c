#include "semtype/semantic_types.hpp"

#include <string>

#include "semtype/error.hpp"

namespace semtype {

namespace {

constexpr std::array<std::string_view, kTypeCount> kTypeNames = {
    "animal", "artifact", "activity", "food",    "human",
    "info",   "location", "mood",     "process", "state",
};

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "matching", "coercion", "other_mismatch", "unrestricted",
};

}  // namespace

std::string_view name(SemanticType t) noexcept { return kTypeNames[index_of(t)]; }
std::string_view name(SentenceLabel l) noexcept { return kLabelNames[index_of(l)]; }

std::optional<SemanticType> try_parse_semantic_type(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kTypeCount; ++i) {
        if (kTypeNames[i] == s) return kAllTypes[i];
    }
    return std::nullopt;
}

std::optional<SentenceLabel> try_parse_sentence_label(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (kLabelNames[i] == s) return kAllLabels[i];
    }
    return std::nullopt;
}

SemanticType parse_semantic_type(std::string_view s) {
    if (auto t = try_parse_semantic_type(s)) return *t;
    throw ValidationError("unknown semantic type '" + std::string(s) + "'");
}

SentenceLabel parse_sentence_label(std::string_view s) {
    if (auto l = try_parse_sentence_label(s)) return *l;
    throw ValidationError("unknown sentence label '" + std::string(s) + "'");
}

std::optional<SemanticType> normalize_contextual_type(SentenceLabel label, SemanticType lexical,
                                                      std::optional<SemanticType> contextual) {
    switch (label) {
        case SentenceLabel::matching:
            if (contextual && *contextual != lexical) {
                throw ValidationError("label matching requires contextual_type == lexical_type, got " +
                                      std::string(name(*contextual)) + " vs " +
                                      std::string(name(lexical)));
            }
            return lexical;
        case SentenceLabel::coercion:
        case SentenceLabel::other_mismatch:
            if (!contextual) {
                throw ValidationError("label " + std::string(name(label)) +
                                      " requires a contextual_type");
            }
            if (*contextual == lexical) {
                throw ValidationError("label " + std::string(name(label)) +
                                      " requires contextual_type != lexical_type");
            }
            return contextual;
        case SentenceLabel::unrestricted:
            if (contextual) {
                throw ValidationError("label unrestricted forbids a contextual_type");
            }
            return std::nullopt;
    }
    return std::nullopt;
}

AlignmentError::AlignmentError(std::vector<std::string> missing, std::vector<std::string> extra)
    : Error([&] {
          std::string msg = "dataset/bundle id mismatch:";
          msg += " " + std::to_string(missing.size()) + " missing from bundle";
          for (const auto& id : missing) msg += " [" + id + "]";
          msg += "; " + std::to_string(extra.size()) + " extra in bundle";
          for (const auto& id : extra) msg += " [" + id + "]";
          return msg;
      }()),
      missing_(std::move(missing)),
      extra_(std::move(extra)) {}

}  // namespace semtype
