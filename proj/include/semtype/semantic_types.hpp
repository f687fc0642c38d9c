#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace semtype {

/// The closed vocabulary of semantic types. Enumerator order is the canonical
/// order used for every matrix and CSV layout.
enum class SemanticType : std::uint8_t {
    animal,
    artifact,
    activity,
    food,
    human,
    info,
    location,
    mood,
    process,
    state,
};

inline constexpr std::size_t kTypeCount = 10;

inline constexpr std::array<SemanticType, kTypeCount> kAllTypes = {
    SemanticType::animal, SemanticType::artifact, SemanticType::activity, SemanticType::food,
    SemanticType::human,  SemanticType::info,     SemanticType::location, SemanticType::mood,
    SemanticType::process, SemanticType::state,
};

enum class SentenceLabel : std::uint8_t {
    matching,
    coercion,
    other_mismatch,
    unrestricted,
};

inline constexpr std::size_t kLabelCount = 4;

inline constexpr std::array<SentenceLabel, kLabelCount> kAllLabels = {
    SentenceLabel::matching, SentenceLabel::coercion, SentenceLabel::other_mismatch,
    SentenceLabel::unrestricted,
};

constexpr std::size_t index_of(SemanticType t) noexcept { return static_cast<std::size_t>(t); }
constexpr std::size_t index_of(SentenceLabel l) noexcept { return static_cast<std::size_t>(l); }

std::string_view name(SemanticType t) noexcept;
std::string_view name(SentenceLabel l) noexcept;

/// Exact, lowercase match only. Throws ValidationError on anything else.
SemanticType parse_semantic_type(std::string_view s);
SentenceLabel parse_sentence_label(std::string_view s);

std::optional<SemanticType> try_parse_semantic_type(std::string_view s) noexcept;
std::optional<SentenceLabel> try_parse_sentence_label(std::string_view s) noexcept;

/// Checks the (label, lexical type, contextual type) triple and returns the
/// normalized contextual type: matching yields the lexical type even when the
/// input omitted it. Throws ValidationError on an inconsistent triple.
std::optional<SemanticType> normalize_contextual_type(SentenceLabel label, SemanticType lexical,
                                                      std::optional<SemanticType> contextual);

}  // namespace semtype
