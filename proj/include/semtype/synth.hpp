#pragma once

#include <cstdint>
#include <string>

#include "semtype/dataset.hpp"
#include "semtype/embedding_store.hpp"

namespace semtype {

/// Parameters of the synthetic type-geometry generator.
///
/// Ten unit-norm type centroids are drawn from a normalized standard Gaussian,
/// redrawn (up to `max_retries` times) until every pair is at least
/// 4 * within_type_sigma apart. Noise of scale s is isotropic Gaussian with
/// per-coordinate standard deviation s / sqrt(dim), so its expected norm is ~s.
///
///   plain    matching      centroid(lt) + noise(within_type_sigma)
///            coercion      (1 - mix) centroid(lt) + mix centroid(ct) + noise(within_type_sigma)
///            unrestricted  centroid(lt) + noise(within_type_sigma)
///   masked   matching      centroid(lt) + noise(masked_context_sigma)
///            coercion      centroid(ct) + noise(masked_context_sigma)
///            unrestricted  mean of centroids + noise(3 * masked_context_sigma)
///
/// Labels are assigned globally: round(fraction * N) instances for coercion and
/// unrestricted each, chosen by a seeded shuffle; the contextual type of a
/// coercion instance is uniform over the other nine types.
struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t dim = 32;
    std::size_t lemmas_per_type = 5;
    std::size_t instances_per_lemma = 12;
    double within_type_sigma = 0.2;
    double coercion_fraction = 0.1;
    double unrestricted_fraction = 0.1;
    double coercion_mix = 0.5;
    double masked_context_sigma = 0.3;
    std::size_t max_retries = 1000;
    std::string model_id = "synth";

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

struct SynthCorpus {
    Dataset dataset;
    EmbeddingBundle plain;
    EmbeddingBundle masked;
};

/// Deterministic for a given config. Throws ValidationError if the centroid
/// separation cannot be met within the retry budget.
SynthCorpus generate(const SynthConfig& config);

}  // namespace semtype
