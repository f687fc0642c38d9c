#include "semtype/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "semtype/error.hpp"

namespace semtype {

namespace {

using Vec = std::vector<double>;

double distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    Vec unit_vector(std::size_t dim) {
        Vec v(dim);
        double norm = 0.0;
        do {
            for (auto& x : v) x = normal_(rng_);
            norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        } while (norm == 0.0);
        for (auto& x : v) x /= norm;
        return v;
    }

    /// center + isotropic noise with expected norm ~scale.
    Vec around(const Vec& center, double scale) {
        const double sd = scale / std::sqrt(static_cast<double>(center.size()));
        Vec v(center);
        for (auto& x : v) x += sd * normal_(rng_);
        return v;
    }

    std::size_t uniform_index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

void append(std::vector<float>& out, const Vec& v) {
    for (const double x : v) out.push_back(static_cast<float>(x));
}

}  // namespace

void SynthConfig::validate() const {
    if (dim == 0) throw ValidationError("synth: dim must be positive");
    if (lemmas_per_type == 0) throw ValidationError("synth: lemmas_per_type must be positive");
    if (instances_per_lemma == 0) throw ValidationError("synth: instances_per_lemma must be positive");
    if (!(within_type_sigma > 0.0)) throw ValidationError("synth: within_type_sigma must be positive");
    if (!(masked_context_sigma > 0.0)) throw ValidationError("synth: masked_context_sigma must be positive");
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!unit(coercion_fraction) || !unit(unrestricted_fraction)) {
        throw ValidationError("synth: label fractions must lie in [0, 1]");
    }
    if (coercion_fraction + unrestricted_fraction > 1.0) {
        throw ValidationError("synth: coercion_fraction + unrestricted_fraction exceeds 1");
    }
    if (!unit(coercion_mix)) throw ValidationError("synth: coercion_mix must lie in [0, 1]");
    if (model_id.empty()) throw ValidationError("synth: model_id must not be empty");
}

SynthCorpus generate(const SynthConfig& config) {
    config.validate();
    Sampler sampler(config.seed);

    const double min_separation = 4.0 * config.within_type_sigma;
    std::vector<Vec> centroids;
    bool separated = false;
    for (std::size_t attempt = 0; attempt <= config.max_retries && !separated; ++attempt) {
        centroids.clear();
        for (std::size_t t = 0; t < kTypeCount; ++t) centroids.push_back(sampler.unit_vector(config.dim));
        separated = true;
        for (std::size_t a = 0; a < kTypeCount && separated; ++a) {
            for (std::size_t b = a + 1; b < kTypeCount && separated; ++b) {
                separated = distance(centroids[a], centroids[b]) >= min_separation;
            }
        }
    }
    if (!separated) {
        throw ValidationError(fmt::format("synth: cannot place 10 centroids {:.3g} apart in dim {} after {} retries",
                                          min_separation, config.dim, config.max_retries));
    }
    Vec global_mean(config.dim, 0.0);
    for (const auto& c : centroids) {
        for (std::size_t i = 0; i < config.dim; ++i) global_mean[i] += c[i] / static_cast<double>(kTypeCount);
    }

    const std::size_t total = kTypeCount * config.lemmas_per_type * config.instances_per_lemma;
    const auto n_coercion = static_cast<std::size_t>(std::llround(config.coercion_fraction * static_cast<double>(total)));
    const auto n_unrestricted =
        std::min(total - n_coercion,
                 static_cast<std::size_t>(std::llround(config.unrestricted_fraction * static_cast<double>(total))));
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), sampler.engine());
    std::vector<SentenceLabel> labels(total, SentenceLabel::matching);
    for (std::size_t i = 0; i < n_coercion; ++i) labels[order[i]] = SentenceLabel::coercion;
    for (std::size_t i = n_coercion; i < n_coercion + n_unrestricted; ++i) labels[order[i]] = SentenceLabel::unrestricted;

    std::vector<InstanceRecord> records;
    records.reserve(total);
    std::vector<std::string> ids;
    ids.reserve(total);
    std::vector<float> plain;
    std::vector<float> masked;
    plain.reserve(total * config.dim);
    masked.reserve(total * config.dim);

    std::size_t index = 0;
    for (const auto type : kAllTypes) {
        const auto& own = centroids[index_of(type)];
        for (std::size_t l = 0; l < config.lemmas_per_type; ++l) {
            const std::string lemma = fmt::format("{}{}", name(type), l);
            for (std::size_t i = 0; i < config.instances_per_lemma; ++i, ++index) {
                InstanceRecord r;
                r.id = fmt::format("{}_{:03}", lemma, i);
                r.lemma = lemma;
                r.sentence = fmt::format("The {} appears in synthetic context {}.", lemma, i);
                r.span = {4, 4 + lemma.size()};
                r.lexical_type = type;
                r.label = labels[index];

                Vec p;
                Vec m;
                switch (r.label) {
                    case SentenceLabel::coercion: {
                        auto other = sampler.uniform_index(kTypeCount - 1);
                        if (other >= index_of(type)) ++other;
                        r.contextual_type = kAllTypes[other];
                        const auto& ctx = centroids[other];
                        Vec mix(config.dim);
                        for (std::size_t d = 0; d < config.dim; ++d) {
                            mix[d] = (1.0 - config.coercion_mix) * own[d] + config.coercion_mix * ctx[d];
                        }
                        p = sampler.around(mix, config.within_type_sigma);
                        m = sampler.around(ctx, config.masked_context_sigma);
                        break;
                    }
                    case SentenceLabel::unrestricted:
                        p = sampler.around(own, config.within_type_sigma);
                        m = sampler.around(global_mean, 3.0 * config.masked_context_sigma);
                        break;
                    default:
                        r.contextual_type = type;
                        p = sampler.around(own, config.within_type_sigma);
                        m = sampler.around(own, config.masked_context_sigma);
                        break;
                }
                append(plain, p);
                append(masked, m);
                ids.push_back(r.id);
                records.push_back(std::move(r));
            }
        }
    }

    return SynthCorpus{
        Dataset(std::move(records)),
        EmbeddingBundle(VariantTag{config.model_id, false, kLayerPolicy}, config.dim, ids, std::move(plain)),
        EmbeddingBundle(VariantTag{config.model_id, true, kLayerPolicy}, config.dim, ids, std::move(masked)),
    };
}

}  // namespace semtype
