#include "jobmatch/semantic_match.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "jobmatch/errors.hpp"
#include "jobmatch/parallel.hpp"
#include "jobmatch/remote_embedder.hpp"
#include "jobmatch/rng.hpp"

namespace jobmatch {

namespace {

double l2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void scale(std::vector<double>& v, double f) {
    for (double& x : v) x *= f;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)), norm_(l2(values_)) {}

std::string_view to_string(EmbedderKind k) {
    switch (k) {
        case EmbedderKind::concept_space: return "concept_space";
        case EmbedderKind::ngram_hash: return "ngram_hash";
        case EmbedderKind::remote: return "remote";
    }
    return "concept_space";
}

EmbedderKind parse_embedder_kind(std::string_view s) {
    if (s == "concept_space") return EmbedderKind::concept_space;
    if (s == "ngram_hash") return EmbedderKind::ngram_hash;
    if (s == "remote") return EmbedderKind::remote;
    throw std::invalid_argument("unknown embedder kind '" + std::string(s) + "'");
}

void validate(const EmbedderConfig& c) {
    if (c.dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
    if (c.kind == EmbedderKind::remote) {
        if (!c.provider_endpoint || c.provider_endpoint->empty())
            throw std::invalid_argument("remote embedder needs provider_endpoint");
        if (c.max_in_flight == 0 || c.batch_size == 0)
            throw std::invalid_argument("max_in_flight and batch_size must be positive");
        if (!(c.timeout_seconds > 0.0)) throw std::invalid_argument("timeout must be positive");
        return;
    }
    if (!(c.concept_weight >= 0.0) || !(c.ngram_weight >= 0.0))
        throw std::invalid_argument("embedder weights must be non-negative");
    if (!(c.concept_weight + c.ngram_weight > 0.0))
        throw std::invalid_argument("concept_weight + ngram_weight must be positive");
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const NormalizedDoc> docs, unsigned jobs) const {
    std::vector<EmbeddingVector> out(docs.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = embed(docs[i]); });
    return out;
}

LocalEmbedder::LocalEmbedder(const Ontology& ontology, EmbedderConfig config)
    : ontology_(ontology), config_(std::move(config)) {
    validate(config_);
    if (config_.kind == EmbedderKind::remote) throw std::invalid_argument("LocalEmbedder cannot be remote");
    for (const auto& c : ontology_.concepts()) {
        SplitMix64 rng(derive_seed(config_.model_seed, fnv1a64(c.id), 0));
        std::vector<double> v(config_.dimension);
        for (double& x : v) x = rng.normal();
        scale(v, 1.0 / l2(v));
        concept_vectors_.emplace(c.id, std::move(v));
    }
}

const std::vector<double>& LocalEmbedder::concept_vector(std::string_view concept_id) const {
    auto it = concept_vectors_.find(std::string(concept_id));
    if (it == concept_vectors_.end()) throw std::out_of_range("unknown concept id '" + std::string(concept_id) + "'");
    return it->second;
}

std::vector<std::string> LocalEmbedder::detected_concepts(const NormalizedDoc& doc) const {
    std::set<std::string> ids;
    for (const auto& hit : scan_concepts(doc.tokens, ontology_)) ids.insert(hit.concept_ptr->id);
    return {ids.begin(), ids.end()};
}

void LocalEmbedder::add_trigrams(std::string_view token, std::vector<double>& acc) const {
    std::string padded;
    padded.reserve(token.size() + 2);
    padded.push_back('#');
    padded.append(token);
    padded.push_back('#');
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, 3));
        const double sign = ((h >> 32) & 1U) ? -1.0 : 1.0;
        acc[h % config_.dimension] += sign;
    }
}

EmbeddingVector LocalEmbedder::embed(const NormalizedDoc& doc) const {
    const std::size_t n = config_.dimension;
    std::vector<double> trigrams(n, 0.0);
    std::vector<double> out(n, 0.0);

    if (config_.kind == EmbedderKind::ngram_hash) {
        for (const auto& t : doc.tokens) add_trigrams(t, trigrams);
    } else {
        std::vector<bool> covered(doc.tokens.size(), false);
        std::set<std::string_view> seen;
        for (const auto& hit : scan_concepts(doc.tokens, ontology_)) {
            for (std::size_t i = hit.begin; i < hit.end; ++i) covered[i] = true;
            if (!seen.insert(hit.concept_ptr->id).second) continue;
            const auto& cv = concept_vectors_.at(hit.concept_ptr->id);
            for (std::size_t d = 0; d < n; ++d) out[d] += config_.concept_weight * cv[d];
        }
        if (config_.ngram_weight > 0.0)
            for (std::size_t i = 0; i < doc.tokens.size(); ++i)
                if (!covered[i]) add_trigrams(doc.tokens[i], trigrams);
    }

    const double tri_norm = l2(trigrams);
    if (tri_norm > 0.0) {
        const double w = config_.kind == EmbedderKind::ngram_hash ? 1.0 : config_.ngram_weight;
        for (std::size_t d = 0; d < n; ++d) out[d] += w * trigrams[d] / tri_norm;
    }
    const double norm = l2(out);
    if (!(norm > 0.0)) throw UnembeddableDocument();
    scale(out, 1.0 / norm);
    return EmbeddingVector(std::move(out));
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config, const Ontology& ontology) {
    validate(config);
    if (config.kind == EmbedderKind::remote) return std::make_unique<RemoteEmbedder>(config);
    return std::make_unique<LocalEmbedder>(ontology, config);
}

EmbeddingVector embed(const NormalizedDoc& doc, const Ontology& ontology, const EmbedderConfig& config) {
    return make_embedder(config, ontology)->embed(doc);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                                    std::to_string(b.dimension()));
    if (!(a.norm() > 0.0) || !(b.norm() > 0.0)) throw std::invalid_argument("cosine of a zero vector");
    const auto av = a.values();
    const auto bv = b.values();
    double dot = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
    return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

Decision decide_semantic(double score, double threshold) {
    if (!(threshold >= -1.0 && threshold <= 1.0)) throw std::invalid_argument("semantic threshold must be in [-1,1]");
    return score >= threshold ? Decision::advance : Decision::reject;
}

}  // namespace jobmatch
