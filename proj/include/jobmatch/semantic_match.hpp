#pragma once

// Shared embedding space for resumes and jobs, scored by cosine similarity.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jobmatch/decision.hpp"
#include "jobmatch/ingest.hpp"
#include "jobmatch/ontology.hpp"

namespace jobmatch {

class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t dimension() const noexcept { return values_.size(); }
    double norm() const noexcept { return norm_; }

    bool operator==(const EmbeddingVector& other) const { return values_ == other.values_; }

private:
    std::vector<double> values_;
    double norm_ = 0.0;
};

enum class EmbedderKind { concept_space, ngram_hash, remote };

std::string_view to_string(EmbedderKind k);
EmbedderKind parse_embedder_kind(std::string_view s);

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::concept_space;
    std::size_t dimension = 256;
    double concept_weight = 1.0;
    double ngram_weight = 0.1;
    std::optional<std::string> provider_endpoint;
    std::uint64_t model_seed = 0;

    // remote only
    double timeout_seconds = 10.0;
    unsigned retries = 2;
    unsigned max_in_flight = 8;
    std::size_t batch_size = 16;

    bool operator==(const EmbedderConfig&) const = default;
};

// Throws std::invalid_argument.
void validate(const EmbedderConfig& config);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    virtual EmbeddingVector embed(const NormalizedDoc& doc) const = 0;
    // Results are in input order.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const NormalizedDoc> docs, unsigned jobs = 1) const;
};

// concept_space: concept_weight * sum of per-concept unit vectors (each
// detected concept once) + ngram_weight * the L2-normalized hashed character
// trigram vector of tokens not covered by a concept, normalized to unit
// length. ngram_hash: the trigram vector over all tokens.
class LocalEmbedder final : public Embedder {
public:
    LocalEmbedder(const Ontology& ontology, EmbedderConfig config);

    std::size_t dimension() const override { return config_.dimension; }
    EmbeddingVector embed(const NormalizedDoc& doc) const override;

    // Deterministic pseudo-random unit vector seeded by (model_seed, concept id).
    const std::vector<double>& concept_vector(std::string_view concept_id) const;
    std::vector<std::string> detected_concepts(const NormalizedDoc& doc) const;

private:
    void add_trigrams(std::string_view token, std::vector<double>& acc) const;

    const Ontology& ontology_;
    EmbedderConfig config_;
    std::unordered_map<std::string, std::vector<double>> concept_vectors_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config, const Ontology& ontology);

EmbeddingVector embed(const NormalizedDoc& doc, const Ontology& ontology, const EmbedderConfig& config);

// (a . b) / (|a| |b|), clamped to [-1, 1]. Throws std::invalid_argument on
// dimension mismatch or a zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// advance iff score >= threshold. Throws std::invalid_argument if the
// threshold is outside [-1, 1].
Decision decide_semantic(double score, double threshold);

}  // namespace jobmatch
