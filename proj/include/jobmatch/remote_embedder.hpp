#pragma once

// Adapter for an external embedding service.
//
// Wire contract: HTTP POST of {"texts": [...], "dimension": n}; the reply is
// {"vectors": [[...], ...]} in request order with one n-dimensional vector
// per text. Documents are sent as render(doc), i.e. after PII masking.

#include <stdexcept>
#include <string>

#include "jobmatch/semantic_match.hpp"

namespace jobmatch {

class ProviderError : public std::runtime_error {
public:
    ProviderError(const std::string& what, unsigned attempts, int status)
        : std::runtime_error(what + " (attempts=" + std::to_string(attempts) + ", status=" + std::to_string(status) + ")"),
          attempts_(attempts), status_(status) {}

    unsigned attempts() const noexcept { return attempts_; }
    // Last HTTP status, or -1 when no response was received.
    int status() const noexcept { return status_; }

private:
    unsigned attempts_;
    int status_;
};

class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig config);

    std::size_t dimension() const override { return config_.dimension; }
    EmbeddingVector embed(const NormalizedDoc& doc) const override;
    // Splits into batch_size requests with at most max_in_flight outstanding;
    // `jobs` is ignored.
    std::vector<EmbeddingVector> embed_batch(std::span<const NormalizedDoc> docs, unsigned jobs = 1) const override;

    std::vector<EmbeddingVector> embed_texts(const std::vector<std::string>& texts) const;

private:
    EmbedderConfig config_;
    std::string host_port_;  // "http://host:port"
    std::string path_;
};

}  // namespace jobmatch
