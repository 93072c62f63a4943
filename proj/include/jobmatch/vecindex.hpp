#pragma once

// Embedding store with exact top-k cosine retrieval and an optional layered
// navigable small-world graph (HNSW) for approximate search.
//
// Vectors are normalized on insert, so every score is a dot product. Results
// are ordered by score descending, ties by id ascending.
//
// Threading: add() is single-writer. Once freeze() has been called the index
// rejects further inserts and const queries may run concurrently.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "jobmatch/semantic_match.hpp"

namespace jobmatch {

struct HnswParams {
    std::size_t M = 16;                 // max links per node on layers > 0 (2M on layer 0)
    std::size_t ef_construction = 200;  // candidate list size during insertion
    std::uint64_t seed = 42;            // level assignment

    bool operator==(const HnswParams&) const = default;
};

inline constexpr std::size_t kDefaultEfSearch = 64;

struct Hit {
    std::string id;
    double score;

    bool operator==(const Hit&) const = default;
};

struct QueryResult {
    std::vector<Hit> hits;
    bool exact = true;
};

class IndexFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VecIndex {
public:
    // With `ann` set, every insert also links the node into the graph.
    explicit VecIndex(std::size_t dimension, std::optional<HnswParams> ann = std::nullopt);

    // Throws std::invalid_argument on dimension mismatch, duplicate id or a
    // zero vector; std::logic_error once frozen.
    void add(std::string id, std::span<const double> vector);
    void add(std::string id, const EmbeddingVector& vector) { add(std::move(id), vector.values()); }

    void freeze() noexcept { frozen_ = true; }
    bool frozen() const noexcept { return frozen_; }

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    bool has_graph() const noexcept { return has_graph_; }
    const HnswParams& build_params() const noexcept { return params_; }

    const std::string& id(std::size_t node) const { return ids_.at(node); }
    std::span<const double> vector(std::size_t node) const;
    std::optional<std::size_t> find(const std::string& id) const;

    // Graph introspection; node levels are 0-based.
    int level(std::size_t node) const { return static_cast<int>(links_.at(node).size()) - 1; }
    const std::vector<std::uint32_t>& neighbors(std::size_t node, int layer) const {
        return links_.at(node).at(static_cast<std::size_t>(layer));
    }
    std::optional<std::size_t> entry_point() const;

    QueryResult query_exact(std::span<const double> query, std::size_t k) const;
    QueryResult query_ann(std::span<const double> query, std::size_t k,
                          std::size_t ef_search = kDefaultEfSearch) const;

    // Little-endian binary format, see docs/index_format.md.
    void save(std::ostream& out) const;
    static VecIndex load(std::istream& in);

    bool operator==(const VecIndex& other) const;

private:
    using Scored = std::pair<double, std::uint32_t>;

    double dot(std::span<const double> q, std::uint32_t node) const;
    double dot_nodes(std::uint32_t a, std::uint32_t b) const;
    std::vector<double> normalized_query(std::span<const double> query) const;
    int draw_level();
    std::vector<Scored> search_layer(std::span<const double> q, std::uint32_t entry, std::size_t ef, int layer) const;
    std::vector<std::uint32_t> select_neighbors(const std::vector<Scored>& candidates, std::size_t m) const;
    void link(std::uint32_t node);
    std::size_t max_links(int layer) const { return layer == 0 ? 2 * params_.M : params_.M; }
    QueryResult finish(std::vector<Scored> scored, std::size_t k, bool exact) const;

    std::size_t dimension_;
    HnswParams params_;
    bool has_graph_;
    bool frozen_ = false;
    std::vector<std::string> ids_;
    std::vector<double> data_;  // row-major, unit rows
    std::unordered_map<std::string, std::uint32_t> by_id_;
    std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // node -> layer -> neighbors
    std::uint32_t entry_ = kNoEntry;
    int max_level_ = -1;
    std::uint64_t rng_state_;

    static constexpr std::uint32_t kNoEntry = std::numeric_limits<std::uint32_t>::max();
};

}  // namespace jobmatch
