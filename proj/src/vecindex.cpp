#include "jobmatch/vecindex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <queue>

#include "jobmatch/rng.hpp"

namespace jobmatch {

namespace {

constexpr char kMagic[4] = {'J', 'M', 'V', 'X'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr int kMaxLevel = 32;

// Higher score first, then lower node index. Used everywhere a total order is
// needed so graph construction never depends on heap tie behaviour.
struct Better {
    bool operator()(const std::pair<double, std::uint32_t>& a, const std::pair<double, std::uint32_t>& b) const {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    }
};

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(std::string_view s) { buf_.append(s); }
    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw IndexFormatError("index payload truncated");
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace

VecIndex::VecIndex(std::size_t dimension, std::optional<HnswParams> ann)
    : dimension_(dimension), params_(ann.value_or(HnswParams{})), has_graph_(ann.has_value()),
      rng_state_(params_.seed) {
    if (dimension_ == 0) throw std::invalid_argument("index dimension must be positive");
    if (has_graph_ && (params_.M < 2 || params_.ef_construction < 1))
        throw std::invalid_argument("HNSW needs M >= 2 and ef_construction >= 1");
}

std::span<const double> VecIndex::vector(std::size_t node) const {
    if (node >= ids_.size()) throw std::out_of_range("node out of range");
    return {data_.data() + node * dimension_, dimension_};
}

std::optional<std::size_t> VecIndex::find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> VecIndex::entry_point() const {
    if (entry_ == kNoEntry) return std::nullopt;
    return entry_;
}

double VecIndex::dot(std::span<const double> q, std::uint32_t node) const {
    const double* v = data_.data() + static_cast<std::size_t>(node) * dimension_;
    double s = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i) s += q[i] * v[i];
    return std::clamp(s, -1.0, 1.0);
}

double VecIndex::dot_nodes(std::uint32_t a, std::uint32_t b) const { return dot(vector(a), b); }

std::vector<double> VecIndex::normalized_query(std::span<const double> query) const {
    if (query.size() != dimension_)
        throw std::invalid_argument("query dimension " + std::to_string(query.size()) + " != index dimension " +
                                    std::to_string(dimension_));
    double norm = 0.0;
    for (double x : query) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("zero or non-finite vector");
    std::vector<double> out(query.begin(), query.end());
    for (double& x : out) x /= norm;
    return out;
}

int VecIndex::draw_level() {
    SplitMix64 rng(rng_state_);
    const double u = 1.0 - rng.uniform01();
    rng_state_ = rng.state();
    const double ml = 1.0 / std::log(static_cast<double>(params_.M));
    return std::min(kMaxLevel, static_cast<int>(std::floor(-std::log(u) * ml)));
}

void VecIndex::add(std::string id, std::span<const double> vector) {
    if (frozen_) throw std::logic_error("index is frozen");
    if (vector.size() != dimension_)
        throw std::invalid_argument("vector dimension " + std::to_string(vector.size()) + " != index dimension " +
                                    std::to_string(dimension_));
    if (by_id_.count(id)) throw std::invalid_argument("duplicate id '" + id + "'");
    if (ids_.size() >= kNoEntry) throw std::length_error("index is full");
    auto unit = normalized_query(vector);

    const auto node = static_cast<std::uint32_t>(ids_.size());
    data_.insert(data_.end(), unit.begin(), unit.end());
    by_id_.emplace(id, node);
    ids_.push_back(std::move(id));
    links_.emplace_back();
    if (has_graph_) link(node);
}

std::vector<VecIndex::Scored> VecIndex::search_layer(std::span<const double> q, std::uint32_t entry, std::size_t ef,
                                                     int layer) const {
    std::vector<std::uint8_t> visited(ids_.size(), 0);
    // candidates: best first; results: worst on top.
    auto worse = [](const Scored& a, const Scored& b) { return Better{}(b, a); };
    std::priority_queue<Scored, std::vector<Scored>, decltype(worse)> candidates(worse);
    std::priority_queue<Scored, std::vector<Scored>, Better> results;

    const Scored start{dot(q, entry), entry};
    visited[entry] = 1;
    candidates.push(start);
    results.push(start);
    while (!candidates.empty()) {
        const Scored current = candidates.top();
        if (results.size() >= ef && Better{}(results.top(), current)) break;
        candidates.pop();
        const auto& layer_links = links_[current.second];
        if (static_cast<std::size_t>(layer) >= layer_links.size()) continue;
        for (std::uint32_t nb : layer_links[static_cast<std::size_t>(layer)]) {
            if (visited[nb]) continue;
            visited[nb] = 1;
            const Scored s{dot(q, nb), nb};
            if (results.size() < ef || Better{}(s, results.top())) {
                candidates.push(s);
                results.push(s);
                if (results.size() > ef) results.pop();
            }
        }
    }
    std::vector<Scored> out;
    out.reserve(results.size());
    while (!results.empty()) {
        out.push_back(results.top());
        results.pop();
    }
    std::sort(out.begin(), out.end(), Better{});
    return out;
}

// Keeps a candidate only if it is closer to the base than to every neighbour
// already kept. `candidates` must be sorted best first.
std::vector<std::uint32_t> VecIndex::select_neighbors(const std::vector<Scored>& candidates, std::size_t m) const {
    std::vector<std::uint32_t> kept;
    for (const auto& [score, node] : candidates) {
        if (kept.size() >= m) break;
        bool diverse = true;
        for (std::uint32_t k : kept) {
            if (dot_nodes(node, k) > score) {
                diverse = false;
                break;
            }
        }
        if (diverse) kept.push_back(node);
    }
    return kept;
}

void VecIndex::link(std::uint32_t node) {
    const int level = draw_level();
    links_[node].resize(static_cast<std::size_t>(level) + 1);
    if (entry_ == kNoEntry) {
        entry_ = node;
        max_level_ = level;
        return;
    }
    const auto q = vector(node);
    std::uint32_t ep = entry_;
    double ep_score = dot(q, ep);
    for (int layer = max_level_; layer > level; --layer) {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::uint32_t nb : links_[ep][static_cast<std::size_t>(layer)]) {
                const double s = dot(q, nb);
                if (Better{}({s, nb}, {ep_score, ep})) {
                    ep = nb;
                    ep_score = s;
                    changed = true;
                }
            }
        }
    }
    for (int layer = std::min(level, max_level_); layer >= 0; --layer) {
        const auto found = search_layer(q, ep, params_.ef_construction, layer);
        const auto chosen = select_neighbors(found, params_.M);
        links_[node][static_cast<std::size_t>(layer)] = chosen;
        for (std::uint32_t nb : chosen) {
            auto& nb_links = links_[nb][static_cast<std::size_t>(layer)];
            nb_links.push_back(node);
            if (nb_links.size() > max_links(layer)) {
                std::vector<Scored> scored;
                scored.reserve(nb_links.size());
                for (std::uint32_t x : nb_links) scored.emplace_back(dot_nodes(nb, x), x);
                std::sort(scored.begin(), scored.end(), Better{});
                nb_links = select_neighbors(scored, max_links(layer));
            }
        }
        ep = found.front().second;
    }
    if (level > max_level_) {
        max_level_ = level;
        entry_ = node;
    }
}

QueryResult VecIndex::finish(std::vector<Scored> scored, std::size_t k, bool exact) const {
    const auto by_score_then_id = [&](const Scored& a, const Scored& b) {
        return a.first != b.first ? a.first > b.first : ids_[a.second] < ids_[b.second];
    };
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      by_score_then_id);
    QueryResult r;
    r.exact = exact;
    r.hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) r.hits.push_back({ids_[scored[i].second], scored[i].first});
    return r;
}

QueryResult VecIndex::query_exact(std::span<const double> query, std::size_t k) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (ids_.empty()) throw std::logic_error("query on an empty index");
    const auto q = normalized_query(query);
    std::vector<Scored> scored(ids_.size());
    for (std::uint32_t i = 0; i < ids_.size(); ++i) scored[i] = {dot(q, i), i};
    return finish(std::move(scored), k, true);
}

QueryResult VecIndex::query_ann(std::span<const double> query, std::size_t k, std::size_t ef_search) const {
    if (!has_graph_) throw std::logic_error("index has no ANN graph");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (ef_search < k) throw std::invalid_argument("ef_search must be >= k");
    if (ids_.empty()) throw std::logic_error("query on an empty index");
    const auto q = normalized_query(query);
    std::uint32_t ep = entry_;
    double ep_score = dot(q, ep);
    for (int layer = max_level_; layer > 0; --layer) {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::uint32_t nb : links_[ep][static_cast<std::size_t>(layer)]) {
                const double s = dot(q, nb);
                if (Better{}({s, nb}, {ep_score, ep})) {
                    ep = nb;
                    ep_score = s;
                    changed = true;
                }
            }
        }
    }
    return finish(search_layer(q, ep, ef_search, 0), k, false);
}

void VecIndex::save(std::ostream& out) const {
    Writer p;
    p.u32(static_cast<std::uint32_t>(dimension_));
    p.u64(ids_.size());
    p.u8(has_graph_ ? 1 : 0);
    p.u32(static_cast<std::uint32_t>(params_.M));
    p.u32(static_cast<std::uint32_t>(params_.ef_construction));
    p.u64(params_.seed);
    p.u64(rng_state_);
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        p.u32(static_cast<std::uint32_t>(ids_[i].size()));
        p.bytes(ids_[i]);
        for (double x : vector(i)) p.f64(x);
    }
    if (has_graph_) {
        p.u32(entry_);
        p.i32(max_level_);
        for (const auto& node : links_) {
            p.u32(static_cast<std::uint32_t>(node.size()));
            for (const auto& layer : node) {
                p.u32(static_cast<std::uint32_t>(layer.size()));
                for (std::uint32_t nb : layer) p.u32(nb);
            }
        }
    }
    Writer header;
    header.bytes(std::string_view(kMagic, 4));
    header.u32(kFormatVersion);
    header.u64(p.data().size());
    header.u64(fnv1a64(p.data()));
    out.write(header.data().data(), static_cast<std::streamsize>(header.data().size()));
    out.write(p.data().data(), static_cast<std::streamsize>(p.data().size()));
    if (!out) throw std::runtime_error("failed writing index");
}

VecIndex VecIndex::load(std::istream& in) {
    char head[24];
    if (!in.read(head, sizeof head)) throw IndexFormatError("index header truncated");
    if (!std::equal(kMagic, kMagic + 4, head)) throw IndexFormatError("not an index file (bad magic)");
    Reader h(std::string_view(head + 4, 20));
    const std::uint32_t version = h.u32();
    if (version != kFormatVersion)
        throw IndexFormatError("index format version " + std::to_string(version) + " not supported (expected " +
                               std::to_string(kFormatVersion) + ")");
    const std::uint64_t length = h.u64();
    const std::uint64_t checksum = h.u64();

    std::string payload;
    constexpr std::size_t kChunk = 1 << 20;
    while (payload.size() < length) {
        const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, length - payload.size()));
        const std::size_t old = payload.size();
        payload.resize(old + want);
        in.read(payload.data() + old, static_cast<std::streamsize>(want));
        if (static_cast<std::size_t>(in.gcount()) != want) throw IndexFormatError("index payload truncated");
    }
    if (in.peek() != std::char_traits<char>::eof()) throw IndexFormatError("trailing bytes after index payload");
    if (fnv1a64(payload) != checksum) throw IndexFormatError("index checksum mismatch");

    Reader r(payload);
    const std::uint32_t dimension = r.u32();
    const std::uint64_t count = r.u64();
    const bool graph = r.u8() != 0;
    HnswParams params;
    params.M = r.u32();
    params.ef_construction = r.u32();
    params.seed = r.u64();
    if (dimension == 0) throw IndexFormatError("index dimension is zero");
    if (count > r.remaining() / (4 + 8ULL * dimension)) throw IndexFormatError("index entry count exceeds payload");

    VecIndex index(dimension, graph ? std::optional<HnswParams>(params) : std::nullopt);
    index.params_ = params;
    index.rng_state_ = r.u64();
    index.ids_.reserve(count);
    index.data_.reserve(count * dimension);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string id = r.bytes(r.u32());
        if (!index.by_id_.emplace(id, static_cast<std::uint32_t>(i)).second)
            throw IndexFormatError("duplicate id in index file");
        index.ids_.push_back(std::move(id));
        for (std::uint32_t d = 0; d < dimension; ++d) index.data_.push_back(r.f64());
    }
    index.links_.resize(count);
    if (graph) {
        index.entry_ = r.u32();
        index.max_level_ = r.i32();
        if ((count == 0) != (index.entry_ == kNoEntry) || (count > 0 && index.entry_ >= count))
            throw IndexFormatError("index entry point out of range");
        for (auto& node : index.links_) {
            const std::uint32_t levels = r.u32();
            if (levels == 0 || levels > kMaxLevel + 1) throw IndexFormatError("bad node level count");
            node.resize(levels);
            for (auto& layer : node) {
                const std::uint32_t n = r.u32();
                if (n > r.remaining() / 4) throw IndexFormatError("neighbor list exceeds payload");
                layer.resize(n);
                for (auto& nb : layer) {
                    nb = r.u32();
                    if (nb >= count) throw IndexFormatError("neighbor id out of range");
                }
            }
        }
    }
    if (!r.done()) throw IndexFormatError("unexpected bytes at end of index payload");
    return index;
}

bool VecIndex::operator==(const VecIndex& o) const {
    return dimension_ == o.dimension_ && params_ == o.params_ && has_graph_ == o.has_graph_ && ids_ == o.ids_ &&
           data_ == o.data_ && links_ == o.links_ && entry_ == o.entry_ && max_level_ == o.max_level_ &&
           rng_state_ == o.rng_state_;
}

}  // namespace jobmatch
