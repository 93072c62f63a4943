#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "common.hpp"
#include "jobmatch/eval.hpp"
#include "jobmatch/rng.hpp"
#include "jobmatch/vecindex.hpp"
#include "oracles/brute_force_knn.hpp"

using namespace jobmatch;

namespace {

using Data = std::vector<std::pair<std::string, std::vector<double>>>;

std::vector<double> random_vec(SplitMix64& rng, std::size_t d) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    return v;
}

Data make_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Data out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back("id" + std::to_string(i), random_vec(rng, d));
    return out;
}

VecIndex build(const Data& data, std::size_t d, std::optional<HnswParams> ann = HnswParams{}) {
    VecIndex idx(d, ann);
    for (const auto& [id, v] : data) idx.add(id, v);
    idx.freeze();
    return idx;
}

std::string bytes_of(const VecIndex& idx) {
    std::ostringstream out;
    idx.save(out);
    return out.str();
}

VecIndex from_bytes(const std::string& s) {
    std::istringstream in(s);
    return VecIndex::load(in);
}

double recall(const QueryResult& ann, const QueryResult& exact) {
    std::set<std::string> truth;
    for (const auto& h : exact.hits) truth.insert(h.id);
    std::size_t found = 0;
    for (const auto& h : ann.hits) found += truth.count(h.id);
    return static_cast<double>(found) / static_cast<double>(exact.hits.size());
}

}  // namespace

TEST(VecIndex, AddAndErrors) {
    VecIndex idx(3);
    idx.add("a", std::vector<double>{1, 0, 0});
    EXPECT_EQ(idx.size(), 1u);
    EXPECT_THROW(idx.add("a", std::vector<double>{0, 1, 0}), std::invalid_argument);
    EXPECT_THROW(idx.add("b", std::vector<double>{0, 1}), std::invalid_argument);
    EXPECT_THROW(idx.add("c", std::vector<double>{0, 0, 0}), std::invalid_argument);
    idx.freeze();
    EXPECT_THROW(idx.add("d", std::vector<double>{0, 0, 1}), std::logic_error);
    EXPECT_THROW(VecIndex(3).query_exact(std::vector<double>{1, 0, 0}, 1), std::logic_error);
    EXPECT_THROW(idx.query_exact(std::vector<double>{1, 0, 0}, 0), std::invalid_argument);
    EXPECT_THROW(idx.query_ann(std::vector<double>{1, 0, 0}, 1), std::logic_error);
}

TEST(VecIndex, StoredVectorsAreUnit) {
    const auto data = make_data(200, 8, 1);
    const VecIndex idx = build(data, 8, std::nullopt);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        double n = 0;
        for (double x : idx.vector(i)) n += x * x;
        EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
    }
}

TEST(VecIndex, ExactMatchesBruteForceOracle) {
    const std::size_t d = 16;
    const auto data = make_data(1000, d, 7);
    const VecIndex idx = build(data, d, std::nullopt);
    SplitMix64 rng(99);
    for (int q = 0; q < 100; ++q) {
        const auto query = random_vec(rng, d);
        const auto got = idx.query_exact(query, 10);
        const auto want = oracle::knn(data, query, 10);
        EXPECT_TRUE(got.exact);
        ASSERT_EQ(got.hits.size(), want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            ASSERT_EQ(got.hits[i].id, want[i].first);
            ASSERT_EQ(got.hits[i].score, want[i].second);
        }
    }
}

TEST(VecIndex, TiesBreakById) {
    VecIndex idx(2);
    idx.add("b", std::vector<double>{1, 0});
    idx.add("a", std::vector<double>{2, 0});
    idx.add("c", std::vector<double>{0, 1});
    const auto r = idx.query_exact(std::vector<double>{1, 0}, 3);
    ASSERT_EQ(r.hits.size(), 3u);
    EXPECT_EQ(r.hits[0].id, "a");
    EXPECT_EQ(r.hits[1].id, "b");
    EXPECT_EQ(r.hits[2].id, "c");
    EXPECT_EQ(idx.query_exact(std::vector<double>{1, 0}, 10).hits.size(), 3u);
}

TEST(VecIndex, ExactKIsPrefixMonotone) {
    const auto data = make_data(300, 8, 3);
    const VecIndex idx = build(data, 8, std::nullopt);
    SplitMix64 rng(5);
    const auto q = random_vec(rng, 8);
    const auto all = idx.query_exact(q, 300).hits;
    for (std::size_t k = 1; k < 40; ++k) {
        const auto hk = idx.query_exact(q, k).hits;
        ASSERT_TRUE(std::equal(hk.begin(), hk.end(), all.begin()));
    }
}

TEST(VecIndex, GraphInvariants) {
    const auto data = make_data(2000, 16, 11);
    const VecIndex idx = build(data, 16);
    for (std::size_t n = 0; n < idx.size(); ++n) {
        for (int layer = 0; layer <= idx.level(n); ++layer) {
            const auto& nb = idx.neighbors(n, layer);
            ASSERT_LE(nb.size(), layer == 0 ? 32u : 16u);
            for (auto x : nb) {
                ASSERT_LT(x, idx.size());
                ASSERT_NE(x, n);
                ASSERT_GE(idx.level(x), layer);
            }
        }
    }
}

TEST(VecIndex, AnnAtFullEfEqualsExact) {
    const auto data = make_data(1000, 16, 21);
    const VecIndex idx = build(data, 16);
    SplitMix64 rng(4);
    for (int q = 0; q < 30; ++q) {
        const auto query = random_vec(rng, 16);
        const auto ann = idx.query_ann(query, 10, idx.size());
        const auto exact = idx.query_exact(query, 10);
        EXPECT_FALSE(ann.exact);
        EXPECT_EQ(ann.hits, exact.hits);
    }
}

TEST(VecIndex, AnnSelfQueryOn10k) {
    const std::size_t d = 64;
    const auto data = make_data(10000, d, 2024);
    const VecIndex idx = build(data, d);
    for (std::size_t i = 0; i < data.size(); i += 97) {
        const auto r = idx.query_ann(data[i].second, 1);
        ASSERT_EQ(r.hits.at(0).id, data[i].first);
    }
    // Isotropic 64-d noise needs a wider beam than the default.
    SplitMix64 rng(77);
    double total = 0;
    for (int q = 0; q < 100; ++q) {
        const auto query = random_vec(rng, d);
        total += recall(idx.query_ann(query, 10, 256), idx.query_exact(query, 10));
    }
    EXPECT_GE(total / 100.0, 0.95);
}

TEST(VecIndex, AnnRecallOnDocumentEmbeddings) {
    const EvalContext ctx{jmtest::ontology(), jmtest::pii_rules(), 1};
    const auto embed_all = [&](std::size_t pairs, std::uint64_t seed) {
        const auto corpus = generate_pairs(jmtest::ontology(), jmtest::config("medium", pairs), seed);
        std::vector<NormalizedDoc> docs;
        for (const auto& p : corpus) {
            docs.push_back(ingest_resume(p, ctx));
            docs.push_back(ingest_job(p, ctx));
        }
        return make_embedder(EmbedderConfig{}, jmtest::ontology())->embed_batch(docs);
    };
    const auto data = embed_all(5000, 42);
    VecIndex idx(256, HnswParams{});
    for (std::size_t i = 0; i < data.size(); ++i) idx.add("d" + std::to_string(i), data[i]);
    idx.freeze();
    ASSERT_EQ(idx.size(), 10000u);
    const auto queries = embed_all(50, 7);
    double total = 0;
    for (const auto& q : queries) total += recall(idx.query_ann(q.values(), 10), idx.query_exact(q.values(), 10));
    EXPECT_GE(total / double(queries.size()), 0.95);
}

TEST(VecIndex, SelfQueryExactOn10k) {
    const std::size_t d = 32;
    const auto data = make_data(10000, d, 8);
    const VecIndex idx = build(data, d, std::nullopt);
    for (const auto& [id, v] : data) {
        const auto r = idx.query_exact(v, 1);
        ASSERT_EQ(r.hits[0].id, id);
        ASSERT_NEAR(r.hits[0].score, 1.0, 1e-12);
    }
}

TEST(VecIndex, SaveLoadRoundTrip) {
    const VecIndex empty = build({}, 4);
    EXPECT_EQ(from_bytes(bytes_of(empty)), empty);
    const VecIndex flat_empty = build({}, 4, std::nullopt);
    EXPECT_EQ(from_bytes(bytes_of(flat_empty)), flat_empty);

    const auto data = make_data(10000, 24, 31);
    for (const bool graph : {false, true}) {
        const VecIndex idx = build(data, 24, graph ? std::optional<HnswParams>(HnswParams{}) : std::nullopt);
        const std::string bytes = bytes_of(idx);
        const VecIndex back = from_bytes(bytes);
        EXPECT_EQ(back, idx);
        EXPECT_EQ(bytes_of(back), bytes);
        SplitMix64 rng(6);
        for (int q = 0; q < 20; ++q) {
            const auto query = random_vec(rng, 24);
            EXPECT_EQ(back.query_exact(query, 10).hits, idx.query_exact(query, 10).hits);
            if (graph) EXPECT_EQ(back.query_ann(query, 10).hits, idx.query_ann(query, 10).hits);
        }
    }
}

TEST(VecIndex, LoadedIndexKeepsGrowingIdentically) {
    const auto data = make_data(600, 8, 12);
    const Data first(data.begin(), data.begin() + 300);
    VecIndex a(8, HnswParams{});
    for (const auto& [id, v] : first) a.add(id, v);
    VecIndex b = from_bytes(bytes_of(a));
    for (std::size_t i = 300; i < data.size(); ++i) {
        a.add(data[i].first, data[i].second);
        b.add(data[i].first, data[i].second);
    }
    EXPECT_EQ(a, b);
}

TEST(VecIndex, CorruptionIsRejected) {
    const VecIndex idx = build(make_data(50, 4, 2), 4);
    const std::string good = bytes_of(idx);

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_THROW(from_bytes(bad_magic), IndexFormatError);

    std::string bad_version = good;
    bad_version[4] = 9;
    EXPECT_THROW(from_bytes(bad_version), IndexFormatError);

    std::string bad_length = good;
    bad_length[8] ^= 0x01;
    EXPECT_THROW(from_bytes(bad_length), IndexFormatError);

    std::string bad_sum = good;
    bad_sum[good.size() - 3] ^= 0x40;
    EXPECT_THROW(from_bytes(bad_sum), IndexFormatError);

    EXPECT_THROW(from_bytes(good.substr(0, good.size() - 1)), IndexFormatError);
    EXPECT_THROW(from_bytes(good + "x"), IndexFormatError);
    EXPECT_THROW(from_bytes(good.substr(0, 10)), IndexFormatError);
    EXPECT_THROW(from_bytes(""), IndexFormatError);
}
