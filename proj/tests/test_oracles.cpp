#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "jobmatch/eval.hpp"
#include "jobmatch/rng.hpp"
#include "jobmatch/vecindex.hpp"
#include "oracles/brute_force_knn.hpp"
#include "oracles/metrics_oracle.hpp"

using namespace jobmatch;

namespace {

std::map<std::string, std::string> golden(const std::string& name) {
    std::ifstream in(jmtest::test_dir() / "golden" / name);
    std::map<std::string, std::string> out;
    for (std::string k, v; in >> k >> v;) out[k] = v;
    return out;
}

// Counts realizing a given precision and recall on 10000 qualified pairs.
ConfusionCounts counts_for(double p, double r) {
    const std::size_t q = 10000;
    const auto tp = static_cast<std::size_t>(std::llround(r * q));
    const auto fp = static_cast<std::size_t>(std::llround(double(tp) / p - double(tp)));
    return {tp, fp, 0, q - tp};
}

}  // namespace

TEST(MetricsOracle, ExhaustiveSmallCounts) {
    std::size_t cases = 0;
    for (std::size_t tp = 0; tp <= 20; ++tp)
        for (std::size_t fp = 0; fp <= 20; ++fp)
            for (std::size_t tn = 0; tn <= 20; ++tn)
                for (std::size_t fn = 0; fn <= 20; ++fn) {
                    const Metrics m = metrics({tp, fp, tn, fn});
                    const oracle::PRF o = oracle::prf(tp, fp, fn);
                    ASSERT_NEAR(m.precision, o.p, 1e-12);
                    ASSERT_NEAR(m.recall, o.r, 1e-12);
                    ASSERT_NEAR(m.f1, o.f1, 1e-12);
                    ++cases;
                }
    EXPECT_EQ(cases, 194481u);
}

TEST(MetricsOracle, ReferenceF1Values) {
    struct Row {
        double p, r, f1;
    };
    const Row rows[] = {{0.62, 0.45, 0.52}, {0.89, 0.92, 0.90}, {0.81, 0.96, 0.88},
                        {0.86, 0.94, 0.90}, {0.91, 0.89, 0.90}, {0.94, 0.81, 0.87}};
    for (const Row& row : rows) {
        EXPECT_NEAR(oracle::f1_from(row.p, row.r), row.f1, 0.005);
        const Metrics m = metrics(counts_for(row.p, row.r));
        EXPECT_NEAR(m.precision, row.p, 1e-3);
        EXPECT_NEAR(m.recall, row.r, 1e-3);
        EXPECT_NEAR(m.f1, row.f1, 0.005);
    }
}

TEST(KnnOracle, MatchesIndexOnSmallFixture) {
    std::vector<std::pair<std::string, std::vector<double>>> data{
        {"x", {1, 0, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}}, {"xy", {1, 1, 0}}, {"yz", {0, 2, 2}}};
    const auto want = oracle::knn(data, {1, 1, 1}, 5);
    VecIndex idx(3);
    for (const auto& [id, v] : data) idx.add(id, v);
    const auto got = idx.query_exact(std::vector<double>{1, 1, 1}, 5);
    ASSERT_EQ(got.hits.size(), 5u);
    EXPECT_EQ(want[0].first, "xy");
    EXPECT_EQ(want[1].first, "yz");
    EXPECT_NEAR(want[0].second, 2.0 / std::sqrt(6.0), 1e-15);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(got.hits[i].id, want[i].first);
        EXPECT_EQ(got.hits[i].score, want[i].second);
    }
}

TEST(Golden, DefaultCorpus) {
    const auto g = golden("default_corpus.txt");
    ASSERT_FALSE(g.empty()) << "missing golden file";
    std::ostringstream out;
    write_corpus(out, jmtest::default_corpus("medium"));
    const std::string text = out.str();
    std::size_t q = 0;
    for (const auto& p : jmtest::default_corpus("medium")) q += p.label == Label::qualified;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    EXPECT_EQ(hex, g.at("fnv1a64"));
    EXPECT_EQ(std::to_string(q), g.at("qualified"));
}

TEST(Golden, SplitMix64Reference) {
    // First outputs for seed 1234567, as published with the algorithm.
    SplitMix64 r(1234567);
    EXPECT_EQ(r.next(), 6457827717110365317ULL);
    EXPECT_EQ(r.next(), 3203168211198807973ULL);
    EXPECT_EQ(r.next(), 9817491932198370423ULL);
}

TEST(Golden, Fnv1aReference) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}
