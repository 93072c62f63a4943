#include <gtest/gtest.h>

#include <sstream>

#include "common.hpp"
#include "jobmatch/errors.hpp"
#include "jobmatch/experiment.hpp"

using namespace jobmatch;
using nlohmann::json;

namespace {

EvalContext ctx() { return {jmtest::ontology(), jmtest::pii_rules(), 1}; }

ExperimentConfig small(std::size_t n = 200) {
    ExperimentConfig c;
    c.corpus.n_pairs = n;
    return c;
}

std::vector<LabeledPair> corpus_for(const ExperimentConfig& c) {
    return generate_pairs(jmtest::ontology(), c.corpus, c.seed);
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
    const ExperimentConfig c;
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.corpus.noise.name, "medium");
    EXPECT_EQ(c.corpus.n_pairs, 1000u);
    EXPECT_DOUBLE_EQ(c.keyword.threshold, 0.75);
    EXPECT_DOUBLE_EQ(c.semantic_threshold, 0.70);
    ASSERT_TRUE(c.calibration_target());
    EXPECT_EQ(c.calibration_target()->kind, CalibrationTarget::Kind::advance_rate);
    EXPECT_DOUBLE_EQ(c.calibration_target()->value, 0.5);

    const json j = config_to_json(c);
    const ExperimentConfig back = config_from_json(j);
    EXPECT_EQ(config_to_json(back), j);
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, PartialOverrides) {
    const auto c = config_from_json(json::parse(
        R"({"seed":7,"corpus":{"n_pairs":50,"noise":"high"},"keyword":{"mode":"term_frequency"},
            "calibration":{"kind":"precision"},"sweep":{"thresholds":[0.5,0.6]}})"));
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.corpus.n_pairs, 50u);
    EXPECT_EQ(c.corpus.noise, noise_level("high"));
    EXPECT_EQ(c.keyword.mode, ScoringMode::term_frequency);
    EXPECT_EQ(c.calibration_target()->kind, CalibrationTarget::Kind::precision);
    EXPECT_DOUBLE_EQ(c.calibration_target()->value, 0.85);
    EXPECT_EQ(c.sweep_thresholds, (std::vector<double>{0.5, 0.6}));
    EXPECT_NE(config_hash(c), config_hash(ExperimentConfig{}));

    const auto off = config_from_json(json::parse(R"({"calibration":{"kind":"none"}})"));
    EXPECT_FALSE(off.calibration_target());
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(config_from_json(json::parse(R"({"sed":1})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"corpus":{"pairs":1}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"corpus":{"noise":"extreme"}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"keyword":{"mode":"fuzzy"}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"seed":"x"})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"calibration":{"kind":"recall"}})")), ConfigError);

    auto c = small();
    c.corpus.n_pairs = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = small();
    c.keyword.threshold = 1.5;
    EXPECT_THROW(validate(c), ConfigError);
    c = small();
    c.sweep_thresholds = {0.7, 0.6};
    EXPECT_THROW(validate(c), ConfigError);
    c = small();
    c.corpus.required_per_job = {4, 2};
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_NO_THROW(validate(small()));
}

TEST(Config, LoadErrors) {
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Experiment, RunShapeAndDeterminism) {
    const auto c = small();
    const auto corpus = corpus_for(c);
    const auto a = run_experiment(c, ctx(), corpus);
    const auto b = run_experiment(c, ctx(), corpus);
    EXPECT_EQ(a.n_pairs, 200u);
    EXPECT_EQ(a.n_calibration + a.n_test, 200u);
    EXPECT_EQ(a.keyword.counts.total(), a.n_test);
    EXPECT_EQ(a.semantic.counts.total(), a.n_test);
    ASSERT_TRUE(a.semantic.calibration);
    EXPECT_LE(a.semantic.calibration->achieved, 0.5 + 1e-12);
    EXPECT_EQ(a.semantic_sweep.rows.size(), c.sweep_thresholds.size());
    EXPECT_EQ(a.semantic.false_negatives.fn(), a.semantic.counts.fn);

    const auto& o = jmtest::ontology();
    const auto& p = jmtest::pii_rules();
    EXPECT_EQ(canonical_json(run_report(c, o, p, a)), canonical_json(run_report(c, o, p, b)));
    EXPECT_EQ(run_csv(a), run_csv(b));
    EXPECT_EQ(run_chart(a), run_chart(b));
}

TEST(Experiment, FixedThresholdsWithoutCalibration) {
    auto c = small();
    c.calibration.reset();
    const auto r = run_experiment(c, ctx(), corpus_for(c));
    EXPECT_FALSE(r.semantic.calibration);
    EXPECT_DOUBLE_EQ(r.semantic.threshold, 0.70);
    EXPECT_DOUBLE_EQ(r.keyword.threshold, 0.75);
}

TEST(Experiment, ReportFields) {
    const auto c = small();
    const auto r = run_experiment(c, ctx(), corpus_for(c));
    const json j = run_report(c, jmtest::ontology(), jmtest::pii_rules(), r);
    EXPECT_EQ(j.at("kind"), "run");
    EXPECT_EQ(j.at("seed"), 42);
    EXPECT_EQ(j.at("config_hash"), config_hash(c));
    EXPECT_EQ(j.at("ontology_version"), jmtest::ontology().version());
    EXPECT_TRUE(j.at("pipelines").contains("keyword"));
    EXPECT_TRUE(j.at("pipelines").contains("semantic"));
    const std::string text = canonical_json(j);
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(json::parse(text).dump() + "\n", text);
}

TEST(Experiment, CsvFormat) {
    const auto c = small();
    const auto r = run_experiment(c, ctx(), corpus_for(c));
    const auto rows = lines(run_csv(r));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], "screener,parameter,value,tp,fp,tn,fn,precision,recall,f1");
    EXPECT_EQ(rows[1].rfind("keyword,", 0), 0u);
    EXPECT_EQ(rows[2].rfind("semantic,", 0), 0u);
    EXPECT_EQ(format_real(0.5), "0.500000");
    EXPECT_EQ(csv_row("s", "p", "v", {1, 2, 3, 4}, {0.25, 0.5, 1.0 / 3}),
              "s,p,v,1,2,3,4,0.250000,0.500000,0.333333\n");

    const auto sweep_rows = lines(threshold_sweep_csv(r.semantic_sweep));
    EXPECT_EQ(sweep_rows.size(), 1 + c.sweep_thresholds.size());
}

TEST(Experiment, NoiseSweepReport) {
    auto c = small(100);
    const auto a = run_noise_sweep(c, ctx(), 42);
    const auto b = run_noise_sweep(c, ctx(), 42);
    ASSERT_EQ(a.rows.size(), 8u);
    EXPECT_DOUBLE_EQ(a.keyword_threshold, 0.75);
    EXPECT_EQ(noise_sweep_csv(a), noise_sweep_csv(b));
    EXPECT_EQ(noise_sweep_chart(a), noise_sweep_chart(b));
    EXPECT_EQ(lines(noise_sweep_csv(a)).size(), 9u);
    for (const auto& r : a.rows) EXPECT_EQ(r.counts.total(), 50u);

    const auto stats = noise_recall_over_seeds(c, ctx(), 42, 3);
    ASSERT_EQ(stats.size(), 8u);
    for (const auto& s : stats) {
        EXPECT_EQ(s.seeds, 3u);
        EXPECT_GE(s.mean, 0.0);
        EXPECT_LE(s.mean, 1.0);
        EXPECT_GE(s.stddev, 0.0);
    }
    const json j = noise_sweep_report(c, jmtest::ontology(), a, stats);
    EXPECT_EQ(canonical_json(j), canonical_json(noise_sweep_report(c, jmtest::ontology(), b, stats)));
}

TEST(Experiment, RecallMonotoneCheck) {
    SweepResult ok{"semantic_threshold", {{0.1, {0.5, 0.9, 0.6}, {}}, {0.2, {0.6, 0.8, 0.7}, {}}}};
    EXPECT_NO_THROW(check_recall_monotone(ok));
    SweepResult bad{"semantic_threshold", {{0.1, {0.5, 0.7, 0.6}, {}}, {0.2, {0.6, 0.8, 0.7}, {}}}};
    EXPECT_THROW(check_recall_monotone(bad), std::runtime_error);
}

TEST(Experiment, Charts) {
    const auto c = small();
    const auto r = run_experiment(c, ctx(), corpus_for(c));
    for (const std::string& svg : {run_chart(r), threshold_sweep_chart(r.semantic_sweep)}) {
        EXPECT_NE(svg.find("<svg "), std::string::npos);
        EXPECT_NE(svg.find("</svg>"), std::string::npos);
    }
}

TEST(Bench, DocumentVectors) {
    BenchConfig b;
    b.count = 600;
    b.queries = 20;
    const auto r = bench_index(b, ctx(), 42);
    EXPECT_EQ(r.count, 600u);
    EXPECT_EQ(r.dimension, 256u);
    EXPECT_GE(r.recall_at_k, 0.95);
    const auto r2 = bench_index(b, ctx(), 42);
    EXPECT_EQ(r.recall_at_k, r2.recall_at_k);
    EXPECT_EQ(canonical_json(bench_report(b, 42, r)), canonical_json(bench_report(b, 42, r2)));
    EXPECT_EQ(bench_report(b, 42, r).at("vectors"), "documents");
}

TEST(Bench, GaussianVectorsAndEdges) {
    BenchConfig b;
    b.vectors = BenchVectors::gaussian;
    b.count = 500;
    b.dimension = 8;
    b.queries = 20;
    EXPECT_GE(bench_index(b, ctx(), 42).recall_at_k, 0.95);

    b.count = 1;
    b.k = 1;
    EXPECT_EQ(bench_index(b, ctx(), 1).recall_at_k, 1.0);
    b.k = 2;
    EXPECT_THROW(bench_index(b, ctx(), 1), std::invalid_argument);
    EXPECT_EQ(parse_bench_vectors("gaussian"), BenchVectors::gaussian);
    EXPECT_THROW(parse_bench_vectors("uniform"), std::invalid_argument);
}
