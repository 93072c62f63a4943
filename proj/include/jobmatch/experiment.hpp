#pragma once

// Experiment plumbing shared by the CLI and the acceptance suite: config
// parsing, the calibrated two-pipeline run, sweeps, the index benchmark and
// the report/CSV writers.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jobmatch/eval.hpp"
#include "jobmatch/vecindex.hpp"

namespace jobmatch {

// documents: concept-space embeddings of generated resumes and jobs.
// gaussian: isotropic random unit vectors, a much harder case for the graph.
enum class BenchVectors { documents, gaussian };

std::string_view to_string(BenchVectors v);
BenchVectors parse_bench_vectors(std::string_view s);

struct BenchConfig {
    BenchVectors vectors = BenchVectors::documents;
    std::size_t count = 10000;
    std::size_t dimension = 256;
    std::size_t k = 10;
    std::size_t queries = 100;
    std::size_t ef_search = kDefaultEfSearch;
    HnswParams hnsw;
};

struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::filesystem::path ontology_path;   // empty: bundled ontology
    std::filesystem::path pii_rules_path;  // empty: bundled rules
    CorpusConfig corpus = default_corpus();
    KeywordOptions keyword;
    EmbedderConfig embedder;
    double semantic_threshold = 0.70;  // used when calibration is off
    // nullopt: fixed thresholds. A target without explicit value uses the
    // corpus qualified fraction.
    std::optional<CalibrationTarget> calibration = CalibrationTarget{};
    bool calibration_value_explicit = false;
    std::vector<double> sweep_thresholds{0.60, 0.65, 0.70, 0.75, 0.80, 0.85};
    std::vector<std::string> noise_levels{"none", "low", "medium", "high"};
    std::size_t noise_seeds = 1;
    BenchConfig bench;

    static CorpusConfig default_corpus();
    // Resolved target (value filled in from the qualified fraction).
    std::optional<CalibrationTarget> calibration_target() const;
};

// Missing keys keep their defaults; unknown keys and invalid values throw
// ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& c);
// Throws ConfigError.
void validate(const ExperimentConfig& c);
// FNV-1a 64 of the canonical config JSON, 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct PipelineResult {
    std::string name;
    double threshold = 0.0;
    std::optional<CalibrationResult> calibration;
    ConfusionCounts counts;
    Metrics metrics;
    double advance_rate = 0.0;
    ErrorBreakdown false_negatives;
};

struct RunResult {
    std::size_t n_pairs = 0;
    std::size_t n_calibration = 0;
    std::size_t n_test = 0;
    PipelineResult keyword;
    PipelineResult semantic;
    SweepResult semantic_sweep;  // on the test split
};

// Calibrates on even pair ids (when enabled) and measures on odd ones.
RunResult run_experiment(const ExperimentConfig& config, const EvalContext& ctx,
                         std::span<const LabeledPair> corpus);

struct NoiseSweepReport {
    double keyword_threshold = 0.0;
    double semantic_threshold = 0.0;
    std::vector<NoiseSweepRow> rows;  // level-major, keyword then semantic
};

// The semantic threshold is calibrated once on the noise-free corpus (or
// fixed when calibration is off); the keyword threshold is the configured
// tau. Measured on the test split at every level.
NoiseSweepReport run_noise_sweep(const ExperimentConfig& config, const EvalContext& ctx, std::uint64_t seed);

struct RecallStats {
    std::string level;
    std::string screener;
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::size_t seeds = 0;
};

// Seeds seed, seed+1, ..., seed+n-1.
std::vector<RecallStats> noise_recall_over_seeds(const ExperimentConfig& config, const EvalContext& ctx,
                                                 std::uint64_t seed, std::size_t n);

struct BenchResult {
    std::size_t count = 0;
    std::size_t dimension = 0;
    std::size_t k = 0;
    std::size_t queries = 0;
    double recall_at_k = 0.0;
    double build_seconds = 0.0;
    double exact_qps = 0.0;
    double ann_qps = 0.0;
};

// Recall of query_ann against query_exact. Data and query vectors come from
// independent streams of the seed (separate corpora in documents mode).
BenchResult bench_index(const BenchConfig& config, const EvalContext& ctx, std::uint64_t seed);

std::string csv_header();
std::string csv_row(const std::string& screener, const std::string& parameter, const std::string& value,
                    const ConfusionCounts& c, const Metrics& m);
std::string format_real(double v);  // %.6f

std::string run_csv(const RunResult& r);
std::string threshold_sweep_csv(const SweepResult& sweep);
std::string noise_sweep_csv(const NoiseSweepReport& report);

nlohmann::json run_report(const ExperimentConfig& config, const Ontology& ontology, const PiiRules& pii,
                          const RunResult& r);
nlohmann::json threshold_sweep_report(const ExperimentConfig& config, const Ontology& ontology,
                                      const SweepResult& sweep, std::size_t n_test);
nlohmann::json noise_sweep_report(const ExperimentConfig& config, const Ontology& ontology,
                                  const NoiseSweepReport& report, const std::vector<RecallStats>& stats);
nlohmann::json bench_report(const BenchConfig& config, std::uint64_t seed, const BenchResult& r);

// Canonical JSON text: sorted keys, no whitespace, trailing newline.
std::string canonical_json(const nlohmann::json& j);

std::string run_chart(const RunResult& r);
std::string threshold_sweep_chart(const SweepResult& sweep);
std::string noise_sweep_chart(const NoiseSweepReport& report);

// Throws std::runtime_error when recall increases anywhere along the sweep.
void check_recall_monotone(const SweepResult& sweep);

}  // namespace jobmatch
