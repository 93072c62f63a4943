#pragma once

// Runs screening pipelines over labeled corpora and turns the decisions into
// confusion counts, precision/recall/F1, threshold and noise sweeps,
// false-negative attribution and threshold calibration.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jobmatch/corpusgen.hpp"
#include "jobmatch/decision.hpp"
#include "jobmatch/ingest.hpp"
#include "jobmatch/keyword_screen.hpp"
#include "jobmatch/semantic_match.hpp"

namespace jobmatch {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const Metrics&) const = default;
};

// Zero denominators yield 0.
Metrics metrics(const ConfusionCounts& c);

struct ScreenOutcome {
    std::uint64_t pair_id;
    Decision decision;
    double score;

    bool operator==(const ScreenOutcome&) const = default;
};

// Throws std::invalid_argument unless outcomes and corpus have the same
// pair ids in the same order.
ConfusionCounts confusion(std::span<const ScreenOutcome> outcomes, std::span<const LabeledPair> corpus);

struct KeywordScreener {
    KeywordOptions options;  // options.threshold is tau_kw
};

struct SemanticScreener {
    EmbedderConfig embedder;
    double threshold = 0.7;
};

// Arbitrary screening function over the ingested resume and job; used for
// baselines and tests.
struct FunctionScreener {
    std::string name;
    std::function<std::pair<Decision, double>(const NormalizedDoc& resume, const NormalizedDoc& job,
                                              const LabeledPair& pair)>
        fn;
};

using Screener = std::variant<KeywordScreener, SemanticScreener, FunctionScreener>;

std::string screener_name(const Screener& s);
double screener_threshold(const Screener& s);
Screener with_threshold(Screener s, double threshold);

struct EvalContext {
    const Ontology& ontology;
    const PiiRules& pii_rules;
    unsigned jobs = 1;
};

// Resumes and jobs go through the same ingest path (sectioned text, PII masking).
NormalizedDoc ingest_resume(const LabeledPair& pair, const EvalContext& ctx);
NormalizedDoc ingest_job(const LabeledPair& pair, const EvalContext& ctx);

// Threshold-free scores. `gate` is false where a pair can never advance
// whatever the threshold (keyword: a hard term is missing).
struct ScoreTable {
    std::vector<std::uint64_t> pair_ids;
    std::vector<double> scores;
    std::vector<bool> gate;
};

// Embeddings/keyword scores are computed once here and reused by every
// threshold applied afterwards. Embedder failures are rethrown as
// std::runtime_error naming the pair id.
ScoreTable score_corpus(std::span<const LabeledPair> corpus, const Screener& screener, const EvalContext& ctx);
std::vector<ScreenOutcome> apply_threshold(const ScoreTable& table, double threshold);

std::vector<ScreenOutcome> run_screen(std::span<const LabeledPair> corpus, const Screener& screener,
                                      const EvalContext& ctx);

struct SweepRow {
    double value;
    Metrics metrics;
    ConfusionCounts counts;
};

struct SweepResult {
    std::string parameter_name;
    std::vector<SweepRow> rows;
};

// thresholds must be strictly increasing and lie in [-1, 1] (semantic) or
// [0, 1] (keyword); otherwise std::invalid_argument.
SweepResult threshold_sweep(std::span<const LabeledPair> corpus, const Screener& screener,
                            std::span<const double> thresholds, const EvalContext& ctx);

struct NoiseSweepRow {
    std::string level;
    std::string screener;
    ConfusionCounts counts;
    Metrics metrics;
};

enum class Split { all, calibration, test };

// Even pair ids form the calibration split, odd ids the test split.
std::vector<LabeledPair> select_split(std::span<const LabeledPair> corpus, Split split);

// Regenerates the corpus at each level from the same seed, so only the
// lexical noise differs; screeners keep their thresholds. `levels` must
// contain "none".
std::vector<NoiseSweepRow> noise_sweep(const CorpusConfig& base, std::span<const NoiseLevel> levels,
                                       std::span<const Screener> screeners, std::uint64_t seed,
                                       const EvalContext& ctx, Split split = Split::all);

struct ErrorBreakdown {
    std::size_t fn_lexical = 0;
    std::size_t fn_other = 0;
    double fraction_lexical = 0.0;

    std::size_t fn() const noexcept { return fn_lexical + fn_other; }
};

// A false negative is lexical when the same screener advances the canonical
// rendering of the resume (every mention replaced by its canonical name).
ErrorBreakdown categorize_false_negatives(std::span<const LabeledPair> corpus, const Screener& screener,
                                          const EvalContext& ctx);

struct CalibrationTarget {
    enum class Kind { advance_rate, precision };
    Kind kind = Kind::advance_rate;
    double value = 0.5;

    bool operator==(const CalibrationTarget&) const = default;
};

class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, double best) : std::runtime_error(what), best_(best) {}
    double best_achievable() const noexcept { return best_; }

private:
    double best_;
};

struct CalibrationResult {
    double threshold;
    double achieved;  // advance rate or precision on the calibration split
    std::size_t n_calibration;
};

// Smallest observed score on the calibration split whose decision set meets
// the target: advance rate <= r, or precision >= p.
CalibrationResult calibrate_scores(const ScoreTable& table, std::span<const LabeledPair> calibration_split,
                                   const CalibrationTarget& target);
CalibrationResult calibrate(std::span<const LabeledPair> corpus, const Screener& screener,
                            const CalibrationTarget& target, const EvalContext& ctx);

}  // namespace jobmatch
