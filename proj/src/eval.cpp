#include "jobmatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "jobmatch/errors.hpp"
#include "jobmatch/parallel.hpp"

namespace jobmatch {

Metrics metrics(const ConfusionCounts& c) {
    Metrics m;
    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

ConfusionCounts confusion(std::span<const ScreenOutcome> outcomes, std::span<const LabeledPair> corpus) {
    if (outcomes.size() != corpus.size()) {
        throw std::invalid_argument("confusion: " + std::to_string(outcomes.size()) + " decisions for " +
                                    std::to_string(corpus.size()) + " pairs");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].pair_id != corpus[i].pair_id) {
            throw std::invalid_argument("confusion: pair id mismatch at position " + std::to_string(i) + " (" +
                                        std::to_string(outcomes[i].pair_id) + " vs " +
                                        std::to_string(corpus[i].pair_id) + ")");
        }
        const bool adv = outcomes[i].decision == Decision::advance;
        const bool qual = corpus[i].label == Label::qualified;
        if (adv && qual) ++c.tp;
        else if (adv) ++c.fp;
        else if (qual) ++c.fn;
        else ++c.tn;
    }
    return c;
}

std::string screener_name(const Screener& s) {
    struct V {
        std::string operator()(const KeywordScreener&) const { return "keyword"; }
        std::string operator()(const SemanticScreener&) const { return "semantic"; }
        std::string operator()(const FunctionScreener& f) const { return f.name; }
    };
    return std::visit(V{}, s);
}

double screener_threshold(const Screener& s) {
    if (const auto* k = std::get_if<KeywordScreener>(&s)) return k->options.threshold;
    if (const auto* m = std::get_if<SemanticScreener>(&s)) return m->threshold;
    return 0.0;
}

Screener with_threshold(Screener s, double threshold) {
    if (auto* k = std::get_if<KeywordScreener>(&s)) k->options.threshold = threshold;
    if (auto* m = std::get_if<SemanticScreener>(&s)) m->threshold = threshold;
    return s;
}

NormalizedDoc ingest_resume(const LabeledPair& pair, const EvalContext& ctx) {
    return ingest_document(pair.resume_text, InputFormat::sectioned, ctx.pii_rules);
}

NormalizedDoc ingest_job(const LabeledPair& pair, const EvalContext& ctx) {
    return ingest_document(pair.job.text, InputFormat::sectioned, ctx.pii_rules);
}

ScoreTable score_corpus(std::span<const LabeledPair> corpus, const Screener& screener, const EvalContext& ctx) {
    const std::size_t n = corpus.size();
    ScoreTable t;
    t.pair_ids.resize(n);
    t.scores.assign(n, 0.0);
    t.gate.assign(n, true);
    std::vector<NormalizedDoc> resumes(n), jobs(n);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        resumes[i] = ingest_resume(corpus[i], ctx);
        jobs[i] = ingest_job(corpus[i], ctx);
    });
    for (std::size_t i = 0; i < n; ++i) t.pair_ids[i] = corpus[i].pair_id;

    if (const auto* k = std::get_if<KeywordScreener>(&screener)) {
        std::vector<char> gate(n, 1);
        parallel_for(n, ctx.jobs, [&](std::size_t i) {
            const RuleSet rules = compile_rules(corpus[i].job, ctx.ontology, k->options);
            t.scores[i] = score_keyword(resumes[i], rules);
            gate[i] = hard_terms_present(resumes[i], rules) ? 1 : 0;
        });
        for (std::size_t i = 0; i < n; ++i) t.gate[i] = gate[i] != 0;
    } else if (const auto* s = std::get_if<SemanticScreener>(&screener)) {
        const auto embedder = make_embedder(s->embedder, ctx.ontology);
        std::vector<EmbeddingVector> rv, jv;
        try {
            rv = embedder->embed_batch(resumes, ctx.jobs);
            jv = embedder->embed_batch(jobs, ctx.jobs);
        } catch (const UnembeddableDocument&) {
            // find the offending pair for a useful message
            for (std::size_t i = 0; i < n; ++i) {
                try {
                    (void)embedder->embed(resumes[i]);
                    (void)embedder->embed(jobs[i]);
                } catch (const UnembeddableDocument& e) {
                    throw std::runtime_error("pair " + std::to_string(corpus[i].pair_id) + ": " + e.what());
                }
            }
            throw;
        }
        for (std::size_t i = 0; i < n; ++i) t.scores[i] = cosine(rv[i], jv[i]);
    } else {
        const auto& f = std::get<FunctionScreener>(screener);
        std::vector<char> gate(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            const auto [d, score] = f.fn(resumes[i], jobs[i], corpus[i]);
            t.scores[i] = score;
            gate[i] = d == Decision::advance ? 1 : 0;
        }
        // gate carries the function's own decision
        for (std::size_t i = 0; i < n; ++i) t.gate[i] = gate[i] != 0;
    }
    return t;
}

std::vector<ScreenOutcome> apply_threshold(const ScoreTable& table, double threshold) {
    std::vector<ScreenOutcome> out;
    out.reserve(table.scores.size());
    for (std::size_t i = 0; i < table.scores.size(); ++i) {
        const bool adv = table.gate[i] && table.scores[i] >= threshold;
        out.push_back({table.pair_ids[i], adv ? Decision::advance : Decision::reject, table.scores[i]});
    }
    return out;
}

std::vector<ScreenOutcome> run_screen(std::span<const LabeledPair> corpus, const Screener& screener,
                                      const EvalContext& ctx) {
    const ScoreTable t = score_corpus(corpus, screener, ctx);
    if (std::holds_alternative<FunctionScreener>(screener)) {
        std::vector<ScreenOutcome> out;
        for (std::size_t i = 0; i < t.scores.size(); ++i)
            out.push_back({t.pair_ids[i], t.gate[i] ? Decision::advance : Decision::reject, t.scores[i]});
        return out;
    }
    return apply_threshold(t, screener_threshold(screener));
}

namespace {

void check_thresholds(std::span<const double> thresholds, const Screener& screener) {
    const double lo = std::holds_alternative<KeywordScreener>(screener) ? 0.0 : -1.0;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const double v = thresholds[i];
        if (!std::isfinite(v) || v < lo || v > 1.0)
            throw std::invalid_argument("threshold " + std::to_string(v) + " out of range");
        if (i > 0 && !(v > thresholds[i - 1]))
            throw std::invalid_argument("thresholds must be strictly increasing");
    }
}

}  // namespace

SweepResult threshold_sweep(std::span<const LabeledPair> corpus, const Screener& screener,
                            std::span<const double> thresholds, const EvalContext& ctx) {
    if (std::holds_alternative<FunctionScreener>(screener))
        throw std::invalid_argument("threshold sweep needs a thresholded screener");
    check_thresholds(thresholds, screener);
    const ScoreTable t = score_corpus(corpus, screener, ctx);
    SweepResult r;
    r.parameter_name = std::holds_alternative<KeywordScreener>(screener) ? "keyword_threshold" : "semantic_threshold";
    for (const double th : thresholds) {
        const auto outcomes = apply_threshold(t, th);
        const ConfusionCounts c = confusion(outcomes, corpus);
        r.rows.push_back({th, metrics(c), c});
    }
    return r;
}

std::vector<LabeledPair> select_split(std::span<const LabeledPair> corpus, Split split) {
    std::vector<LabeledPair> out;
    for (const auto& p : corpus) {
        const bool even = p.pair_id % 2 == 0;
        if (split == Split::all || (split == Split::calibration && even) || (split == Split::test && !even))
            out.push_back(p);
    }
    return out;
}

std::vector<NoiseSweepRow> noise_sweep(const CorpusConfig& base, std::span<const NoiseLevel> levels,
                                       std::span<const Screener> screeners, std::uint64_t seed,
                                       const EvalContext& ctx, Split split) {
    if (std::none_of(levels.begin(), levels.end(), [](const NoiseLevel& l) { return l.name == "none"; }))
        throw std::invalid_argument("noise sweep needs the \"none\" baseline level");
    std::vector<NoiseSweepRow> rows;
    for (const auto& level : levels) {
        CorpusConfig cfg = base;
        cfg.noise = level;
        const auto corpus = select_split(generate_pairs(ctx.ontology, cfg, seed, ctx.jobs), split);
        for (const auto& s : screeners) {
            const auto outcomes = run_screen(corpus, s, ctx);
            const ConfusionCounts c = confusion(outcomes, corpus);
            rows.push_back({level.name, screener_name(s), c, metrics(c)});
        }
    }
    return rows;
}

ErrorBreakdown categorize_false_negatives(std::span<const LabeledPair> corpus, const Screener& screener,
                                          const EvalContext& ctx) {
    const auto outcomes = run_screen(corpus, screener, ctx);
    std::vector<LabeledPair> misses;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].label == Label::qualified && outcomes[i].decision == Decision::reject) {
            LabeledPair p = corpus[i];
            p.resume_text = canonical_rendering(p.resume_text, ctx.ontology);
            misses.push_back(std::move(p));
        }
    }
    ErrorBreakdown b;
    if (misses.empty()) return b;
    const auto rerun = run_screen(misses, screener, ctx);
    for (const auto& o : rerun) {
        if (o.decision == Decision::advance) ++b.fn_lexical;
        else ++b.fn_other;
    }
    b.fraction_lexical = static_cast<double>(b.fn_lexical) / static_cast<double>(b.fn());
    return b;
}

CalibrationResult calibrate_scores(const ScoreTable& table, std::span<const LabeledPair> calibration_split,
                                   const CalibrationTarget& target) {
    if (table.scores.size() != calibration_split.size())
        throw std::invalid_argument("calibration: score table does not match the split");
    const std::size_t n = table.scores.size();
    if (n == 0) throw CalibrationError("calibration split is empty", 0.0);
    if (!(target.value >= 0.0 && target.value <= 1.0))
        throw std::invalid_argument("calibration target must be in [0, 1]");

    std::set<double> candidates(table.scores.begin(), table.scores.end());
    double best = target.kind == CalibrationTarget::Kind::advance_rate ? 1.0 : 0.0;
    for (const double th : candidates) {
        const auto outcomes = apply_threshold(table, th);
        const ConfusionCounts c = confusion(outcomes, calibration_split);
        if (target.kind == CalibrationTarget::Kind::advance_rate) {
            const double rate = static_cast<double>(c.tp + c.fp) / static_cast<double>(n);
            if (rate <= target.value + 1e-12) return {th, rate, n};
            best = std::min(best, rate);
        } else {
            const double p = metrics(c).precision;
            if (p >= target.value - 1e-12) return {th, p, n};
            best = std::max(best, p);
        }
    }
    const bool rate = target.kind == CalibrationTarget::Kind::advance_rate;
    throw CalibrationError(std::string("calibration target ") + (rate ? "advance rate <= " : "precision >= ") +
                               std::to_string(target.value) + " is unattainable; best achievable is " +
                               std::to_string(best),
                           best);
}

CalibrationResult calibrate(std::span<const LabeledPair> corpus, const Screener& screener,
                            const CalibrationTarget& target, const EvalContext& ctx) {
    if (std::holds_alternative<FunctionScreener>(screener))
        throw std::invalid_argument("calibration needs a thresholded screener");
    const auto split = select_split(corpus, Split::calibration);
    return calibrate_scores(score_corpus(split, screener, ctx), split, target);
}

}  // namespace jobmatch
