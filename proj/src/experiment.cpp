#include "jobmatch/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "jobmatch/charts.hpp"
#include "jobmatch/errors.hpp"
#include "jobmatch/file_io.hpp"
#include "jobmatch/rng.hpp"

namespace jobmatch {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSaltBenchData = 0x62656E6368ULL;  // "bench"
constexpr std::uint64_t kSaltBenchQuery = 0x7175657279ULL;  // "query"

// Strict reader over one JSON object: every key must be consumed.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const std::string& key) {
        if (!j_.contains(key)) return false;
        seen_.insert(key);
        return true;
    }
    const json& at(const std::string& key) const { return j_.at(key); }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key \"" + it.key() + "\"");
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

IntRange read_range(Reader& r, const std::string& key, IntRange def) {
    if (!r.has(key)) return def;
    const json& v = r.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned())
        throw ConfigError(r.where() + "." + key + ": expected [lo, hi] of non-negative integers");
    return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

template <class F>
auto wrap(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

double recall_of(const std::vector<NoiseSweepRow>& rows, const std::string& level, const std::string& screener) {
    for (const auto& r : rows)
        if (r.level == level && r.screener == screener) return r.metrics.recall;
    return 0.0;
}

json counts_json(const ConfusionCounts& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}; }

json metrics_json(const Metrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

json pipeline_json(const PipelineResult& p) {
    json j;
    j["threshold"] = p.threshold;
    j["counts"] = counts_json(p.counts);
    j["metrics"] = metrics_json(p.metrics);
    j["advance_rate"] = p.advance_rate;
    j["false_negatives"] = {{"fn_lexical", p.false_negatives.fn_lexical},
                            {"fn_other", p.false_negatives.fn_other},
                            {"fraction_lexical", p.false_negatives.fraction_lexical}};
    if (p.calibration) {
        j["calibration"] = {{"threshold", p.calibration->threshold},
                            {"achieved", p.calibration->achieved},
                            {"n_calibration", p.calibration->n_calibration}};
    } else {
        j["calibration"] = nullptr;
    }
    return j;
}

json sweep_rows_json(const SweepResult& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"value", r.value}, {"counts", counts_json(r.counts)}, {"metrics", metrics_json(r.metrics)}});
    return rows;
}

json header_json(const ExperimentConfig& config, const Ontology& ontology) {
    json j;
    j["config"] = config_to_json(config);
    j["config_hash"] = config_hash(config);
    j["ontology_version"] = ontology.version();
    j["seed"] = config.seed;
    return j;
}

std::string percent_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

CorpusConfig ExperimentConfig::default_corpus() {
    CorpusConfig c;
    c.noise = noise_level("medium");
    return c;
}

std::optional<CalibrationTarget> ExperimentConfig::calibration_target() const {
    if (!calibration) return std::nullopt;
    CalibrationTarget t = *calibration;
    if (!calibration_value_explicit) {
        t.value = t.kind == CalibrationTarget::Kind::advance_rate ? corpus.qualified_fraction : 0.85;
    }
    return t;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    Reader top(j, "config");
    top.get("seed", c.seed);
    if (top.has("seed") && !j.at("seed").is_number_unsigned()) throw ConfigError("config.seed: expected u64");
    std::string path;
    if (top.has("ontology_path")) {
        top.get("ontology_path", path);
        c.ontology_path = path;
    }
    if (top.has("pii_rules_path")) {
        path.clear();
        top.get("pii_rules_path", path);
        c.pii_rules_path = path;
    }
    if (top.has("corpus")) {
        Reader r(j.at("corpus"), "config.corpus");
        r.get("n_pairs", c.corpus.n_pairs);
        r.get("qualified_fraction", c.corpus.qualified_fraction);
        r.get("coverage_fraction", c.corpus.coverage_fraction);
        c.corpus.concepts_per_profile = read_range(r, "concepts_per_profile", c.corpus.concepts_per_profile);
        c.corpus.required_per_job = read_range(r, "required_per_job", c.corpus.required_per_job);
        c.corpus.optional_per_job = read_range(r, "optional_per_job", c.corpus.optional_per_job);
        if (r.has("noise")) {
            std::string name;
            r.get("noise", name);
            c.corpus.noise = wrap("config.corpus.noise", [&] { return noise_level(name); });
        }
        r.finish();
    }
    if (top.has("keyword")) {
        Reader r(j.at("keyword"), "config.keyword");
        r.get("threshold", c.keyword.threshold);
        r.get("hard_fraction", c.keyword.hard_fraction);
        r.get("default_weight", c.keyword.default_weight);
        if (r.has("mode")) {
            std::string m;
            r.get("mode", m);
            c.keyword.mode = wrap("config.keyword.mode", [&] { return parse_scoring_mode(m); });
        }
        r.finish();
    }
    if (top.has("embedder")) {
        Reader r(j.at("embedder"), "config.embedder");
        if (r.has("kind")) {
            std::string k;
            r.get("kind", k);
            c.embedder.kind = wrap("config.embedder.kind", [&] { return parse_embedder_kind(k); });
        }
        r.get("dimension", c.embedder.dimension);
        r.get("concept_weight", c.embedder.concept_weight);
        r.get("ngram_weight", c.embedder.ngram_weight);
        r.get("model_seed", c.embedder.model_seed);
        if (r.has("endpoint") && !r.at("endpoint").is_null()) {
            std::string e;
            r.get("endpoint", e);
            c.embedder.provider_endpoint = e;
        }
        r.get("timeout_seconds", c.embedder.timeout_seconds);
        r.get("retries", c.embedder.retries);
        r.get("max_in_flight", c.embedder.max_in_flight);
        r.get("batch_size", c.embedder.batch_size);
        r.finish();
    }
    top.get("semantic_threshold", c.semantic_threshold);
    if (top.has("calibration")) {
        const json& cj = j.at("calibration");
        if (cj.is_null()) {
            c.calibration.reset();
        } else {
            Reader r(cj, "config.calibration");
            CalibrationTarget t;
            std::string kind = "advance_rate";
            r.get("kind", kind);
            if (kind == "none") {
                c.calibration.reset();
            } else {
                if (kind == "advance_rate") t.kind = CalibrationTarget::Kind::advance_rate;
                else if (kind == "precision") t.kind = CalibrationTarget::Kind::precision;
                else throw ConfigError("config.calibration.kind: expected advance_rate, precision or none");
                if (r.has("value") && !r.at("value").is_null()) {
                    r.get("value", t.value);
                    c.calibration_value_explicit = true;
                }
                c.calibration = t;
            }
            r.finish();
        }
    }
    if (top.has("sweep")) {
        Reader r(j.at("sweep"), "config.sweep");
        r.get("thresholds", c.sweep_thresholds);
        r.get("noise_levels", c.noise_levels);
        r.get("noise_seeds", c.noise_seeds);
        r.finish();
    }
    if (top.has("bench")) {
        Reader r(j.at("bench"), "config.bench");
        if (r.has("vectors")) {
            std::string v;
            r.get("vectors", v);
            c.bench.vectors = wrap("config.bench.vectors", [&] { return parse_bench_vectors(v); });
        }
        r.get("count", c.bench.count);
        r.get("dimension", c.bench.dimension);
        r.get("k", c.bench.k);
        r.get("queries", c.bench.queries);
        r.get("ef_search", c.bench.ef_search);
        r.get("M", c.bench.hnsw.M);
        r.get("ef_construction", c.bench.hnsw.ef_construction);
        r.finish();
    }
    top.finish();
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["ontology_path"] = c.ontology_path.string();
    j["pii_rules_path"] = c.pii_rules_path.string();
    j["corpus"] = {{"n_pairs", c.corpus.n_pairs},
                   {"qualified_fraction", c.corpus.qualified_fraction},
                   {"coverage_fraction", c.corpus.coverage_fraction},
                   {"concepts_per_profile", {c.corpus.concepts_per_profile.lo, c.corpus.concepts_per_profile.hi}},
                   {"required_per_job", {c.corpus.required_per_job.lo, c.corpus.required_per_job.hi}},
                   {"optional_per_job", {c.corpus.optional_per_job.lo, c.corpus.optional_per_job.hi}},
                   {"noise", c.corpus.noise.name}};
    j["keyword"] = {{"threshold", c.keyword.threshold},
                    {"hard_fraction", c.keyword.hard_fraction},
                    {"default_weight", c.keyword.default_weight},
                    {"mode", std::string(to_string(c.keyword.mode))}};
    j["embedder"] = {{"kind", std::string(to_string(c.embedder.kind))},
                     {"dimension", c.embedder.dimension},
                     {"concept_weight", c.embedder.concept_weight},
                     {"ngram_weight", c.embedder.ngram_weight},
                     {"model_seed", c.embedder.model_seed},
                     {"endpoint", c.embedder.provider_endpoint ? json(*c.embedder.provider_endpoint) : json(nullptr)},
                     {"timeout_seconds", c.embedder.timeout_seconds},
                     {"retries", c.embedder.retries},
                     {"max_in_flight", c.embedder.max_in_flight},
                     {"batch_size", c.embedder.batch_size}};
    j["semantic_threshold"] = c.semantic_threshold;
    if (const auto t = c.calibration_target()) {
        j["calibration"] = {{"kind", t->kind == CalibrationTarget::Kind::advance_rate ? "advance_rate" : "precision"},
                            {"value", t->value}};
    } else {
        j["calibration"] = {{"kind", "none"}};
    }
    j["sweep"] = {{"thresholds", c.sweep_thresholds}, {"noise_levels", c.noise_levels}, {"noise_seeds", c.noise_seeds}};
    j["bench"] = {{"vectors", std::string(to_string(c.bench.vectors))},
                  {"count", c.bench.count},         {"dimension", c.bench.dimension},
                  {"k", c.bench.k},                 {"queries", c.bench.queries},
                  {"ef_search", c.bench.ef_search}, {"M", c.bench.hnsw.M},
                  {"ef_construction", c.bench.hnsw.ef_construction}};
    return j;
}

void validate(const ExperimentConfig& c) {
    const auto& k = c.corpus;
    if (k.n_pairs == 0) throw ConfigError("n_pairs must be positive");
    if (!(k.qualified_fraction >= 0.0 && k.qualified_fraction <= 1.0))
        throw ConfigError("qualified_fraction must be in [0, 1]");
    if (!(k.coverage_fraction > 0.0 && k.coverage_fraction <= 1.0))
        throw ConfigError("coverage_fraction must be in (0, 1]");
    for (const IntRange* r : {&k.concepts_per_profile, &k.required_per_job, &k.optional_per_job})
        if (r->lo > r->hi) throw ConfigError("range lo exceeds hi");
    if (k.concepts_per_profile.lo == 0 || k.required_per_job.lo == 0)
        throw ConfigError("profiles and jobs need at least one concept");
    if (!(c.keyword.hard_fraction >= 0.0 && c.keyword.hard_fraction <= 1.0))
        throw ConfigError("keyword.hard_fraction must be in [0, 1]");
    if (!(c.keyword.default_weight > 0.0)) throw ConfigError("keyword.default_weight must be positive");
    if (!(c.keyword.threshold >= 0.0 && c.keyword.threshold <= 1.0))
        throw ConfigError("keyword.threshold must be in [0, 1]");
    wrap("embedder", [&] {
        validate(c.embedder);
        return 0;
    });
    if (!(c.semantic_threshold >= -1.0 && c.semantic_threshold <= 1.0))
        throw ConfigError("semantic_threshold must be in [-1, 1]");
    if (const auto t = c.calibration_target(); t && !(t->value >= 0.0 && t->value <= 1.0))
        throw ConfigError("calibration.value must be in [0, 1]");
    for (std::size_t i = 0; i < c.sweep_thresholds.size(); ++i) {
        const double v = c.sweep_thresholds[i];
        if (!(v >= -1.0 && v <= 1.0)) throw ConfigError("sweep threshold out of [-1, 1]");
        if (i > 0 && !(v > c.sweep_thresholds[i - 1])) throw ConfigError("sweep thresholds must be strictly increasing");
    }
    bool has_none = false;
    for (const auto& l : c.noise_levels) {
        wrap("noise level", [&] { return noise_level(l); });
        has_none = has_none || l == "none";
    }
    if (!has_none) throw ConfigError("noise levels must include \"none\"");
    if (c.noise_seeds == 0) throw ConfigError("noise_seeds must be positive");
    const auto& b = c.bench;
    if (b.count == 0 || b.dimension == 0 || b.k == 0 || b.queries == 0)
        throw ConfigError("bench count, dimension, k and queries must be positive");
    if (b.k > b.count) throw ConfigError("bench k exceeds count");
    if (b.ef_search < b.k) throw ConfigError("bench ef_search must be at least k");
    if (b.hnsw.M < 2 || b.hnsw.ef_construction == 0) throw ConfigError("bench M must be >= 2 and ef_construction > 0");
}

std::string config_hash(const ExperimentConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_json(c).dump())));
    return buf;
}

namespace {

PipelineResult measure(const Screener& screener, const ExperimentConfig& config, const EvalContext& ctx,
                       std::span<const LabeledPair> cal, std::span<const LabeledPair> test) {
    PipelineResult p;
    p.name = screener_name(screener);
    Screener tuned = screener;
    if (const auto target = config.calibration_target()) {
        p.calibration = calibrate_scores(score_corpus(cal, screener, ctx), cal, *target);
        tuned = with_threshold(screener, p.calibration->threshold);
    }
    p.threshold = screener_threshold(tuned);
    const auto outcomes = run_screen(test, tuned, ctx);
    p.counts = confusion(outcomes, test);
    p.metrics = metrics(p.counts);
    p.advance_rate = test.empty() ? 0.0 : static_cast<double>(p.counts.tp + p.counts.fp) / test.size();
    p.false_negatives = categorize_false_negatives(test, tuned, ctx);
    return p;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const EvalContext& ctx,
                         std::span<const LabeledPair> corpus) {
    if (corpus.empty()) throw std::invalid_argument("corpus is empty");
    const auto cal = select_split(corpus, Split::calibration);
    const auto test = select_split(corpus, Split::test);
    RunResult r;
    r.n_pairs = corpus.size();
    r.n_calibration = cal.size();
    r.n_test = test.size();
    r.keyword = measure(KeywordScreener{config.keyword}, config, ctx, cal, test);
    r.semantic = measure(SemanticScreener{config.embedder, config.semantic_threshold}, config, ctx, cal, test);
    if (!config.sweep_thresholds.empty()) {
        r.semantic_sweep = threshold_sweep(test, SemanticScreener{config.embedder, config.semantic_threshold},
                                           config.sweep_thresholds, ctx);
        check_recall_monotone(r.semantic_sweep);
    }
    return r;
}

NoiseSweepReport run_noise_sweep(const ExperimentConfig& config, const EvalContext& ctx, std::uint64_t seed) {
    NoiseSweepReport rep;
    rep.keyword_threshold = config.keyword.threshold;
    rep.semantic_threshold = config.semantic_threshold;
    if (const auto target = config.calibration_target()) {
        CorpusConfig base = config.corpus;
        base.noise = noise_level("none");
        const auto corpus = generate_pairs(ctx.ontology, base, seed, ctx.jobs);
        rep.semantic_threshold =
            calibrate(corpus, SemanticScreener{config.embedder, config.semantic_threshold}, *target, ctx).threshold;
    }
    std::vector<NoiseLevel> levels;
    for (const auto& name : config.noise_levels) levels.push_back(noise_level(name));
    KeywordOptions kw = config.keyword;
    kw.threshold = rep.keyword_threshold;
    const std::vector<Screener> screeners{KeywordScreener{kw},
                                          SemanticScreener{config.embedder, rep.semantic_threshold}};
    rep.rows = noise_sweep(config.corpus, levels, screeners, seed, ctx, Split::test);
    return rep;
}

std::vector<RecallStats> noise_recall_over_seeds(const ExperimentConfig& config, const EvalContext& ctx,
                                                 std::uint64_t seed, std::size_t n) {
    std::vector<NoiseSweepReport> reports;
    for (std::size_t i = 0; i < n; ++i) reports.push_back(run_noise_sweep(config, ctx, seed + i));
    std::vector<RecallStats> out;
    if (reports.empty()) return out;
    for (const auto& row : reports.front().rows) {
        RecallStats s{row.level, row.screener, 0.0, 0.0, n};
        for (const auto& rep : reports) s.mean += recall_of(rep.rows, row.level, row.screener);
        s.mean /= static_cast<double>(n);
        for (const auto& rep : reports) {
            const double d = recall_of(rep.rows, row.level, row.screener) - s.mean;
            s.stddev += d * d;
        }
        s.stddev = std::sqrt(s.stddev / static_cast<double>(n));
        out.push_back(s);
    }
    return out;
}

std::string_view to_string(BenchVectors v) { return v == BenchVectors::documents ? "documents" : "gaussian"; }

BenchVectors parse_bench_vectors(std::string_view s) {
    if (s == "documents") return BenchVectors::documents;
    if (s == "gaussian") return BenchVectors::gaussian;
    throw std::invalid_argument("unknown bench vectors \"" + std::string(s) + "\" (expected documents or gaussian)");
}

namespace {

std::vector<std::vector<double>> gaussian_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::vector<double>> out(n, std::vector<double>(dim));
    for (auto& v : out) {
        double n2 = 0.0;
        while (n2 == 0.0) {
            n2 = 0.0;
            for (auto& x : v) {
                x = rng.normal();
                n2 += x * x;
            }
        }
    }
    return out;
}

// Resume, job, resume, job, ... of a generated corpus, cut to n.
std::vector<std::vector<double>> document_vectors(std::size_t n, std::size_t dim, const EvalContext& ctx,
                                                  std::uint64_t seed) {
    CorpusConfig cc = ExperimentConfig::default_corpus();
    cc.n_pairs = (n + 1) / 2;
    const auto corpus = generate_pairs(ctx.ontology, cc, seed, ctx.jobs);
    std::vector<NormalizedDoc> docs;
    docs.reserve(2 * corpus.size());
    for (const auto& p : corpus) {
        docs.push_back(ingest_resume(p, ctx));
        docs.push_back(ingest_job(p, ctx));
    }
    docs.resize(n);
    EmbedderConfig ec;
    ec.dimension = dim;
    const auto vectors = make_embedder(ec, ctx.ontology)->embed_batch(docs, ctx.jobs);
    std::vector<std::vector<double>> out;
    out.reserve(n);
    for (const auto& v : vectors) out.emplace_back(v.values().begin(), v.values().end());
    return out;
}

}  // namespace

BenchResult bench_index(const BenchConfig& config, const EvalContext& ctx, std::uint64_t seed) {
    if (config.k == 0 || config.k > config.count) throw std::invalid_argument("bench: k must be in [1, count]");
    const std::uint64_t data_seed = derive_seed(seed, kSaltBenchData, 0);
    const std::uint64_t query_seed = derive_seed(seed, kSaltBenchQuery, 0);
    const bool docs = config.vectors == BenchVectors::documents;
    const auto data = docs ? document_vectors(config.count, config.dimension, ctx, data_seed)
                           : gaussian_vectors(config.count, config.dimension, data_seed);
    const auto queries = docs ? document_vectors(config.queries, config.dimension, ctx, query_seed)
                              : gaussian_vectors(config.queries, config.dimension, query_seed);

    using clock = std::chrono::steady_clock;
    HnswParams params = config.hnsw;
    params.seed = seed;
    VecIndex index(config.dimension, params);
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < data.size(); ++i) index.add("v" + std::to_string(i), data[i]);
    index.freeze();
    const auto t1 = clock::now();

    std::vector<QueryResult> exact;
    for (const auto& q : queries) exact.push_back(index.query_exact(q, config.k));
    const auto t2 = clock::now();
    std::vector<QueryResult> ann;
    for (const auto& q : queries) ann.push_back(index.query_ann(q, config.k, config.ef_search));
    const auto t3 = clock::now();

    std::size_t found = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        std::set<std::string> truth;
        for (const auto& h : exact[i].hits) truth.insert(h.id);
        for (const auto& h : ann[i].hits) found += truth.count(h.id);
    }
    const auto secs = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
    BenchResult r;
    r.count = config.count;
    r.dimension = config.dimension;
    r.k = config.k;
    r.queries = config.queries;
    r.recall_at_k = static_cast<double>(found) / static_cast<double>(config.k * queries.size());
    r.build_seconds = secs(t1 - t0);
    r.exact_qps = queries.size() / std::max(secs(t2 - t1), 1e-9);
    r.ann_qps = queries.size() / std::max(secs(t3 - t2), 1e-9);
    return r;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string csv_header() { return "screener,parameter,value,tp,fp,tn,fn,precision,recall,f1\n"; }

std::string csv_row(const std::string& screener, const std::string& parameter, const std::string& value,
                    const ConfusionCounts& c, const Metrics& m) {
    return screener + "," + parameter + "," + value + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," +
           std::to_string(c.tn) + "," + std::to_string(c.fn) + "," + format_real(m.precision) + "," +
           format_real(m.recall) + "," + format_real(m.f1) + "\n";
}

std::string run_csv(const RunResult& r) {
    std::string s = csv_header();
    s += csv_row("keyword", "keyword_threshold", format_real(r.keyword.threshold), r.keyword.counts, r.keyword.metrics);
    s += csv_row("semantic", "semantic_threshold", format_real(r.semantic.threshold), r.semantic.counts,
                 r.semantic.metrics);
    return s;
}

std::string threshold_sweep_csv(const SweepResult& sweep) {
    std::string s = csv_header();
    for (const auto& row : sweep.rows)
        s += csv_row("semantic", sweep.parameter_name, format_real(row.value), row.counts, row.metrics);
    return s;
}

std::string noise_sweep_csv(const NoiseSweepReport& report) {
    std::string s = csv_header();
    for (const auto& row : report.rows) s += csv_row(row.screener, "noise", row.level, row.counts, row.metrics);
    return s;
}

json run_report(const ExperimentConfig& config, const Ontology& ontology, const PiiRules& pii, const RunResult& r) {
    json j = header_json(config, ontology);
    j["kind"] = "run";
    j["pii_rules_version"] = pii.version;
    j["n_pairs"] = r.n_pairs;
    j["n_calibration"] = r.n_calibration;
    j["n_test"] = r.n_test;
    j["pipelines"] = {{"keyword", pipeline_json(r.keyword)}, {"semantic", pipeline_json(r.semantic)}};
    j["threshold_sweep"] = {{"parameter", r.semantic_sweep.parameter_name}, {"rows", sweep_rows_json(r.semantic_sweep)}};
    return j;
}

json threshold_sweep_report(const ExperimentConfig& config, const Ontology& ontology, const SweepResult& sweep,
                            std::size_t n_test) {
    json j = header_json(config, ontology);
    j["kind"] = "threshold_sweep";
    j["n_test"] = n_test;
    j["parameter"] = sweep.parameter_name;
    j["rows"] = sweep_rows_json(sweep);
    return j;
}

json noise_sweep_report(const ExperimentConfig& config, const Ontology& ontology, const NoiseSweepReport& report,
                        const std::vector<RecallStats>& stats) {
    json j = header_json(config, ontology);
    j["kind"] = "noise_sweep";
    j["keyword_threshold"] = report.keyword_threshold;
    j["semantic_threshold"] = report.semantic_threshold;
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"level", r.level},
                        {"screener", r.screener},
                        {"counts", counts_json(r.counts)},
                        {"metrics", metrics_json(r.metrics)}});
    j["rows"] = rows;
    json st = json::array();
    for (const auto& s : stats)
        st.push_back({{"level", s.level},
                      {"screener", s.screener},
                      {"recall_mean", s.mean},
                      {"recall_stddev", s.stddev},
                      {"seeds", s.seeds}});
    j["recall_over_seeds"] = st;
    return j;
}

json bench_report(const BenchConfig& config, std::uint64_t seed, const BenchResult& r) {
    json j;
    j["kind"] = "bench_index";
    j["vectors"] = std::string(to_string(config.vectors));
    j["seed"] = seed;
    j["count"] = r.count;
    j["dimension"] = r.dimension;
    j["k"] = r.k;
    j["queries"] = r.queries;
    j["ef_search"] = config.ef_search;
    j["M"] = config.hnsw.M;
    j["ef_construction"] = config.hnsw.ef_construction;
    j["recall_at_k"] = r.recall_at_k;
    return j;
}

std::string canonical_json(const json& j) { return j.dump() + "\n"; }

std::string run_chart(const RunResult& r) {
    const auto group = [](const PipelineResult& p) {
        return BarGroup{p.name, {p.metrics.precision, p.metrics.recall, p.metrics.f1}};
    };
    return grouped_bar_chart("Screening performance (test split)", {"precision", "recall", "F1"},
                             {group(r.keyword), group(r.semantic)});
}

std::string threshold_sweep_chart(const SweepResult& sweep) {
    std::vector<std::string> xs;
    LineSeries p{"precision", {}}, rc{"recall", {}}, f{"F1", {}};
    for (const auto& row : sweep.rows) {
        xs.push_back(percent_label(row.value));
        p.y.push_back(row.metrics.precision);
        rc.y.push_back(row.metrics.recall);
        f.y.push_back(row.metrics.f1);
    }
    return line_chart("Precision and recall across similarity thresholds", "semantic threshold", xs, {p, rc, f});
}

std::string noise_sweep_chart(const NoiseSweepReport& report) {
    std::vector<std::string> levels;
    for (const auto& row : report.rows)
        if (levels.empty() || levels.back() != row.level) levels.push_back(row.level);
    std::vector<LineSeries> series;
    for (const std::string screener : {"keyword", "semantic"}) {
        LineSeries p{screener + " precision", {}}, r{screener + " recall", {}};
        for (const auto& level : levels) {
            for (const auto& row : report.rows) {
                if (row.level == level && row.screener == screener) {
                    p.y.push_back(row.metrics.precision);
                    r.y.push_back(row.metrics.recall);
                }
            }
        }
        series.push_back(p);
        series.push_back(r);
    }
    return line_chart("Precision and recall under lexical noise", "noise level", levels, series);
}

void check_recall_monotone(const SweepResult& sweep) {
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
        if (sweep.rows[i].metrics.recall > sweep.rows[i - 1].metrics.recall) {
            throw std::runtime_error("recall increased from threshold " + format_real(sweep.rows[i - 1].value) +
                                     " to " + format_real(sweep.rows[i].value));
        }
    }
}

}  // namespace jobmatch
