// jobmatch: corpus generation, screening runs, sweeps and index benchmarks.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration or usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jobmatch/errors.hpp"
#include "jobmatch/experiment.hpp"
#include "jobmatch/file_io.hpp"
#include "jobmatch/parallel.hpp"

namespace fs = std::filesystem;
using namespace jobmatch;

namespace {

struct Options {
    std::string config_path;
    std::uint64_t seed = 42;
    std::string out = "out";
    unsigned jobs = default_jobs();

    // overrides
    std::size_t n_pairs = 0;
    double qualified_fraction = 0.0;
    std::string noise;
    std::string ontology;
    std::string pii_rules;
    double tau_kw = 0.0;
    double hard_fraction = 0.0;
    std::string kw_mode;
    std::string embedder_kind;
    std::string endpoint;
    std::size_t dimension = 0;
    double theta = 0.0;
    std::string calibration;
    double calibration_value = 0.0;
    std::vector<double> thresholds;
    std::vector<std::string> noise_levels;
    std::size_t noise_seeds = 1;

    // command specific
    std::string corpus;
    bool gen = false;
    std::string charts;
    std::string kind = "threshold";
    std::size_t count = 0;
    std::size_t bench_dimension = 0;
    std::string bench_vectors;
    std::size_t k = 0;
    std::size_t queries = 0;
    std::string report;
};

struct Loaded {
    Ontology ontology;
    PiiRules pii;
};

Loaded load_inputs(const ExperimentConfig& cfg) {
    const fs::path onto = cfg.ontology_path.empty() ? default_ontology_path() : cfg.ontology_path;
    const fs::path pii = cfg.pii_rules_path.empty() ? default_pii_rules_path() : cfg.pii_rules_path;
    try {
        return {load_ontology_file(onto), load_pii_rules_file(pii)};
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

fs::path charts_dir(const Options& o) { return o.charts.empty() ? fs::path(o.out) / "charts" : fs::path(o.charts); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<LabeledPair> obtain_corpus(const Options& o, const ExperimentConfig& cfg, const EvalContext& ctx) {
    if (!o.corpus.empty()) {
        if (!fs::exists(o.corpus)) throw ConfigError("corpus not found: " + o.corpus);
        std::ifstream in(o.corpus, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read " + o.corpus);
        return read_corpus(in, ctx.ontology);
    }
    if (!o.gen) throw ConfigError("no corpus: pass --corpus PATH or --gen");
    try {
        return generate_pairs(ctx.ontology, cfg.corpus, cfg.seed, ctx.jobs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

int cmd_gen(const Options& o, const ExperimentConfig& cfg) {
    const Loaded in = load_inputs(cfg);
    std::vector<LabeledPair> corpus;
    try {
        corpus = generate_pairs(in.ontology, cfg.corpus, cfg.seed, o.jobs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const fs::path path = o.corpus.empty() ? fs::path(o.out) / "corpus.jsonl" : fs::path(o.corpus);
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    std::ostringstream ss;
    write_corpus(ss, corpus);
    write_file_atomic(path, ss.str());
    std::size_t qualified = 0;
    for (const auto& p : corpus) qualified += p.label == Label::qualified;
    std::cout << "wrote " << corpus.size() << " pairs to " << path.string() << " (" << qualified << " qualified, "
              << corpus.size() - qualified << " unqualified)\n";
    return 0;
}

int cmd_run(const Options& o, const ExperimentConfig& cfg) {
    const Loaded in = load_inputs(cfg);
    const EvalContext ctx{in.ontology, in.pii, o.jobs};
    const auto corpus = obtain_corpus(o, cfg, ctx);
    const RunResult r = run_experiment(cfg, ctx, corpus);

    const fs::path out(o.out), charts = charts_dir(o);
    ensure_dir(out);
    ensure_dir(charts);
    write_file_atomic(charts / "f1_comparison.svg", run_chart(r));
    write_file_atomic(out / "metrics.csv", run_csv(r));
    write_file_atomic(out / "report.json", canonical_json(run_report(cfg, in.ontology, in.pii, r)));

    std::printf("%-9s %9s %9s %9s %9s %11s\n", "pipeline", "threshold", "precision", "recall", "f1", "advance");
    for (const PipelineResult* p : {&r.keyword, &r.semantic}) {
        std::printf("%-9s %9.4f %9.4f %9.4f %9.4f %11.4f\n", p->name.c_str(), p->threshold, p->metrics.precision,
                    p->metrics.recall, p->metrics.f1, p->advance_rate);
    }
    std::printf("keyword false negatives: %zu lexical, %zu other (fraction lexical %.4f)\n",
                r.keyword.false_negatives.fn_lexical, r.keyword.false_negatives.fn_other,
                r.keyword.false_negatives.fraction_lexical);
    std::printf("test pairs: %zu, calibration pairs: %zu\n", r.n_test, r.n_calibration);
    return 0;
}

// Reads the CSV back and checks the recall column never increases.
void validate_written_sweep(const fs::path& csv) {
    std::istringstream in(read_file(csv));
    std::string line;
    std::getline(in, line);
    double prev = 2.0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (fields.size() != 10) throw std::runtime_error(csv.string() + ": malformed row " + std::to_string(row));
        const double recall = std::stod(fields[8]);
        if (recall > prev)
            throw std::runtime_error(csv.string() + ": recall increases at row " + std::to_string(row));
        prev = recall;
    }
}

int cmd_sweep(const Options& o, ExperimentConfig cfg) {
    const Loaded in = load_inputs(cfg);
    const EvalContext ctx{in.ontology, in.pii, o.jobs};
    const fs::path out(o.out), charts = charts_dir(o);
    if (o.kind == "threshold") {
        if (cfg.sweep_thresholds.empty()) throw ConfigError("empty threshold list");
        Options go = o;
        if (go.corpus.empty()) go.gen = true;
        const auto test = select_split(obtain_corpus(go, cfg, ctx), Split::test);
        const SweepResult sweep = threshold_sweep(test, SemanticScreener{cfg.embedder, cfg.semantic_threshold},
                                                  cfg.sweep_thresholds, ctx);
        check_recall_monotone(sweep);
        ensure_dir(out);
        ensure_dir(charts);
        write_file_atomic(charts / "threshold_sweep.svg", threshold_sweep_chart(sweep));
        write_file_atomic(out / "threshold_sweep.csv", threshold_sweep_csv(sweep));
        write_file_atomic(out / "threshold_sweep.json",
                          canonical_json(threshold_sweep_report(cfg, in.ontology, sweep, test.size())));
        validate_written_sweep(out / "threshold_sweep.csv");
        std::printf("%9s %9s %9s %9s\n", "threshold", "precision", "recall", "f1");
        for (const auto& r : sweep.rows)
            std::printf("%9.2f %9.4f %9.4f %9.4f\n", r.value, r.metrics.precision, r.metrics.recall, r.metrics.f1);
        return 0;
    }
    // noise
    const NoiseSweepReport rep = run_noise_sweep(cfg, ctx, cfg.seed);
    std::vector<RecallStats> stats;
    if (cfg.noise_seeds > 1) stats = noise_recall_over_seeds(cfg, ctx, cfg.seed, cfg.noise_seeds);
    ensure_dir(out);
    ensure_dir(charts);
    write_file_atomic(charts / "noise_sweep.svg", noise_sweep_chart(rep));
    write_file_atomic(out / "noise_sweep.csv", noise_sweep_csv(rep));
    write_file_atomic(out / "noise_sweep.json", canonical_json(noise_sweep_report(cfg, in.ontology, rep, stats)));
    std::printf("thresholds: keyword %.4f, semantic %.4f\n", rep.keyword_threshold, rep.semantic_threshold);
    std::printf("%-7s %-9s %9s %9s %9s\n", "level", "screener", "precision", "recall", "f1");
    for (const auto& r : rep.rows)
        std::printf("%-7s %-9s %9.4f %9.4f %9.4f\n", r.level.c_str(), r.screener.c_str(), r.metrics.precision,
                    r.metrics.recall, r.metrics.f1);
    for (const auto& s : stats)
        std::printf("recall over %zu seeds: %-7s %-9s %.4f +- %.4f\n", s.seeds, s.level.c_str(), s.screener.c_str(),
                    s.mean, s.stddev);
    return 0;
}

int cmd_bench(const Options& o, const ExperimentConfig& cfg) {
    const Loaded in = load_inputs(cfg);
    const EvalContext ctx{in.ontology, in.pii, o.jobs};
    const BenchResult r = bench_index(cfg.bench, ctx, cfg.seed);
    const fs::path out(o.out);
    ensure_dir(out);
    write_file_atomic(out / "bench.json", canonical_json(bench_report(cfg.bench, cfg.seed, r)));
    std::printf("%s vectors %zu, dimension %zu, queries %zu, k %zu\n", std::string(to_string(cfg.bench.vectors)).c_str(), r.count, r.dimension, r.queries, r.k);
    std::printf("build seconds: %.3f\n", r.build_seconds);
    std::printf("exact queries/sec: %.1f\n", r.exact_qps);
    std::printf("ann queries/sec: %.1f\n", r.ann_qps);
    std::printf("recall@%zu: %.4f\n", r.k, r.recall_at_k);
    return 0;
}

int cmd_report(const Options& o) {
    const fs::path path = o.report.empty() ? fs::path(o.out) / "report.json" : fs::path(o.report);
    if (!fs::exists(path)) throw ConfigError("report not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    if (j.value("kind", "") != "run") throw std::runtime_error(path.string() + ": not a run report");
    std::printf("ontology %s, config %s, seed %llu, test pairs %llu\n",
                j.at("ontology_version").get<std::string>().c_str(), j.at("config_hash").get<std::string>().c_str(),
                static_cast<unsigned long long>(j.at("seed").get<std::uint64_t>()),
                static_cast<unsigned long long>(j.at("n_test").get<std::uint64_t>()));
    std::printf("%-9s %9s %9s %9s %9s\n", "pipeline", "threshold", "precision", "recall", "f1");
    double base_f1 = 0.0;
    for (const char* name : {"keyword", "semantic"}) {
        const auto& p = j.at("pipelines").at(name);
        const auto& m = p.at("metrics");
        std::printf("%-9s %9.4f %9.4f %9.4f %9.4f", name, p.at("threshold").get<double>(),
                    m.at("precision").get<double>(), m.at("recall").get<double>(), m.at("f1").get<double>());
        if (std::string(name) == "keyword") {
            base_f1 = m.at("f1").get<double>();
            std::printf("\n");
        } else if (base_f1 > 0.0) {
            std::printf("  (F1 %+.1f%%)\n", 100.0 * (m.at("f1").get<double>() - base_f1) / base_f1);
        } else {
            std::printf("\n");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Keyword versus semantic resume screening experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    auto* seed = app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* n_pairs = app.add_option("--n-pairs", o.n_pairs);
    auto* qf = app.add_option("--qualified-fraction", o.qualified_fraction);
    auto* noise = app.add_option("--noise", o.noise, "none|low|medium|high");
    auto* onto = app.add_option("--ontology", o.ontology);
    auto* pii = app.add_option("--pii-rules", o.pii_rules);
    auto* tau = app.add_option("--tau-kw", o.tau_kw, "keyword threshold");
    auto* hard = app.add_option("--hard-fraction", o.hard_fraction);
    auto* mode = app.add_option("--keyword-mode", o.kw_mode, "presence|term_frequency");
    auto* ekind = app.add_option("--embedder", o.embedder_kind, "concept_space|ngram_hash|remote");
    auto* endpoint = app.add_option("--endpoint", o.endpoint, "remote embedding endpoint");
    auto* dim = app.add_option("--dimension", o.dimension, "embedding dimension");
    auto* theta = app.add_option("--theta", o.theta, "semantic threshold (with --calibration none)");
    auto* calib = app.add_option("--calibration", o.calibration, "advance_rate|precision|none");
    auto* calib_v = app.add_option("--calibration-value", o.calibration_value);
    auto* thresholds = app.add_option("--thresholds", o.thresholds, "sweep thresholds")->delimiter(',');
    auto* levels = app.add_option("--noise-levels", o.noise_levels, "noise sweep levels")->delimiter(',');
    auto* nseeds = app.add_option("--noise-seeds", o.noise_seeds, "seeds for the noise recall summary");

    auto* gen = app.add_subcommand("gen", "generate a labeled corpus");
    gen->add_option("--corpus", o.corpus, "output path (default OUT/corpus.jsonl)");

    auto* run = app.add_subcommand("run", "evaluate both pipelines");
    run->add_option("--corpus", o.corpus, "corpus to evaluate");
    run->add_flag("--gen", o.gen, "generate the corpus inline");
    run->add_option("--charts", o.charts, "chart directory (default OUT/charts)");

    auto* sweep = app.add_subcommand("sweep", "threshold or noise sweep");
    sweep->add_option("--kind", o.kind)->check(CLI::IsMember({"threshold", "noise"}));
    sweep->add_option("--corpus", o.corpus, "corpus for the threshold sweep (default: generate)");
    sweep->add_option("--charts", o.charts, "chart directory (default OUT/charts)");

    auto* bench = app.add_subcommand("bench-index", "benchmark exact and approximate search");
    auto* count = bench->add_option("--count", o.count);
    auto* bvec = bench->add_option("--vectors", o.bench_vectors, "documents|gaussian");
    auto* bdim = bench->add_option("--dimension", o.bench_dimension);
    auto* k = bench->add_option("--k", o.k);
    auto* queries = bench->add_option("--queries", o.queries);

    auto* report = app.add_subcommand("report", "summarize a run report");
    report->add_option("--report", o.report, "report path (default OUT/report.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (report->parsed()) return cmd_report(o);

        ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
        if (seed->count()) cfg.seed = o.seed;
        if (n_pairs->count()) cfg.corpus.n_pairs = o.n_pairs;
        if (qf->count()) cfg.corpus.qualified_fraction = o.qualified_fraction;
        try {
            if (noise->count()) cfg.corpus.noise = noise_level(o.noise);
            if (mode->count()) cfg.keyword.mode = parse_scoring_mode(o.kw_mode);
            if (ekind->count()) cfg.embedder.kind = parse_embedder_kind(o.embedder_kind);
            if (bvec->count()) cfg.bench.vectors = parse_bench_vectors(o.bench_vectors);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (onto->count()) cfg.ontology_path = o.ontology;
        if (pii->count()) cfg.pii_rules_path = o.pii_rules;
        if (tau->count()) cfg.keyword.threshold = o.tau_kw;
        if (hard->count()) cfg.keyword.hard_fraction = o.hard_fraction;
        if (endpoint->count()) cfg.embedder.provider_endpoint = o.endpoint;
        if (dim->count()) cfg.embedder.dimension = o.dimension;
        if (theta->count()) cfg.semantic_threshold = o.theta;
        if (calib->count()) {
            if (o.calibration == "none") {
                cfg.calibration.reset();
            } else if (o.calibration == "advance_rate" || o.calibration == "precision") {
                CalibrationTarget t;
                t.kind = o.calibration == "precision" ? CalibrationTarget::Kind::precision
                                                      : CalibrationTarget::Kind::advance_rate;
                cfg.calibration = t;
                cfg.calibration_value_explicit = false;
            } else {
                throw ConfigError("--calibration: expected advance_rate, precision or none");
            }
        }
        if (calib_v->count()) {
            if (!cfg.calibration) throw ConfigError("--calibration-value needs a calibration target");
            cfg.calibration->value = o.calibration_value;
            cfg.calibration_value_explicit = true;
        }
        if (thresholds->count()) cfg.sweep_thresholds = o.thresholds;
        if (levels->count()) cfg.noise_levels = o.noise_levels;
        if (nseeds->count()) cfg.noise_seeds = o.noise_seeds;
        if (count->count()) cfg.bench.count = o.count;
        if (bdim->count()) cfg.bench.dimension = o.bench_dimension;
        if (k->count()) cfg.bench.k = o.k;
        if (queries->count()) cfg.bench.queries = o.queries;
        if (k->count() && cfg.bench.ef_search < cfg.bench.k) cfg.bench.ef_search = cfg.bench.k;
        validate(cfg);

        if (gen->parsed()) return cmd_gen(o, cfg);
        if (run->parsed()) return cmd_run(o, cfg);
        if (sweep->parsed()) return cmd_sweep(o, cfg);
        if (bench->parsed()) return cmd_bench(o, cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
