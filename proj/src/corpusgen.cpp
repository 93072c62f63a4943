#include "jobmatch/corpusgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "jobmatch/errors.hpp"
#include "jobmatch/parallel.hpp"
#include "jobmatch/rng.hpp"
#include "jobmatch/text.hpp"

namespace jobmatch {

namespace {

constexpr std::uint64_t kSaltLabels = 0x6C6162656C73ULL;   // "labels"
constexpr std::uint64_t kSaltPair = 0x70616972ULL;         // "pair"
constexpr std::uint64_t kSaltPerturb = 0x7065727475726254ULL;

// Kept in sync with data/pii_rules.txt so generated contact details are maskable.
constexpr std::array<std::string_view, 16> kFirstNames = {
    "Avery", "Priya", "Mateo", "Keiko", "Olamide", "Siobhan", "Tomasz", "Anjali",
    "Dmitri", "Leilani", "Hamid", "Ingrid", "Rafael", "Nkechi", "Yusuf", "Marisol"};
constexpr std::array<std::string_view, 16> kLastNames = {
    "Okafor", "Lindqvist", "Nakamura", "Castellanos", "Abernathy", "Kowalski", "Ramanathan", "Delacroix",
    "Haddad", "Oyelaran", "Fitzgerald", "Moreau", "Adeyemi", "Vasquez", "Thorsen", "Balakrishnan"};

constexpr std::array<std::string_view, 5> kSingleTemplates = {
    "Applied {0} to deliver measurable results for a regional team.",
    "Led {0} initiatives across three business units.",
    "Mentored junior colleagues in {0}.",
    "Built internal tooling that relied on {0}.",
    "Owned {0} for a high-volume program.",
};

constexpr std::array<std::string_view, 3> kPairTemplates = {
    "Combined {0} with {1} to streamline weekly operations.",
    "Built solutions using {0} and {1}.",
    "Delivered projects involving {0} and {1}.",
};

constexpr std::array<std::string_view, 4> kEducation = {
    "Bachelor of Science, State University",
    "Master of Arts, City College",
    "Associate Degree, Community College",
    "Bachelor of Applied Science, Polytechnic Institute",
};

std::string fill(std::string_view tmpl, std::string_view a, std::string_view b = {}) {
    std::string out(tmpl);
    if (auto p = out.find("{0}"); p != std::string::npos) out.replace(p, 3, a);
    if (auto p = out.find("{1}"); p != std::string::npos) out.replace(p, 3, b);
    return out;
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Draws `count` distinct items from `pool` without replacement.
std::vector<std::string> draw(std::vector<std::string> pool, std::size_t count, SplitMix64& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

std::vector<std::string> ids_where(const Ontology& ontology, auto&& pred) {
    std::vector<std::string> out;
    for (const auto& c : ontology.concepts())
        if (pred(c)) out.push_back(c.id);
    return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

std::vector<std::string> experience_lines(std::string_view canonical_text) {
    std::vector<std::string> out;
    bool in_experience = false;
    for (const auto& line : text::split(canonical_text, '\n')) {
        const std::string t = text::trim(line);
        if (t.starts_with("==") && t.ends_with("==") && t.size() >= 5) {
            in_experience = text::key(t) == "experience";
            continue;
        }
        if (in_experience && !t.empty()) out.push_back(t);
    }
    return out;
}

enum class PairKind { qualified, near_miss, far_miss };

struct GeneratorContext {
    const Ontology& ontology;
    const CorpusConfig& config;
    std::vector<std::string> tags;
};

JobSpec make_job(const GeneratorContext& ctx, const std::string& tag, SplitMix64& rng) {
    const auto& cfg = ctx.config;
    const auto pool = ids_where(ctx.ontology, [&](const Concept& c) { return c.domain_tag == tag; });
    const std::size_t n_req = rng.uniform_range(cfg.required_per_job.lo, cfg.required_per_job.hi);
    const std::size_t n_opt = rng.uniform_range(cfg.optional_per_job.lo, cfg.optional_per_job.hi);
    auto picked = draw(pool, n_req + n_opt, rng);

    JobSpec job;
    job.title_concept = picked[0];
    job.required_concepts = sorted({picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(n_req)});
    job.optional_concepts = sorted({picked.begin() + static_cast<std::ptrdiff_t>(n_req), picked.end()});

    auto name = [&](const std::string& id) { return ctx.ontology.at(id).canonical_name; };
    std::vector<std::string> required_rest;
    for (std::size_t i = 1; i < n_req; ++i) required_rest.push_back(name(picked[i]));
    std::vector<std::string> optional_names;
    for (std::size_t i = n_req; i < picked.size(); ++i) optional_names.push_back(name(picked[i]));

    job.text = "== HEADER ==\nJob title: " + name(job.title_concept) + "\n== SKILLS ==\n";
    if (!required_rest.empty()) job.text += "Required: " + text::join(required_rest, ", ") + ".\n";
    if (!optional_names.empty()) job.text += "Preferred: " + text::join(optional_names, ", ") + ".\n";
    return job;
}

std::vector<std::string> make_profile_ids(const GeneratorContext& ctx, const JobSpec& job,
                                          const std::string& tag, PairKind kind, SplitMix64& rng) {
    const auto& cfg = ctx.config;
    std::size_t n_profile = rng.uniform_range(cfg.concepts_per_profile.lo, cfg.concepts_per_profile.hi);
    const auto& req = job.required_concepts;
    auto not_required = ids_where(ctx.ontology, [&](const Concept& c) { return !contains(req, c.id); });

    std::vector<std::string> ids;
    switch (kind) {
        case PairKind::qualified: {
            n_profile = std::max(n_profile, req.size());
            ids = req;
            for (auto& extra : draw(not_required, n_profile - req.size(), rng)) ids.push_back(std::move(extra));
            break;
        }
        case PairKind::near_miss: {
            const std::size_t overlap = req.size() >= 2 ? rng.uniform_range(1, req.size() - 1) : 0;
            n_profile = std::max(n_profile, overlap + 1);
            ids = draw(req, overlap, rng);
            for (auto& extra : draw(not_required, n_profile - overlap, rng)) ids.push_back(std::move(extra));
            break;
        }
        case PairKind::far_miss: {
            auto other = ids_where(ctx.ontology, [&](const Concept& c) { return c.domain_tag != tag; });
            ids = draw(other, n_profile, rng);
            break;
        }
    }
    return sorted(std::move(ids));
}

std::string render_resume(const GeneratorContext& ctx, const JobSpec& job, const std::vector<std::string>& ids,
                          SplitMix64& rng) {
    const std::string_view first = kFirstNames[rng.uniform_below(kFirstNames.size())];
    const std::string_view last = kLastNames[rng.uniform_below(kLastNames.size())];
    char phone[32];
    std::snprintf(phone, sizeof phone, "555-%03u-%04u", static_cast<unsigned>(rng.uniform_below(1000)),
                  static_cast<unsigned>(rng.uniform_below(10000)));

    std::vector<std::string> order = ids;
    rng.shuffle(order);
    if (auto it = std::find(order.begin(), order.end(), job.title_concept); it != order.end())
        std::rotate(order.begin(), it, it + 1);

    auto name = [&](const std::string& id) -> const std::string& { return ctx.ontology.at(id).canonical_name; };
    std::string out = "== HEADER ==\n";
    out += std::string(first) + " " + std::string(last) + "\n";
    out += lower_ascii(first) + "." + lower_ascii(last) + "@example.com | " + phone + "\n";
    out += "Focus: " + name(order[0]) + "\n";

    // Roughly two thirds of the remaining concepts go into experience
    // sentences, the rest into the skills line. Each concept is mentioned once.
    const std::size_t rest = order.size() - 1;
    const std::size_t in_experience = (rest * 2 + 2) / 3;
    out += "== EXPERIENCE ==\n";
    std::size_t i = 1;
    while (i < 1 + in_experience) {
        const bool two = i + 1 < 1 + in_experience && rng.bernoulli(0.5);
        if (two) {
            out += fill(kPairTemplates[rng.uniform_below(kPairTemplates.size())], name(order[i]), name(order[i + 1]));
            i += 2;
        } else {
            out += fill(kSingleTemplates[rng.uniform_below(kSingleTemplates.size())], name(order[i]));
            i += 1;
        }
        out += "\n";
    }
    if (i < order.size()) {
        std::vector<std::string> skills;
        for (; i < order.size(); ++i) skills.push_back(name(order[i]));
        out += "== SKILLS ==\n" + text::join(skills, ", ") + "\n";
    }
    out += "== EDUCATION ==\n";
    out += std::string(kEducation[rng.uniform_below(kEducation.size())]) + "\n";
    return out;
}

void validate(const Ontology& ontology, const CorpusConfig& cfg) {
    auto bad = [](const std::string& m) { throw std::invalid_argument(m); };
    if (cfg.n_pairs < 1) bad("n_pairs must be >= 1");
    if (!(cfg.qualified_fraction >= 0.0 && cfg.qualified_fraction <= 1.0)) bad("qualified_fraction must be in [0,1]");
    if (!(cfg.coverage_fraction > 0.0 && cfg.coverage_fraction <= 1.0)) bad("coverage_fraction must be in (0,1]");
    for (const auto* r : {&cfg.concepts_per_profile, &cfg.required_per_job, &cfg.optional_per_job})
        if (r->lo > r->hi) bad("range lower bound exceeds upper bound");
    if (cfg.concepts_per_profile.lo < 1) bad("profiles need at least one concept");
    if (cfg.required_per_job.lo < 1) bad("jobs need at least one required concept");
    for (double p : {cfg.noise.p_synonym, cfg.noise.p_acronym, cfg.noise.p_title})
        if (!(p >= 0.0 && p <= 1.0)) bad("noise probabilities must be in [0,1]");

    const auto tags = ontology.domain_tags();
    if (tags.size() < 2) bad("ontology needs at least two domain tags for far-miss pairs");
    const std::size_t job_max = cfg.required_per_job.hi + cfg.optional_per_job.hi;
    for (const auto& tag : tags) {
        const std::size_t in_tag = ontology.concepts_with_tag(tag).size();
        const std::size_t outside = ontology.size() - in_tag;
        if (in_tag < job_max)
            bad("ontology too small: domain '" + tag + "' has " + std::to_string(in_tag) +
                " concepts, jobs need up to " + std::to_string(job_max));
        if (outside < cfg.concepts_per_profile.hi)
            bad("ontology too small: only " + std::to_string(outside) + " concepts outside domain '" + tag +
                "', profiles need up to " + std::to_string(cfg.concepts_per_profile.hi));
    }
    if (ontology.size() < cfg.concepts_per_profile.hi + cfg.required_per_job.hi)
        bad("ontology too small for concepts_per_profile_range");
}

}  // namespace

std::string_view to_string(Label l) { return l == Label::qualified ? "qualified" : "unqualified"; }

std::optional<Label> parse_label(std::string_view s) {
    if (s == "qualified") return Label::qualified;
    if (s == "unqualified") return Label::unqualified;
    return std::nullopt;
}

NoiseLevel noise_level(std::string_view name) {
    if (name == "none") return {"none", 0.0, 0.0, 0.0};
    if (name == "low") return {"low", 0.10, 0.05, 0.05};
    if (name == "medium") return {"medium", 0.30, 0.15, 0.15};
    if (name == "high") return {"high", 0.60, 0.30, 0.30};
    throw std::invalid_argument("unknown noise level '" + std::string(name) + "'");
}

std::vector<NoiseLevel> standard_noise_levels() {
    return {noise_level("none"), noise_level("low"), noise_level("medium"), noise_level("high")};
}

Label label_rule(const CompetencyProfile& profile, const JobSpec& job, double coverage_fraction) {
    std::size_t covered = 0;
    for (const auto& id : job.required_concepts)
        if (std::binary_search(profile.concept_ids.begin(), profile.concept_ids.end(), id)) ++covered;
    const double needed = std::ceil(coverage_fraction * static_cast<double>(job.required_concepts.size()) - 1e-12);
    return static_cast<double>(covered) >= needed ? Label::qualified : Label::unqualified;
}

std::vector<LabeledPair> generate_pairs(const Ontology& ontology, const CorpusConfig& config, std::uint64_t seed,
                                        unsigned jobs) {
    validate(ontology, config);
    const GeneratorContext ctx{ontology, config, ontology.domain_tags()};

    // Exact label quota: the first round(n * fraction) positions of a seeded
    // permutation are qualified; unqualified positions alternate near/far.
    const std::size_t n = config.n_pairs;
    const auto n_qualified = static_cast<std::size_t>(std::llround(config.qualified_fraction * static_cast<double>(n)));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix64 label_rng(derive_seed(seed, kSaltLabels, 0));
    label_rng.shuffle(perm);
    std::vector<PairKind> kinds(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j < n_qualified) kinds[perm[j]] = PairKind::qualified;
        else kinds[perm[j]] = ((j - n_qualified) % 2 == 0) ? PairKind::near_miss : PairKind::far_miss;
    }

    std::vector<LabeledPair> pairs(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const std::uint64_t pair_seed = derive_seed(seed, kSaltPair, i);
        SplitMix64 rng(pair_seed);
        const std::string& tag = ctx.tags[rng.uniform_below(ctx.tags.size())];
        LabeledPair p;
        p.pair_id = i;
        p.seed = pair_seed;
        p.job = make_job(ctx, tag, rng);
        p.resume_profile.concept_ids = make_profile_ids(ctx, p.job, tag, kinds[i], rng);
        p.resume_text = render_resume(ctx, p.job, p.resume_profile.concept_ids, rng);
        p.resume_profile.experience_sentences = experience_lines(p.resume_text);
        p.label = label_rule(p.resume_profile, p.job, config.coverage_fraction);
        pairs[i] = perturb(p, ontology, config.noise, derive_seed(pair_seed, kSaltPerturb, 0));
    });
    return pairs;
}

std::vector<Mention> find_mentions(std::string_view source, const Ontology& ontology) {
    const auto spans = text::tokenize_spans(source);
    std::vector<std::string> tokens;
    tokens.reserve(spans.size());
    for (const auto& s : spans) tokens.push_back(s.token);
    std::vector<Mention> out;
    for (const auto& hit : scan_concepts(tokens, ontology))
        out.push_back({spans[hit.begin].begin, spans[hit.end - 1].end, hit.concept_ptr});
    return out;
}

std::string canonical_rendering(std::string_view source, const Ontology& ontology) {
    std::string out;
    std::size_t cursor = 0;
    for (const auto& m : find_mentions(source, ontology)) {
        out.append(source.substr(cursor, m.begin - cursor));
        out.append(m.concept_ptr->canonical_name);
        cursor = m.end;
    }
    out.append(source.substr(cursor));
    return out;
}

LabeledPair perturb(const LabeledPair& pair, const Ontology& ontology, const NoiseLevel& noise, std::uint64_t seed) {
    LabeledPair out = pair;
    if (noise.total() <= 0.0) return out;
    SplitMix64 rng(seed);
    std::string rebuilt;
    std::size_t cursor = 0;
    const std::string& source = pair.resume_text;
    for (const auto& m : find_mentions(source, ontology)) {
        const double u_syn = rng.uniform01();
        const double u_acr = rng.uniform01();
        const double u_title = rng.uniform01();
        const double u_pick = rng.uniform01();

        std::optional<VariantClass> variant;
        if (u_syn < noise.p_synonym) variant = VariantClass::synonym;
        else if (u_acr < noise.p_acronym) variant = VariantClass::acronym;
        else if (u_title < noise.p_title) variant = VariantClass::title_variant;
        if (!variant) continue;

        const std::string original = source.substr(m.begin, m.end - m.begin);
        const std::string original_key = text::key(original);
        std::vector<std::string> candidates;
        for (const auto& f : m.concept_ptr->surface_forms)
            if (f.variant == *variant && text::key(f.text) != original_key) candidates.push_back(f.text);
        if (candidates.empty()) continue;
        const auto pick = std::min(candidates.size() - 1,
                                   static_cast<std::size_t>(u_pick * static_cast<double>(candidates.size())));

        rebuilt.append(source, cursor, m.begin - cursor);
        rebuilt.append(candidates[pick]);
        cursor = m.end;
        out.perturbation_log.push_back({original, candidates[pick], *variant});
    }
    rebuilt.append(source, cursor, std::string::npos);
    out.resume_text = std::move(rebuilt);
    return out;
}

std::string serialize_pair(const LabeledPair& p) {
    nlohmann::json log = nlohmann::json::array();
    for (const auto& e : p.perturbation_log)
        log.push_back({{"original", e.original}, {"replacement", e.replacement},
                       {"variant_class", std::string(to_string(e.variant))}});
    nlohmann::json j = {
        {"pair_id", p.pair_id},
        {"resume_text", p.resume_text},
        {"job_text", p.job.text},
        {"label", std::string(to_string(p.label))},
        {"required_concepts", p.job.required_concepts},
        {"profile_concepts", p.resume_profile.concept_ids},
        {"perturbation_log", log},
        {"seed", p.seed},
    };
    return j.dump();
}

LabeledPair parse_pair(std::string_view line, const Ontology& ontology) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corpus line is not JSON: ") + e.what());
    }
    static const std::set<std::string> kFields = {"job_text", "label", "pair_id", "perturbation_log",
                                                  "profile_concepts", "required_concepts", "resume_text", "seed"};
    if (!j.is_object()) throw ParseError("corpus line is not a JSON object");
    std::set<std::string> present;
    for (auto it = j.begin(); it != j.end(); ++it) present.insert(it.key());
    if (present != kFields) throw ParseError("corpus record fields do not match the corpus schema");

    LabeledPair p;
    try {
        p.pair_id = j.at("pair_id").get<std::uint64_t>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.resume_text = j.at("resume_text").get<std::string>();
        p.job.text = j.at("job_text").get<std::string>();
        const auto label = parse_label(j.at("label").get<std::string>());
        if (!label) throw ParseError("unknown label");
        p.label = *label;
        p.job.required_concepts = sorted(j.at("required_concepts").get<std::vector<std::string>>());
        p.resume_profile.concept_ids = sorted(j.at("profile_concepts").get<std::vector<std::string>>());
        for (const auto& e : j.at("perturbation_log")) {
            const auto v = parse_variant_class(e.at("variant_class").get<std::string>());
            if (!v) throw ParseError("unknown variant class in perturbation log");
            p.perturbation_log.push_back({e.at("original").get<std::string>(), e.at("replacement").get<std::string>(), *v});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed corpus record: ") + e.what());
    }
    if (p.job.required_concepts.empty()) throw ParseError("corpus record has no required concepts");
    for (const auto* ids : {&p.job.required_concepts, &p.resume_profile.concept_ids})
        for (const auto& id : *ids)
            if (!ontology.find(id)) throw ParseError("corpus references unknown concept '" + id + "'");

    // Title and optional concepts are recovered from the job text: the title
    // is the first mention, optional concepts are mentions outside the
    // required set.
    std::set<std::string> optional;
    for (const auto& m : find_mentions(p.job.text, ontology)) {
        if (p.job.title_concept.empty()) p.job.title_concept = m.concept_ptr->id;
        if (!contains(p.job.required_concepts, m.concept_ptr->id)) optional.insert(m.concept_ptr->id);
    }
    p.job.optional_concepts.assign(optional.begin(), optional.end());
    p.resume_profile.experience_sentences = experience_lines(canonical_rendering(p.resume_text, ontology));
    return p;
}

void write_corpus(std::ostream& out, std::span<const LabeledPair> corpus) {
    for (const auto& p : corpus) out << serialize_pair(p) << '\n';
}

std::vector<LabeledPair> read_corpus(std::istream& in, const Ontology& ontology) {
    std::vector<LabeledPair> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(parse_pair(line, ontology));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

}  // namespace jobmatch
