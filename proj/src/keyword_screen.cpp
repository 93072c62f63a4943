#include "jobmatch/keyword_screen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "jobmatch/errors.hpp"
#include "jobmatch/text.hpp"

namespace jobmatch {

namespace {
constexpr std::size_t kTermFrequencyCap = 3;
}

std::string_view to_string(ScoringMode m) { return m == ScoringMode::presence ? "presence" : "term_frequency"; }

ScoringMode parse_scoring_mode(std::string_view s) {
    if (s == "presence") return ScoringMode::presence;
    if (s == "term_frequency") return ScoringMode::term_frequency;
    throw std::invalid_argument("unknown scoring mode '" + std::string(s) + "'");
}

void validate(const RuleSet& rules) {
    if (rules.terms.empty()) throw std::invalid_argument("rule set has no terms");
    if (!(rules.threshold >= 0.0 && rules.threshold <= 1.0))
        throw std::invalid_argument("keyword threshold must be in [0,1]");
    for (const auto& t : rules.terms) {
        if (!(t.weight > 0.0)) throw std::invalid_argument("keyword weights must be positive");
        if (t.tokens.empty()) throw std::invalid_argument("keyword term has no tokens");
    }
}

RuleSet compile_rules(const JobSpec& job, const Ontology& ontology, const KeywordOptions& options) {
    if (job.required_concepts.empty()) throw std::invalid_argument("job has no required concepts");
    if (!(options.hard_fraction >= 0.0 && options.hard_fraction <= 1.0))
        throw std::invalid_argument("hard_fraction must be in [0,1]");
    std::vector<std::string> ids = job.required_concepts;
    std::sort(ids.begin(), ids.end());
    const auto n_hard = static_cast<std::size_t>(
        std::ceil(options.hard_fraction * static_cast<double>(ids.size()) - 1e-12));

    RuleSet rules;
    rules.threshold = options.threshold;
    rules.mode = options.mode;
    for (std::size_t i = 0; i < ids.size(); ++i)
        rules.terms.push_back({text::tokenize(ontology.at(ids[i]).canonical_name), options.default_weight, i < n_hard});
    validate(rules);
    return rules;
}

std::size_t count_occurrences(const std::vector<std::string>& tokens, const std::vector<std::string>& term) {
    if (term.empty() || term.size() > tokens.size()) return 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + term.size() <= tokens.size(); ++i)
        if (std::equal(term.begin(), term.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) ++count;
    return count;
}

double score_keyword(const NormalizedDoc& doc, const RuleSet& rules) {
    double total = 0.0;
    double hit = 0.0;
    for (const auto& t : rules.terms) {
        total += t.weight;
        const std::size_t n = count_occurrences(doc.tokens, t.tokens);
        const double credit = rules.mode == ScoringMode::presence
                                  ? (n > 0 ? 1.0 : 0.0)
                                  : static_cast<double>(std::min(n, kTermFrequencyCap)) / kTermFrequencyCap;
        hit += t.weight * credit;
    }
    return total > 0.0 ? hit / total : 0.0;
}

bool hard_terms_present(const NormalizedDoc& doc, const RuleSet& rules) {
    return std::all_of(rules.terms.begin(), rules.terms.end(), [&](const KeywordTerm& t) {
        return !t.hard || count_occurrences(doc.tokens, t.tokens) > 0;
    });
}

Decision decide_keyword(const NormalizedDoc& doc, const RuleSet& rules) {
    return hard_terms_present(doc, rules) && score_keyword(doc, rules) >= rules.threshold ? Decision::advance
                                                                                          : Decision::reject;
}

std::string serialize_rules(const RuleSet& rules) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : rules.terms)
        terms.push_back({{"hard", t.hard}, {"term", text::join(t.tokens)}, {"weight", t.weight}});
    nlohmann::json j = {{"mode", std::string(to_string(rules.mode))}, {"terms", terms}, {"threshold", rules.threshold}};
    return j.dump();
}

RuleSet parse_rules(std::string_view line) {
    RuleSet rules;
    try {
        const auto j = nlohmann::json::parse(line);
        rules.mode = parse_scoring_mode(j.at("mode").get<std::string>());
        rules.threshold = j.at("threshold").get<double>();
        for (const auto& t : j.at("terms"))
            rules.terms.push_back({text::split(t.at("term").get<std::string>(), ' '), t.at("weight").get<double>(),
                                   t.at("hard").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed rule set: ") + e.what());
    }
    validate(rules);
    return rules;
}

}  // namespace jobmatch
