#pragma once

// Legacy ATS approximation: exact-match keyword rules compiled from a job's
// required concepts, scored over normalized resume tokens.

#include <string>
#include <string_view>
#include <vector>

#include "jobmatch/corpusgen.hpp"
#include "jobmatch/decision.hpp"
#include "jobmatch/ingest.hpp"
#include "jobmatch/ontology.hpp"

namespace jobmatch {

enum class ScoringMode { presence, term_frequency };

std::string_view to_string(ScoringMode m);
ScoringMode parse_scoring_mode(std::string_view s);

struct KeywordTerm {
    std::vector<std::string> tokens;  // exact token sequence
    double weight = 1.0;
    bool hard = false;

    bool operator==(const KeywordTerm&) const = default;
};

struct RuleSet {
    std::vector<KeywordTerm> terms;
    double threshold = 0.75;
    ScoringMode mode = ScoringMode::presence;

    bool operator==(const RuleSet&) const = default;
};

// Throws std::invalid_argument if weights are not positive, there are no
// terms, or the threshold is outside [0,1].
void validate(const RuleSet& rules);

struct KeywordOptions {
    double hard_fraction = 0.5;
    double default_weight = 1.0;
    double threshold = 0.75;
    ScoringMode mode = ScoringMode::presence;

    bool operator==(const KeywordOptions&) const = default;
};

// One term per required concept, canonical name only, in concept id order;
// the first ceil(hard_fraction * n) are hard.
RuleSet compile_rules(const JobSpec& job, const Ontology& ontology, const KeywordOptions& options = {});

// Number of (possibly overlapping) positions where `term` occurs contiguously.
std::size_t count_occurrences(const std::vector<std::string>& tokens, const std::vector<std::string>& term);

double score_keyword(const NormalizedDoc& doc, const RuleSet& rules);
bool hard_terms_present(const NormalizedDoc& doc, const RuleSet& rules);
Decision decide_keyword(const NormalizedDoc& doc, const RuleSet& rules);

// Canonical single-line JSON, same conventions as the corpus file.
std::string serialize_rules(const RuleSet& rules);
RuleSet parse_rules(std::string_view line);

}  // namespace jobmatch
