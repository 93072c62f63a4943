#pragma once

// Seeded synthetic resume/job corpus with ground-truth labels and
// label-preserving lexical perturbation.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jobmatch/ontology.hpp"

namespace jobmatch {

enum class Label { qualified, unqualified };

std::string_view to_string(Label l);
std::optional<Label> parse_label(std::string_view s);

struct CompetencyProfile {
    std::vector<std::string> concept_ids;  // sorted, unique
    std::vector<std::string> experience_sentences;

    bool operator==(const CompetencyProfile&) const = default;
};

struct JobSpec {
    std::vector<std::string> required_concepts;  // sorted, unique, non-empty
    std::vector<std::string> optional_concepts;  // sorted, disjoint from required
    std::string title_concept;
    std::string text;

    bool operator==(const JobSpec&) const = default;
};

struct PerturbationEntry {
    std::string original;
    std::string replacement;
    VariantClass variant;

    bool operator==(const PerturbationEntry&) const = default;
};

struct LabeledPair {
    std::uint64_t pair_id = 0;
    std::string resume_text;
    CompetencyProfile resume_profile;
    JobSpec job;
    Label label = Label::unqualified;
    std::vector<PerturbationEntry> perturbation_log;
    std::uint64_t seed = 0;

    bool operator==(const LabeledPair&) const = default;
};

struct NoiseLevel {
    std::string name;
    double p_synonym = 0.0;
    double p_acronym = 0.0;
    double p_title = 0.0;

    double total() const noexcept { return p_synonym + p_acronym + p_title; }
    bool operator==(const NoiseLevel&) const = default;
};

// Named defaults: none (0,0,0), low (.10,.05,.05), medium (.30,.15,.15),
// high (.60,.30,.30). Throws std::invalid_argument for other names.
NoiseLevel noise_level(std::string_view name);
std::vector<NoiseLevel> standard_noise_levels();

struct IntRange {
    std::size_t lo;
    std::size_t hi;

    bool operator==(const IntRange&) const = default;
};

struct CorpusConfig {
    std::size_t n_pairs = 1000;
    double qualified_fraction = 0.5;
    IntRange concepts_per_profile{5, 8};
    IntRange required_per_job{3, 5};
    IntRange optional_per_job{0, 2};
    NoiseLevel noise = noise_level("none");
    double coverage_fraction = 1.0;
};

// qualified iff |profile ∩ required| >= ceil(coverage_fraction * |required|)
Label label_rule(const CompetencyProfile& profile, const JobSpec& job, double coverage_fraction);

// Throws std::invalid_argument on bad config or when the ontology cannot
// satisfy the requested concept counts.
std::vector<LabeledPair> generate_pairs(const Ontology& ontology, const CorpusConfig& config,
                                        std::uint64_t seed, unsigned jobs = 1);

// Each concept mention is considered once. Independent draws u1..u3 pick
// the variant class: synonym if u1 < p_synonym, else acronym if
// u2 < p_acronym, else title_variant if u3 < p_title, else untouched. A
// fourth draw picks among that class's forms (other than the current
// one); concepts without such forms stay as they are.
LabeledPair perturb(const LabeledPair& pair, const Ontology& ontology, const NoiseLevel& noise,
                    std::uint64_t seed);

struct Mention {
    std::size_t begin;  // byte range in the source text
    std::size_t end;
    const Concept* concept_ptr;
};

// Greedy longest-match scan for ontology surface forms.
std::vector<Mention> find_mentions(std::string_view text, const Ontology& ontology);

// Replaces every mention with its concept's canonical name.
std::string canonical_rendering(std::string_view text, const Ontology& ontology);

// Canonical JSON (sorted keys, no whitespace), one object per line.
std::string serialize_pair(const LabeledPair& pair);
LabeledPair parse_pair(std::string_view line, const Ontology& ontology);
void write_corpus(std::ostream& out, std::span<const LabeledPair> corpus);
std::vector<LabeledPair> read_corpus(std::istream& in, const Ontology& ontology);

}  // namespace jobmatch
