#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace jobmatch {

enum class VariantClass { synonym, acronym, title_variant };

std::string_view to_string(VariantClass v);
std::optional<VariantClass> parse_variant_class(std::string_view s);

struct SurfaceForm {
    std::string text;
    VariantClass variant;

    bool operator==(const SurfaceForm&) const = default;
};

struct Concept {
    std::string id;
    std::string canonical_name;
    std::string domain_tag;
    std::vector<SurfaceForm> surface_forms;  // canonical_name excluded

    bool operator==(const Concept&) const = default;
};

// Immutable competency universe. Every surface form (canonical names
// included) maps to exactly one concept; lookups are over text::key(), so they
// ignore case, whitespace runs and punctuation between words.
class Ontology {
public:
    // Throws DuplicateSurfaceFormError / ParseError when invariants fail.
    Ontology(std::string version, std::vector<Concept> concepts);

    const std::string& version() const noexcept { return version_; }
    const std::vector<Concept>& concepts() const noexcept { return concepts_; }
    std::size_t size() const noexcept { return concepts_.size(); }

    const Concept* find(std::string_view id) const;
    // Throws std::out_of_range for unknown ids.
    const Concept& at(std::string_view id) const;

    std::optional<std::string> canonicalize(std::string_view term) const;
    // Same as canonicalize for a term that is already a text::key().
    const Concept* lookup_key(std::string_view key) const;

    // Throws std::out_of_range for unknown ids.
    std::vector<std::string> surface_forms(std::string_view id, VariantClass variant) const;

    std::vector<std::string> domain_tags() const;
    std::vector<const Concept*> concepts_with_tag(std::string_view tag) const;

    // Longest surface form, in tokens.
    std::size_t max_form_tokens() const noexcept { return max_form_tokens_; }

    bool operator==(const Ontology& other) const {
        return version_ == other.version_ && concepts_ == other.concepts_;
    }

private:
    std::string version_;
    std::vector<Concept> concepts_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_key_;
    std::size_t max_form_tokens_ = 0;
};

struct ConceptSpan {
    std::size_t begin;  // token range [begin, end)
    std::size_t end;
    const Concept* concept_ptr;
};

// Greedy left-to-right longest match of surface forms over folded tokens.
std::vector<ConceptSpan> scan_concepts(const std::vector<std::string>& tokens, const Ontology& ontology);

// Line format: `id | canonical_name | domain_tag | synonym:a,b;acronym:X;title_variant:y`.
// `#` starts a comment line; `# version: V` sets the version.
Ontology load_ontology(std::istream& in);
Ontology load_ontology_file(const std::filesystem::path& path);
std::string serialize_ontology(const Ontology& ontology);

std::filesystem::path default_data_dir();
std::filesystem::path default_ontology_path();

}  // namespace jobmatch
