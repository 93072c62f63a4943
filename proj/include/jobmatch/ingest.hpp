#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace jobmatch {

enum class SectionLabel { header, experience, skills, education, other };
enum class PiiClass { email, phone, url, name };
enum class InputFormat { plain, sectioned };

std::string_view to_string(SectionLabel s);
std::string_view to_string(PiiClass c);
std::optional<PiiClass> parse_pii_class(std::string_view s);
// Throws std::invalid_argument for anything other than "plain" / "sectioned".
InputFormat parse_input_format(std::string_view s);
// Maps a `== HEADING ==` title onto a section label.
SectionLabel section_label_for_heading(std::string_view heading);

struct Section {
    SectionLabel label;
    std::size_t begin;  // token range [begin, end)
    std::size_t end;

    bool operator==(const Section&) const = default;
};

struct MaskedSpan {
    std::size_t position;         // index of the placeholder token
    std::size_t original_length;  // tokens replaced by the placeholder
    PiiClass pii_class;

    bool operator==(const MaskedSpan&) const = default;
};

struct NormalizedDoc {
    std::vector<std::string> tokens;
    std::vector<Section> sections;  // disjoint, ordered, covering every token
    std::vector<MaskedSpan> masked_spans;

    bool operator==(const NormalizedDoc&) const = default;
};

// Returns the document text with line endings normalized to '\n' and any BOM
// removed. Throws EncodingError on invalid UTF-8.
std::string extract_text(std::string_view bytes, InputFormat format);

// Tokenizes, drops exact consecutive duplicate lines and assigns sections
// from `== HEADING ==` marker lines (tokens before any marker are `other`).
NormalizedDoc normalize(std::string_view raw);

// One line per section, tokens joined by single spaces, each section preceded
// by its marker (a leading `other` section has none). normalize(render(d))
// reproduces d's tokens and sections.
std::string render(const NormalizedDoc& doc);

std::string placeholder_token(PiiClass c);

struct PiiPattern {
    PiiClass pii_class;
    std::string matcher;  // email-address | phone-number | web-address | name-list

    bool operator==(const PiiPattern&) const = default;
};

struct PiiRules {
    std::string version;
    std::vector<PiiPattern> patterns;
    std::set<std::string> name_list;  // text::key() of each listed name
};

struct PiiMatch {
    std::size_t begin;
    std::size_t end;
    PiiClass pii_class;

    bool operator==(const PiiMatch&) const = default;
};

// Rules file: `rule | <class> | <matcher>` and `name | <name>` lines, `#`
// comments, `# version: V`.
PiiRules load_pii_rules(std::istream& in);
PiiRules load_pii_rules_file(const std::filesystem::path& path);
std::filesystem::path default_pii_rules_path();

std::vector<PiiMatch> scan_pii(const std::vector<std::string>& tokens, const PiiRules& rules);
NormalizedDoc mask_pii(const NormalizedDoc& doc, const PiiRules& rules);

// extract_text -> normalize -> mask_pii
NormalizedDoc ingest_document(std::string_view bytes, InputFormat format, const PiiRules& rules);

}  // namespace jobmatch
