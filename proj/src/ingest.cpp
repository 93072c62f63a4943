#include "jobmatch/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "jobmatch/errors.hpp"
#include "jobmatch/ontology.hpp"
#include "jobmatch/text.hpp"

namespace jobmatch {

std::string_view to_string(SectionLabel s) {
    switch (s) {
        case SectionLabel::header: return "header";
        case SectionLabel::experience: return "experience";
        case SectionLabel::skills: return "skills";
        case SectionLabel::education: return "education";
        case SectionLabel::other: return "other";
    }
    return "other";
}

std::string_view to_string(PiiClass c) {
    switch (c) {
        case PiiClass::email: return "email";
        case PiiClass::phone: return "phone";
        case PiiClass::url: return "url";
        case PiiClass::name: return "name";
    }
    return "name";
}

std::optional<PiiClass> parse_pii_class(std::string_view s) {
    if (s == "email") return PiiClass::email;
    if (s == "phone") return PiiClass::phone;
    if (s == "url") return PiiClass::url;
    if (s == "name") return PiiClass::name;
    return std::nullopt;
}

InputFormat parse_input_format(std::string_view s) {
    if (s == "plain") return InputFormat::plain;
    if (s == "sectioned") return InputFormat::sectioned;
    throw std::invalid_argument("unknown input format '" + std::string(s) + "'");
}

SectionLabel section_label_for_heading(std::string_view heading) {
    const std::string h = text::key(heading);
    auto has = [&](std::string_view w) { return h.find(w) != std::string::npos; };
    if (has("experience") || has("employment") || has("work history")) return SectionLabel::experience;
    if (has("skill")) return SectionLabel::skills;
    if (has("education")) return SectionLabel::education;
    if (has("header") || has("contact") || has("profile") || has("summary")) return SectionLabel::header;
    return SectionLabel::other;
}

namespace {

// Heading text of a `== HEADING ==` line, if it is one.
std::optional<std::string> marker_heading(std::string_view line) {
    const std::string t = text::trim(line);
    if (t.size() < 5 || !t.starts_with("==") || !t.ends_with("==")) return std::nullopt;
    std::string inner = text::trim(std::string_view(t).substr(2, t.size() - 4));
    if (inner.empty()) return std::nullopt;
    return inner;
}

void push_section(std::vector<Section>& sections, SectionLabel label, std::size_t begin, std::size_t end) {
    if (begin == end) return;
    if (!sections.empty() && sections.back().label == label && sections.back().end == begin) {
        sections.back().end = end;
        return;
    }
    sections.push_back({label, begin, end});
}

bool is_numeric_token(const std::string& t) {
    if (t.empty() || t[0] < '0' || t[0] > '9') return false;
    return std::all_of(t.begin(), t.end(),
                       [](char c) { return (c >= '0' && c <= '9') || c == '-' || c == '.'; });
}

std::size_t digit_count(const std::string& t) {
    return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }));
}

// Each returns the match length at position i, 0 for none.
std::size_t match_email(const std::vector<std::string>& tokens, std::size_t i) {
    return text::looks_like_email(tokens[i]) ? 1 : 0;
}

std::size_t match_url(const std::vector<std::string>& tokens, std::size_t i) {
    return text::looks_like_url(tokens[i]) ? 1 : 0;
}

// Up to four adjacent numeric tokens: a single token needs 7-15 digits, a
// group needs 10-15 digits in total.
std::size_t match_phone(const std::vector<std::string>& tokens, std::size_t i) {
    std::size_t run = 0;
    while (i + run < tokens.size() && run < 4 && is_numeric_token(tokens[i + run])) ++run;
    for (std::size_t len = run; len >= 1; --len) {
        std::size_t digits = 0;
        for (std::size_t j = i; j < i + len; ++j) digits += digit_count(tokens[j]);
        const std::size_t min_digits = len == 1 ? 7 : 10;
        if (digits >= min_digits && digits <= 15) return len;
    }
    return 0;
}

std::size_t match_names(const std::vector<std::string>& tokens, std::size_t i, const PiiRules& rules,
                        std::size_t max_name_tokens) {
    std::size_t end = i;
    for (;;) {
        std::size_t best = 0;
        std::string probe;
        for (std::size_t len = 1; len <= max_name_tokens && end + len <= tokens.size(); ++len) {
            if (len > 1) probe.push_back(' ');
            probe += tokens[end + len - 1];
            if (rules.name_list.count(probe)) best = len;
        }
        if (best == 0) break;
        end += best;
    }
    return end - i;
}

std::size_t max_tokens_in(const std::set<std::string>& keys) {
    std::size_t m = 0;
    for (const auto& k : keys) m = std::max(m, static_cast<std::size_t>(std::count(k.begin(), k.end(), ' ') + 1));
    return m;
}

}  // namespace

std::string extract_text(std::string_view bytes, InputFormat format) {
    if (!text::is_valid_utf8(bytes)) throw EncodingError("input is not valid UTF-8");
    if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
    std::string out;
    out.reserve(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
        } else {
            out.push_back(bytes[i]);
        }
    }
    if (format == InputFormat::sectioned) {
        // Rewrite marker lines into their canonical `== HEADING ==` spelling.
        std::string canonical;
        for (const auto& line : text::split(out, '\n')) {
            if (auto heading = marker_heading(line)) {
                canonical += "== " + *heading + " ==";
            } else {
                canonical += line;
            }
            canonical.push_back('\n');
        }
        canonical.pop_back();
        return canonical;
    }
    return out;
}

NormalizedDoc normalize(std::string_view raw) {
    NormalizedDoc doc;
    SectionLabel current = SectionLabel::other;
    std::size_t section_start = 0;
    std::optional<std::string_view> previous;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto nl = raw.find('\n', pos);
        if (nl == std::string_view::npos) nl = raw.size();
        std::string_view line = raw.substr(pos, nl - pos);
        pos = nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (previous && *previous == line) continue;
        previous = line;

        if (auto heading = marker_heading(line)) {
            push_section(doc.sections, current, section_start, doc.tokens.size());
            current = section_label_for_heading(*heading);
            section_start = doc.tokens.size();
            continue;
        }
        for (auto& t : text::tokenize(line)) doc.tokens.push_back(std::move(t));
    }
    push_section(doc.sections, current, section_start, doc.tokens.size());
    return doc;
}

std::string render(const NormalizedDoc& doc) {
    std::string out;
    for (std::size_t s = 0; s < doc.sections.size(); ++s) {
        const Section& sec = doc.sections[s];
        if (!(s == 0 && sec.label == SectionLabel::other)) {
            out += "== ";
            out += to_string(sec.label);
            out += " ==\n";
        }
        for (std::size_t i = sec.begin; i < sec.end; ++i) {
            if (i != sec.begin) out.push_back(' ');
            out += doc.tokens[i];
        }
        out.push_back('\n');
    }
    return out;
}

std::string placeholder_token(PiiClass c) { return "[PII:" + std::string(to_string(c)) + "]"; }

PiiRules load_pii_rules(std::istream& in) {
    PiiRules rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = text::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            constexpr std::string_view kVersion = "# version:";
            if (rules.version.empty() && t.starts_with(kVersion))
                rules.version = text::trim(std::string_view(t).substr(kVersion.size()));
            continue;
        }
        const auto fields = text::split(t, '|');
        const std::string kind = text::trim(fields[0]);
        if (kind == "rule") {
            if (fields.size() != 3) throw ParseError("rule lines need 3 fields", line_no);
            const auto cls = parse_pii_class(text::trim(fields[1]));
            if (!cls) throw ParseError("unknown PII class '" + text::trim(fields[1]) + "'", line_no);
            std::string matcher = text::trim(fields[2]);
            if (matcher != "email-address" && matcher != "phone-number" && matcher != "web-address" &&
                matcher != "name-list")
                throw ParseError("unknown matcher '" + matcher + "'", line_no);
            rules.patterns.push_back({*cls, std::move(matcher)});
        } else if (kind == "name") {
            if (fields.size() != 2) throw ParseError("name lines need 2 fields", line_no);
            std::string k = text::key(fields[1]);
            if (k.empty()) throw ParseError("empty name", line_no);
            rules.name_list.insert(std::move(k));
        } else {
            throw ParseError("unknown record kind '" + kind + "'", line_no);
        }
    }
    return rules;
}

PiiRules load_pii_rules_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open PII rules file " + path.string());
    return load_pii_rules(in);
}

std::filesystem::path default_pii_rules_path() { return default_data_dir() / "pii_rules.txt"; }

std::vector<PiiMatch> scan_pii(const std::vector<std::string>& tokens, const PiiRules& rules) {
    std::vector<PiiMatch> matches;
    const std::size_t max_name_tokens = max_tokens_in(rules.name_list);
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (text::is_placeholder(tokens[i])) {
            ++i;
            continue;
        }
        std::size_t len = 0;
        PiiClass cls{};
        for (const auto& p : rules.patterns) {
            if (p.matcher == "email-address") len = match_email(tokens, i);
            else if (p.matcher == "web-address") len = match_url(tokens, i);
            else if (p.matcher == "phone-number") len = match_phone(tokens, i);
            else if (p.matcher == "name-list") len = match_names(tokens, i, rules, max_name_tokens);
            if (len) {
                cls = p.pii_class;
                break;
            }
        }
        if (len) {
            matches.push_back({i, i + len, cls});
            i += len;
        } else {
            ++i;
        }
    }
    return matches;
}

NormalizedDoc mask_pii(const NormalizedDoc& doc, const PiiRules& rules) {
    const auto matches = scan_pii(doc.tokens, rules);
    if (matches.empty()) return doc;

    // Label of every input token, so sections can be rebuilt after the
    // token count changes.
    std::vector<SectionLabel> labels(doc.tokens.size(), SectionLabel::other);
    for (const auto& s : doc.sections)
        for (std::size_t i = s.begin; i < s.end; ++i) labels[i] = s.label;

    NormalizedDoc out;
    std::vector<SectionLabel> out_labels;
    std::vector<std::size_t> remap(doc.tokens.size() + 1, 0);
    std::size_t m = 0;
    for (std::size_t i = 0; i < doc.tokens.size();) {
        if (m < matches.size() && matches[m].begin == i) {
            const PiiMatch& match = matches[m++];
            for (std::size_t j = match.begin; j < match.end; ++j) remap[j] = out.tokens.size();
            out.masked_spans.push_back({out.tokens.size(), match.end - match.begin, match.pii_class});
            out.tokens.push_back(placeholder_token(match.pii_class));
            out_labels.push_back(labels[i]);
            i = match.end;
        } else {
            remap[i] = out.tokens.size();
            out.tokens.push_back(doc.tokens[i]);
            out_labels.push_back(labels[i]);
            ++i;
        }
    }
    for (const auto& prior : doc.masked_spans)
        out.masked_spans.push_back({remap[prior.position], prior.original_length, prior.pii_class});
    std::sort(out.masked_spans.begin(), out.masked_spans.end(),
              [](const MaskedSpan& a, const MaskedSpan& b) { return a.position < b.position; });

    for (std::size_t i = 0; i < out_labels.size(); ++i) push_section(out.sections, out_labels[i], i, i + 1);
    return out;
}

NormalizedDoc ingest_document(std::string_view bytes, InputFormat format, const PiiRules& rules) {
    return mask_pii(normalize(extract_text(bytes, format)), rules);
}

}  // namespace jobmatch
