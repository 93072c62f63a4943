#include "jobmatch/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "jobmatch/errors.hpp"
#include "jobmatch/text.hpp"

namespace jobmatch {

std::string_view to_string(VariantClass v) {
    switch (v) {
        case VariantClass::synonym: return "synonym";
        case VariantClass::acronym: return "acronym";
        case VariantClass::title_variant: return "title_variant";
    }
    return "synonym";
}

std::optional<VariantClass> parse_variant_class(std::string_view s) {
    if (s == "synonym") return VariantClass::synonym;
    if (s == "acronym") return VariantClass::acronym;
    if (s == "title_variant") return VariantClass::title_variant;
    return std::nullopt;
}

Ontology::Ontology(std::string version, std::vector<Concept> concepts)
    : version_(std::move(version)), concepts_(std::move(concepts)) {
    if (concepts_.empty()) throw ParseError("ontology has no concepts");
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        Concept& c = concepts_[i];
        std::stable_sort(c.surface_forms.begin(), c.surface_forms.end(),
                         [](const SurfaceForm& a, const SurfaceForm& b) { return a.variant < b.variant; });
        if (c.id.empty()) throw ParseError("concept with empty id");
        if (!by_id_.emplace(c.id, i).second) throw ParseError("duplicate concept id '" + c.id + "'");

        auto register_form = [&](const std::string& form) {
            const std::vector<std::string> tokens = text::tokenize(form);
            if (tokens.empty()) throw ParseError("surface form '" + form + "' of '" + c.id + "' has no words");
            max_form_tokens_ = std::max(max_form_tokens_, tokens.size());
            auto [it, inserted] = by_key_.emplace(text::join(tokens), i);
            if (!inserted) throw DuplicateSurfaceFormError(form, concepts_[it->second].id, c.id, 0);
        };
        register_form(c.canonical_name);
        for (const auto& f : c.surface_forms) register_form(f.text);
    }
}

const Concept* Ontology::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &concepts_[it->second];
}

const Concept& Ontology::at(std::string_view id) const {
    if (const Concept* c = find(id)) return *c;
    throw std::out_of_range("unknown concept id '" + std::string(id) + "'");
}

std::optional<std::string> Ontology::canonicalize(std::string_view term) const {
    if (const Concept* c = lookup_key(text::key(term))) return c->id;
    return std::nullopt;
}

const Concept* Ontology::lookup_key(std::string_view key) const {
    auto it = by_key_.find(std::string(key));
    return it == by_key_.end() ? nullptr : &concepts_[it->second];
}

std::vector<std::string> Ontology::surface_forms(std::string_view id, VariantClass variant) const {
    std::vector<std::string> out;
    for (const auto& f : at(id).surface_forms)
        if (f.variant == variant) out.push_back(f.text);
    return out;
}

std::vector<std::string> Ontology::domain_tags() const {
    std::set<std::string> tags;
    for (const auto& c : concepts_) tags.insert(c.domain_tag);
    return {tags.begin(), tags.end()};
}

std::vector<const Concept*> Ontology::concepts_with_tag(std::string_view tag) const {
    std::vector<const Concept*> out;
    for (const auto& c : concepts_)
        if (c.domain_tag == tag) out.push_back(&c);
    return out;
}

std::vector<ConceptSpan> scan_concepts(const std::vector<std::string>& tokens, const Ontology& ontology) {
    const std::size_t window = ontology.max_form_tokens();
    std::vector<ConceptSpan> out;
    std::size_t i = 0;
    std::string probe;
    while (i < tokens.size()) {
        const Concept* hit = nullptr;
        std::size_t hit_len = 0;
        probe.clear();
        for (std::size_t len = 1; len <= window && i + len <= tokens.size(); ++len) {
            if (len > 1) probe.push_back(' ');
            probe += tokens[i + len - 1];
            if (const Concept* c = ontology.lookup_key(probe)) {
                hit = c;
                hit_len = len;
            }
        }
        if (hit) {
            out.push_back({i, i + hit_len, hit});
            i += hit_len;
        } else {
            ++i;
        }
    }
    return out;
}

namespace {

constexpr std::string_view kVersionPrefix = "# version:";

void check_form_chars(const std::string& form, std::size_t line) {
    if (form.find_first_of("|;:,") != std::string::npos)
        throw ParseError("surface form '" + form + "' contains a reserved character", line);
}

}  // namespace

Ontology load_ontology(std::istream& in) {
    std::string version;
    std::vector<Concept> concepts;
    std::unordered_map<std::string, std::pair<std::string, std::size_t>> seen;  // key -> (id, line)
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!text::is_valid_utf8(line)) throw ParseError("invalid UTF-8", line_no);
        const std::string trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed.front() == '#') {
            if (version.empty() && trimmed.starts_with(kVersionPrefix))
                version = text::trim(std::string_view(trimmed).substr(kVersionPrefix.size()));
            continue;
        }
        const auto fields = text::split(trimmed, '|');
        if (fields.size() != 4)
            throw ParseError("expected 4 '|'-separated fields, found " + std::to_string(fields.size()), line_no);
        Concept c;
        c.id = text::trim(fields[0]);
        c.canonical_name = text::trim(fields[1]);
        c.domain_tag = text::trim(fields[2]);
        if (c.id.empty() || c.canonical_name.empty() || c.domain_tag.empty())
            throw ParseError("empty id, canonical name or domain tag", line_no);
        check_form_chars(c.canonical_name, line_no);

        const std::string forms_field = text::trim(fields[3]);
        if (!forms_field.empty()) {
            for (const auto& entry_raw : text::split(forms_field, ';')) {
                const std::string entry = text::trim(entry_raw);
                if (entry.empty()) continue;
                const auto colon = entry.find(':');
                if (colon == std::string::npos)
                    throw ParseError("form entry '" + entry + "' lacks a 'class:' prefix", line_no);
                const auto variant = parse_variant_class(text::trim(std::string_view(entry).substr(0, colon)));
                if (!variant) throw ParseError("unknown variant class in '" + entry + "'", line_no);
                for (const auto& form_raw : text::split(std::string_view(entry).substr(colon + 1), ',')) {
                    std::string form = text::trim(form_raw);
                    if (form.empty()) throw ParseError("empty surface form", line_no);
                    c.surface_forms.push_back({std::move(form), *variant});
                }
            }
        }

        // Duplicate detection here (rather than only in the Ontology
        // constructor) so the error carries a line number.
        auto note = [&](const std::string& form) {
            const std::string k = text::key(form);
            if (k.empty()) throw ParseError("surface form '" + form + "' has no words", line_no);
            auto [it, inserted] = seen.emplace(k, std::make_pair(c.id, line_no));
            if (!inserted) throw DuplicateSurfaceFormError(form, it->second.first, c.id, line_no);
        };
        note(c.canonical_name);
        for (const auto& f : c.surface_forms) note(f.text);
        concepts.push_back(std::move(c));
    }
    if (concepts.empty()) throw ParseError("ontology file contains no concept records");
    return Ontology(std::move(version), std::move(concepts));
}

Ontology load_ontology_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open ontology file " + path.string());
    return load_ontology(in);
}

std::string serialize_ontology(const Ontology& ontology) {
    std::ostringstream out;
    if (!ontology.version().empty()) out << kVersionPrefix << ' ' << ontology.version() << '\n';
    for (const auto& c : ontology.concepts()) {
        out << c.id << " | " << c.canonical_name << " | " << c.domain_tag << " | ";
        bool first_class = true;
        for (VariantClass v : {VariantClass::synonym, VariantClass::acronym, VariantClass::title_variant}) {
            std::vector<std::string> forms;
            for (const auto& f : c.surface_forms)
                if (f.variant == v) forms.push_back(f.text);
            if (forms.empty()) continue;
            if (!first_class) out << ';';
            first_class = false;
            out << to_string(v) << ':' << text::join(forms, ",");
        }
        out << '\n';
    }
    return out.str();
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("JOBMATCH_DATA_DIR")) return env;
    return JOBMATCH_DATA_DIR;
}

std::filesystem::path default_ontology_path() { return default_data_dir() / "ontology.txt"; }

}  // namespace jobmatch
