#pragma once

// Shared text layer: UTF-8 checks, case folding and the word tokenizer used by
// ingest, ontology lookup, keyword screening and the built-in embedder.
//
// Tokenization rules:
//   * words are maximal runs of letters, digits and combining marks
//   * '-', '.', '\'' and U+2019 stay inside a word when both neighbours are
//     word characters ("scikit-learn", "node.js", "555-201-3344")
//   * e-mail addresses, http(s):// and www. addresses, and PII placeholders
//     ("[PII:email]") are single tokens
//   * everything else separates tokens and is dropped
//   * tokens are case-folded and NFC-normalized; placeholders are kept verbatim

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace jobmatch::text {

struct TokenSpan {
    std::size_t begin;  // byte offsets into the source text
    std::size_t end;
    std::string token;  // folded form
};

bool is_valid_utf8(std::string_view bytes);

// NFC + full case folding.
std::string fold(std::string_view s);

std::vector<TokenSpan> tokenize_spans(std::string_view s);
std::vector<std::string> tokenize(std::string_view s);

// Lookup key: folded tokens joined by single spaces.
std::string key(std::string_view s);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

bool is_placeholder(std::string_view token);
bool looks_like_email(std::string_view token);
bool looks_like_url(std::string_view token);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace jobmatch::text
