#include "jobmatch/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <regex>

namespace jobmatch::text {
namespace {

bool is_word_char(UChar32 c) {
    return u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool is_joiner(UChar32 c) { return c == '-' || c == '.' || c == '\'' || c == 0x2019; }

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

// Decodes the code point at offset i (advancing i). Malformed bytes decode as
// U+FFFD and consume one byte.
UChar32 next_cp(std::string_view s, std::size_t& i) {
    UChar32 c;
    int32_t pos = static_cast<int32_t>(i);
    U8_NEXT(s.data(), pos, static_cast<int32_t>(s.size()), c);
    i = static_cast<std::size_t>(pos);
    return c < 0 ? 0xFFFD : c;
}

UChar32 peek_cp(std::string_view s, std::size_t i) {
    if (i >= s.size()) return -1;
    return next_cp(s, i);
}

constexpr std::array<std::string_view, 4> kPiiClasses = {"email", "phone", "url", "name"};

// Length of a placeholder starting at s[0], or 0.
std::size_t placeholder_length(std::string_view s) {
    if (!s.starts_with("[PII:")) return 0;
    for (auto cls : kPiiClasses) {
        const std::size_t len = 5 + cls.size() + 1;
        if (s.size() >= len && s.substr(5, cls.size()) == cls && s[len - 1] == ']') return len;
    }
    return 0;
}

// Length of an e-mail or web address starting at s[0], or 0.
std::size_t address_length(std::string_view s) {
    std::size_t end = 0;
    while (end < s.size()) {
        std::size_t probe = end;
        if (is_space(next_cp(s, probe))) break;
        end = probe;
    }
    std::string_view candidate = s.substr(0, end);
    constexpr std::string_view kTrailing = ".,;:!?)]}>\"'";
    while (!candidate.empty() && kTrailing.find(candidate.back()) != std::string_view::npos)
        candidate.remove_suffix(1);
    if (looks_like_email(candidate) || looks_like_url(candidate)) return candidate.size();
    return 0;
}

std::string fold_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool is_ascii(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
    int32_t pos = 0;
    const auto len = static_cast<int32_t>(bytes.size());
    while (pos < len) {
        UChar32 c;
        U8_NEXT(bytes.data(), pos, len, c);
        if (c < 0) return false;
    }
    return true;
}

std::string fold(std::string_view s) {
    if (is_ascii(s)) return fold_ascii(s);
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    u.foldCase(U_FOLD_CASE_DEFAULT);
    icu::UnicodeString normalized = nfc->normalize(u, status);
    std::string out;
    if (U_FAILURE(status)) {
        u.toUTF8String(out);
    } else {
        normalized.toUTF8String(out);
    }
    return out;
}

bool looks_like_email(std::string_view token) {
    if (token.find('@') == std::string_view::npos) return false;
    static const std::regex kEmail(
        R"(^[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}$)");
    return std::regex_match(token.begin(), token.end(), kEmail);
}

bool looks_like_url(std::string_view token) {
    std::string lower = fold_ascii(token);
    std::string_view t = lower;
    for (std::string_view prefix : {"https://", "http://", "www."}) {
        if (t.starts_with(prefix)) return t.size() > prefix.size() + 2;
    }
    return false;
}

bool is_placeholder(std::string_view token) {
    return placeholder_length(token) == token.size() && !token.empty();
}

std::vector<TokenSpan> tokenize_spans(std::string_view s) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const std::size_t start = i;
        if (s[i] == '[') {
            if (std::size_t len = placeholder_length(s.substr(i))) {
                out.push_back({start, start + len, std::string(s.substr(start, len))});
                i += len;
                continue;
            }
        }
        std::size_t probe = i;
        const UChar32 c = next_cp(s, probe);
        if (!is_word_char(c)) {
            i = probe;
            continue;
        }
        if (std::size_t len = address_length(s.substr(i))) {
            out.push_back({start, start + len, fold(s.substr(start, len))});
            i += len;
            continue;
        }
        i = probe;
        while (i < s.size()) {
            std::size_t after = i;
            const UChar32 d = next_cp(s, after);
            if (is_word_char(d)) {
                i = after;
            } else if (is_joiner(d)) {
                const UChar32 e = peek_cp(s, after);
                if (e >= 0 && is_word_char(e)) {
                    i = after;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        out.push_back({start, i, fold(s.substr(start, i - start))});
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    for (auto& span : tokenize_spans(s)) out.push_back(std::move(span.token));
    return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.append(sep);
        out.append(tokens[i]);
    }
    return out;
}

std::string key(std::string_view s) { return join(tokenize(s)); }

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace jobmatch::text
