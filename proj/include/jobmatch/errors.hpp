#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jobmatch {

// Malformed input file (ontology, PII rules, corpus, config). Line is
// 1-based; 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateSurfaceFormError : public ParseError {
public:
    DuplicateSurfaceFormError(const std::string& form, const std::string& first_concept,
                              const std::string& second_concept, std::size_t line)
        : ParseError("surface form '" + form + "' declared by both '" + first_concept +
                         "' and '" + second_concept + "'",
                     line),
          form_(form), first_(first_concept), second_(second_concept) {}

    const std::string& form() const noexcept { return form_; }
    const std::string& first_concept() const noexcept { return first_; }
    const std::string& second_concept() const noexcept { return second_; }

private:
    std::string form_;
    std::string first_;
    std::string second_;
};

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment/CLI configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnembeddableDocument : public std::runtime_error {
public:
    UnembeddableDocument() : std::runtime_error("unembeddable document") {}
};

}  // namespace jobmatch
