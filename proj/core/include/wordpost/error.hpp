#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wordpost {

// Malformed input text. line() is 1-based; 0 means "not tied to a line".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class OutOfVocabulary : public std::out_of_range {
public:
    explicit OutOfVocabulary(const std::string& token)
        : std::out_of_range("out-of-vocabulary token: " + token), token_(token) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

// A computation hit a degenerate or non-finite state (rank deficiency,
// exploding gradients, zero-norm vectors). Distinct from argument errors,
// which are reported as std::invalid_argument.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wordpost
