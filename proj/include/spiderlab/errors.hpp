#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spiderlab {

/// Bad argument to an operation (unknown id, out-of-range value, invalid config).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Corpus, targets, or model file could not be parsed. `line()` is 1-based, 0 when not line-specific.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace spiderlab
