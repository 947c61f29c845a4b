#pragma once

#include <stdexcept>
#include <string>

namespace evfield {

// Malformed input text (CoNLL-U lines, sidecar records, config files).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally invalid data: cyclic dependency graphs, multiple roots,
// candidates pointing outside the sentence.
struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

// Incompatible tensor shapes. The message names both shapes.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-range or inconsistent configuration values.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training aborted because the loss became non-finite.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace evfield
