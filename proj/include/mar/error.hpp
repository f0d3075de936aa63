#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mar {

// Bad shapes, out-of-range parameters, mismatched geometry.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Solver configuration rejected before any iteration runs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A non-finite value showed up in the iteration.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::int64_t iteration)
        : std::runtime_error(what), iteration_(iteration) {}

    std::int64_t iteration() const noexcept { return iteration_; }

private:
    std::int64_t iteration_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed grid file. Carries the byte offset at which parsing failed.
class FormatError : public IoError {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : IoError(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace mar
