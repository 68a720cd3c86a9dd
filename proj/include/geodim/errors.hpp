#pragma once

#include <stdexcept>
#include <string>

namespace geodim {

/// Invalid configuration: bad density grammar, out-of-range radius, bad
/// experiment parameters. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Malformed input file (edge list, point-cloud CSV, JSON config).
/// Messages carry the offending line number where one exists.
/// CLI maps this to exit code 3.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

} // namespace geodim
