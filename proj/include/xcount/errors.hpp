#pragma once

#include <stdexcept>
#include <string>

namespace xcount {

/// Malformed model document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Query or run configuration outside its valid domain.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scaled integer arithmetic left the int64 range.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Base for budget violations (time or memory).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public ResourceError {
public:
    TimeoutError() : ResourceError("time budget exceeded") {}
};

class MemoryLimitError : public ResourceError {
public:
    explicit MemoryLimitError(const std::string& what) : ResourceError(what) {}
};

} // namespace xcount
