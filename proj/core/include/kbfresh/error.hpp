#pragma once
// Error hierarchy. Categories map onto CLI exit codes:
//   usage (bad parameters/config) -> 1, data (I/O, parse, validation,
//   source failures) -> 2, dependency (missing stage artifact) -> 3.

#include <stdexcept>
#include <string>

namespace kbfresh {

enum class ErrorKind { Usage, Data, Dependency, Internal };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& msg) : Error(ErrorKind::Usage, msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::Usage, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::Data, msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(ErrorKind::Data, msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(ErrorKind::Data, msg) {}
};

// Network or source-side failure after retries were exhausted.
struct SourceError : Error {
    SourceError(const std::string& msg, int attempts)
        : Error(ErrorKind::Data, msg), attempts(attempts) {}
    int attempts;
};

struct UndefinedMetricError : Error {
    explicit UndefinedMetricError(const std::string& msg) : Error(ErrorKind::Data, msg) {}
};

struct DependencyError : Error {
    explicit DependencyError(const std::string& msg) : Error(ErrorKind::Dependency, msg) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& msg) : Error(ErrorKind::Internal, msg) {}
};

}  // namespace kbfresh
