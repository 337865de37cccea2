#pragma once

#include <stdexcept>
#include <string>

namespace blockwave {

// Contract violations: mismatched tables, malformed factor patterns, ...
struct StructuralError : std::logic_error {
    explicit StructuralError(const std::string& m) : std::logic_error(m) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// A rank detected inconsistent collective geometry; all ranks unwind.
struct CollectiveAbort : std::runtime_error {
    explicit CollectiveAbort(const std::string& m) : std::runtime_error(m) {}
};

struct ConvergenceError : std::runtime_error {
    double last_ritz;
    ConvergenceError(const std::string& m, double ritz) : std::runtime_error(m), last_ritz(ritz) {}
};

struct OracleCapError : std::runtime_error {
    long dimension;
    OracleCapError(const std::string& m, long dim) : std::runtime_error(m), dimension(dim) {}
};

} // namespace blockwave
