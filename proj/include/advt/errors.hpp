#pragma once

#include <stdexcept>
#include <string>

namespace advt {

/// Raised when a caller violates an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised by the particle filter when no particle survives the update.
class ParticleDepletion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed manifests, unknown problem or variant ids, and bad config files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* what) {
    if (!condition) throw ContractViolation(what);
}

/// Builds its message eagerly; keep it off hot paths.
inline void require(bool condition, const std::string& what) {
    if (!condition) throw ContractViolation(what);
}

}  // namespace advt
