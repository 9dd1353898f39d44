#pragma once

#include <stdexcept>
#include <string>

namespace hostile_pac {

// Bad input or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine did not reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A statistical assumption required by a requested guarantee does not hold.
class AssumptionViolation : public std::runtime_error {
public:
    explicit AssumptionViolation(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

} // namespace detail

} // namespace hostile_pac
