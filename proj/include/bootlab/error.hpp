#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bootlab {

// Precondition violated by the caller (empty data, m >= n, bad probability, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A statistic or functional could not be evaluated on some (pseudo-)sample.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a replicate fails; carries the replicate index and master seed.
class ReplicateError : public EvaluationError {
public:
    ReplicateError(const std::string& what, std::size_t replicate, std::uint64_t seed)
        : EvaluationError(what + " (replicate " + std::to_string(replicate) + ", seed " +
                          std::to_string(seed) + ")"),
          replicate_(replicate), seed_(seed) {}

    [[nodiscard]] std::size_t replicate() const noexcept { return replicate_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

private:
    std::size_t replicate_;
    std::uint64_t seed_;
};

class SingularDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bootlab
