// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dsa {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical or physical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Load network at exact series resonance with zero loss.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Loaded network too ill-conditioned to solve.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    [[nodiscard]] double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

/// Power balance or passivity violated beyond tolerance.
class ModelConsistencyError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key_path = {})
        : Error(what), key_path_(std::move(key_path)) {}
    [[nodiscard]] const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

}  // namespace dsa
