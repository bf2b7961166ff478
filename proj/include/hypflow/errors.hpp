#pragma once

#include <stdexcept>
#include <string>

namespace hypflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A curvature vector left the Garding cone required by a speed function.
class ConeViolation : public Error {
public:
    ConeViolation(const std::string& what, int cone_index, long node = -1)
        : Error(what), cone_index_(cone_index), node_(node) {}

    int cone_index() const noexcept { return cone_index_; }
    /// Grid node where the violation was detected, or -1 for pointwise calls.
    long node() const noexcept { return node_; }

private:
    int cone_index_;
    long node_;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

class DegenerateMetric : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NotStarShaped : public Error {
public:
    using Error::Error;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

class NeedsMoreSamples : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace hypflow
