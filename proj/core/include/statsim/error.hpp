#pragma once

#include <stdexcept>
#include <string>

namespace statsim {

/// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions disagree with what an operation expects.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters: degenerate layer lists, duplicate exemplar labels, bad config keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t epoch, std::size_t sample)
        : Error("non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                std::to_string(sample)),
          epoch_(epoch),
          sample_(sample) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t epoch_;
    std::size_t sample_;
};

/// A matrix that must be symmetric positive definite is not.
class MatrixError : public Error {
public:
    using Error::Error;
};

/// Operation called on an object in an unusable state (e.g. empty prototype set).
class StateError : public Error {
public:
    using Error::Error;
};

class EmptyImageError : public Error {
public:
    using Error::Error;
};

/// Projection collapsed an edge to zero length, so turn angles are undefined.
class DegenerateViewError : public Error {
public:
    using Error::Error;
};

/// Malformed IDX/PGM input.
class FormatError : public Error {
public:
    using Error::Error;
};

class ArchiveError : public Error {
public:
    using Error::Error;
};

/// The requested pair distribution cannot be drawn from the dataset.
class SamplingError : public Error {
public:
    using Error::Error;
};

}  // namespace statsim
