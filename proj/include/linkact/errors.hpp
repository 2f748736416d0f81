#pragma once

#include <stdexcept>
#include <string>

namespace linkact {

/// Malformed or invalid input file. `field()` names the offending entry.
class ParseError : public std::runtime_error {
   public:
    ParseError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

   private:
    std::string field_;
};

/// A file could not be opened, read, or written.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Topology generation could not place a link within the retry bound.
class GenerationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Solution that is not well formed (inactive canceller, duplicate index,
/// index out of range). Distinct from a well-formed but infeasible solution.
class SolutionError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// ILP emission was asked for something the formulation cannot express.
class ModelError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace linkact
