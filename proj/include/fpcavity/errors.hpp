#pragma once

#include <stdexcept>
#include <string>

namespace fpcavity
{
// Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical fit failed to converge or produced an unphysical result.
class FitError : public std::runtime_error
{
public:
    FitError(const std::string &what, double residual_norm = 0.0, int iterations = 0)
        : std::runtime_error(what), residual_norm_(residual_norm), iterations_(iterations)
    {
    }

    double residual_norm() const { return residual_norm_; }
    int iterations() const { return iterations_; }

private:
    double residual_norm_;
    int iterations_;
};

// File could not be read, parsed, or written.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};
} // namespace fpcavity
