#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (empty marked set, bad level, ...).
class PreconditionError : public Error
{
public:
    using Error::Error;
};

/// Element with non-positive area.
class DegenerateElement : public Error
{
public:
    using Error::Error;
};

/// Matrix or vector shapes do not fit together, or objects belong to different meshes.
class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

class SingularMatrix : public Error
{
public:
    using Error::Error;
};

/// CG detected p^T A p <= 0.
class NotSPD : public Error
{
public:
    using Error::Error;
};

/// CG ran out of iterations; the last iterate is kept.
class MaxIterations : public Error
{
public:
    MaxIterations(const std::string& what, std::vector<double> iterate, int iterations,
                  double relative_residual)
        : Error(what)
        , iterate_(std::move(iterate))
        , iterations_(iterations)
        , relative_residual_(relative_residual)
    {}

    const std::vector<double>& iterate() const { return iterate_; }
    int iterations() const { return iterations_; }
    double relative_residual() const { return relative_residual_; }

private:
    std::vector<double> iterate_;
    int iterations_;
    double relative_residual_;
};

class Unsupported : public Error
{
public:
    using Error::Error;
};

/// Raised by marking when every indicator is zero.
class AlreadyConverged : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace stwave
