#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid builder or command parameters (bad n, res, k, ...).
class ParameterError : public Error
{
public:
    using Error::Error;
};

/// Non-manifold, degenerate or off-sphere meshes.
class MeshError : public Error
{
public:
    using Error::Error;
};

/// A request the library does not support (e.g. area form without |A|^2).
class UnsupportedError : public Error
{
public:
    using Error::Error;
};

/// Input violates an operation's contract (e.g. a field that is not sphere-tangent).
class ContractError : public Error
{
public:
    using Error::Error;
};

/// Iterative eigensolver failed to reach the requested residual.
class SolverError : public Error
{
public:
    SolverError(const std::string& what, double best_residual)
        : Error(what + " (best residual " + std::to_string(best_residual) + ")")
        , m_best_residual(best_residual)
    {}

    double best_residual() const { return m_best_residual; }

private:
    double m_best_residual;
};

} // namespace minsurf
