#pragma once

#include "stwave/quadrature.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace stwave {

/// A real function on the closed space-time square, evaluated as f(x, t).
using ScalarField = std::function<double(double, double)>;

enum class TargetKind
{
    kU1Smooth,
    kU2PiecewiseConstant,
    kU3BilinearHat,
    kU4Sine,
    kZero,
};

/// Support used for the smooth target u1.
enum class U1Support
{
    /// Nonzero where x <= t and t - x <= 2, exactly as the formula is usually quoted.
    kVerbatim,
    /// Nonzero where 0 <= 6t - 3x <= 2, i.e. between the zero lines of the polynomial.
    kBand,
};

double eval_target(TargetKind kind, double x, double t, U1Support support = U1Support::kVerbatim);

struct Target
{
    TargetKind kind = TargetKind::kZero;
    U1Support u1_support = U1Support::kVerbatim;

    double operator()(double x, double t) const { return eval_target(kind, x, t, u1_support); }
    ScalarField field() const { return *this; }

    /// Degree-4 rule; applied on four sub-triangles for the discontinuous u2.
    QuadratureRule quadrature() const;
    std::string name() const;
};

std::optional<TargetKind> parse_target(std::string_view name);
std::string_view target_name(TargetKind kind);

} // namespace stwave
