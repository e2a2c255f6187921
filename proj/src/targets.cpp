#include "stwave/targets.hpp"

#include <cmath>
#include <numbers>

namespace stwave {

namespace {

double smooth_polynomial(double x, double t)
{
    const double a = 6.0 * t - 3.0 * x - 2.0;
    const double b = 3.0 * x - 6.0 * t;
    return 0.5 * a * a * a * b * b * b;
}

double hat(double s)
{
    if (s < 0.25 || s > 0.75)
        return 0.0;
    return 1.0 - std::abs(s - 0.5) / 0.25;
}

} // namespace

double eval_target(TargetKind kind, double x, double t, U1Support support)
{
    switch (kind) {
    case TargetKind::kU1Smooth:
        if (support == U1Support::kVerbatim)
            return (x <= t && t - x <= 2.0) ? smooth_polynomial(x, t) : 0.0;
        {
            const double s = 6.0 * t - 3.0 * x;
            return (s >= 0.0 && s <= 2.0) ? smooth_polynomial(x, t) : 0.0;
        }
    case TargetKind::kU2PiecewiseConstant:
        return (x > 0.25 && x < 0.75 && t > 0.25 && t < 0.75) ? 1.0 : 0.0;
    case TargetKind::kU3BilinearHat:
        return hat(x) * hat(t);
    case TargetKind::kU4Sine:
        return t * std::sin(std::numbers::pi * t) * std::sin(std::numbers::pi * x);
    case TargetKind::kZero:
        return 0.0;
    }
    return 0.0;
}

QuadratureRule Target::quadrature() const
{
    const QuadratureRule base = triangle_rule(4);
    return kind == TargetKind::kU2PiecewiseConstant ? subdivided(base, 1) : base;
}

std::string Target::name() const
{
    return std::string(target_name(kind));
}

std::string_view target_name(TargetKind kind)
{
    switch (kind) {
    case TargetKind::kU1Smooth:
        return "u1";
    case TargetKind::kU2PiecewiseConstant:
        return "u2";
    case TargetKind::kU3BilinearHat:
        return "u3";
    case TargetKind::kU4Sine:
        return "u4";
    case TargetKind::kZero:
        return "zero";
    }
    return "zero";
}

std::optional<TargetKind> parse_target(std::string_view name)
{
    for (auto kind : {TargetKind::kU1Smooth, TargetKind::kU2PiecewiseConstant, TargetKind::kU3BilinearHat,
                      TargetKind::kU4Sine, TargetKind::kZero})
        if (target_name(kind) == name)
            return kind;
    return std::nullopt;
}

} // namespace stwave
