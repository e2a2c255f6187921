#pragma once

#include "stwave/mesh.hpp"

#include <array>
#include <vector>

namespace stwave {

/// Triangle quadrature in barycentric coordinates; weights are normalized to sum to one,
/// so the integral over an element is |tau| * sum_q w_q f(x_q).
struct QuadratureRule
{
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    /// Highest total polynomial degree integrated exactly.
    int degree = 0;

    int size() const { return static_cast<int>(weights.size()); }
};

/// Symmetric rules of degree 1, 2, 4, 6 and 8 (Dunavant). Other degrees fall back to
/// the smallest conical product rule that reaches them.
QuadratureRule triangle_rule(int degree);

/// Collapsed-square Gauss-Legendre rule with `n` points per direction, exact to degree 2n-2.
QuadratureRule conical_gauss_rule(int n);

/// Composite rule: the reference triangle is split `levels` times into four congruent pieces.
QuadratureRule subdivided(const QuadratureRule& rule, int levels);

/// Physical coordinates of quadrature point `q` on the triangle with the given vertices.
inline Point map_point(const std::array<Point, 3>& v, const std::array<double, 3>& bary)
{
    return {bary[0] * v[0].x + bary[1] * v[1].x + bary[2] * v[2].x,
            bary[0] * v[0].t + bary[1] * v[1].t + bary[2] * v[2].t};
}

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace stwave
