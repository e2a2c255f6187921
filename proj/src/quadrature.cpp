#include "stwave/quadrature.hpp"

#include "stwave/errors.hpp"

#include <cmath>
#include <numbers>

namespace stwave {

namespace {

void add_orbit(QuadratureRule& rule, double weight, double a, double b, double c)
{
    rule.points.push_back({a, b, c});
    rule.weights.push_back(weight);
}

// centroid
void orbit_1(QuadratureRule& rule, double weight)
{
    add_orbit(rule, weight, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
}

// (a, a, 1-2a) and its rotations
void orbit_3(QuadratureRule& rule, double weight, double a)
{
    const double b = 1.0 - 2.0 * a;
    add_orbit(rule, weight, a, a, b);
    add_orbit(rule, weight, a, b, a);
    add_orbit(rule, weight, b, a, a);
}

// all permutations of (a, b, 1-a-b)
void orbit_6(QuadratureRule& rule, double weight, double a, double b)
{
    const double c = 1.0 - a - b;
    add_orbit(rule, weight, a, b, c);
    add_orbit(rule, weight, a, c, b);
    add_orbit(rule, weight, b, a, c);
    add_orbit(rule, weight, b, c, a);
    add_orbit(rule, weight, c, a, b);
    add_orbit(rule, weight, c, b, a);
}

} // namespace

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1)
        throw PreconditionError("gauss_legendre_unit: need at least one point");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double derivative = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
            }
            derivative = n * (z * p1 - p2) / (z * z - 1.0);
            const double step = p1 / derivative;
            z -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        nodes[i] = 0.5 * (1.0 - z);
        weights[i] = 1.0 / ((1.0 - z * z) * derivative * derivative);
    }
}

QuadratureRule conical_gauss_rule(int n)
{
    std::vector<double> s, w;
    gauss_legendre_unit(n, s, w);
    QuadratureRule rule;
    rule.degree = 2 * n - 2;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double xi = s[i];
            const double eta = (1.0 - s[i]) * s[j];
            // reference area is 1/2, so the normalized weight carries a factor 2
            rule.points.push_back({1.0 - xi - eta, xi, eta});
            rule.weights.push_back(2.0 * w[i] * w[j] * (1.0 - s[i]));
        }
    }
    return rule;
}

QuadratureRule triangle_rule(int degree)
{
    QuadratureRule rule;
    switch (degree) {
    case 0:
    case 1:
        rule.degree = 1;
        orbit_1(rule, 1.0);
        return rule;
    case 2:
        rule.degree = 2;
        orbit_3(rule, 1.0 / 3.0, 1.0 / 6.0);
        return rule;
    case 3:
    case 4:
        rule.degree = 4;
        orbit_3(rule, 0.223381589678011, 0.445948490915965);
        orbit_3(rule, 0.109951743655322, 0.091576213509771);
        return rule;
    case 5:
    case 6:
        rule.degree = 6;
        orbit_3(rule, 0.116786275726379, 0.249286745170910);
        orbit_3(rule, 0.050844906370207, 0.063089014491502);
        orbit_6(rule, 0.082851075618374, 0.053145049844817, 0.310352451033784);
        return rule;
    case 7:
    case 8:
        rule.degree = 8;
        orbit_1(rule, 0.144315607677787);
        orbit_3(rule, 0.095091634267285, 0.459292588292723);
        orbit_3(rule, 0.103217370534718, 0.170569307751760);
        orbit_3(rule, 0.032458497623198, 0.050547228317031);
        orbit_6(rule, 0.027230314174435, 0.008394777409958, 0.263112829634638);
        return rule;
    default:
        if (degree < 0)
            throw PreconditionError("triangle_rule: negative degree");
        return conical_gauss_rule((degree + 3) / 2);
    }
}

QuadratureRule subdivided(const QuadratureRule& rule, int levels)
{
    if (levels < 0)
        throw PreconditionError("subdivided: negative level count");
    QuadratureRule current = rule;
    using Bary = std::array<double, 3>;
    const Bary c0{1, 0, 0}, c1{0, 1, 0}, c2{0, 0, 1};
    const Bary m01{0.5, 0.5, 0}, m12{0, 0.5, 0.5}, m20{0.5, 0, 0.5};
    const std::array<std::array<Bary, 3>, 4> pieces{{
        {c0, m01, m20},
        {m01, c1, m12},
        {m20, m12, c2},
        {m12, m20, m01},
    }};
    for (int l = 0; l < levels; ++l) {
        QuadratureRule next;
        next.degree = current.degree;
        for (const auto& piece : pieces) {
            for (int q = 0; q < current.size(); ++q) {
                Bary p{0, 0, 0};
                for (int k = 0; k < 3; ++k)
                    for (int c = 0; c < 3; ++c)
                        p[c] += current.points[q][k] * piece[k][c];
                next.points.push_back(p);
                next.weights.push_back(0.25 * current.weights[q]);
            }
        }
        current = std::move(next);
    }
    return current;
}

} // namespace stwave
