#pragma once
/**
 * @file circle_criteria.hpp
 * @brief Closed-form inflection criteria for the circular table: the 2-jet
 *        transport condition, its specialization to a circle, and the
 *        quadratic whose root structure forces exactly four cusps.
 */

#include <array>
#include <cmath>

#include "caustics/geometry.hpp"

namespace caustics {

/**
 * Residual of the inflection-transport condition for a family through
 * (alpha0, p0) with 2-jet p0, p1, p2 under a map (alpha, p) ->
 * (alpha + phi(p), p) with 2-jet phi0, phi1, phi2:
 *
 *     p2 + p0 (1 + p1 phi1)^3 - p1^3 phi2
 *
 * Zero iff the image point is an inflection of the image family. With
 * phi = 0 it reduces to the plain inflection condition p2 + p0.
 */
inline double inflection_condition(double p0, double p1, double p2, double /*phi0*/,
                                   double phi1, double phi2) {
    const double u = 1.0 + p1 * phi1;
    return p2 + p0 * u * u * u - p1 * p1 * p1 * phi2;
}

/**
 * Specialization to the unit circle with source (a, b), probed at the
 * normalized configuration alpha0 = 0 after n reflections:
 *
 *     b - b [1 - 2an/sqrt(1-b^2)]^3 - 2 a^3 b n / (1-b^2)^(3/2)
 *
 * Vanishes identically on the axes a = 0 and b = 0; nowhere else on
 * 0 < a^2 + b^2 < 1 (this is what makes the four circle cusps the only ones).
 */
inline double circle_inflection_residual(double a, double b, int n) {
    const double w = std::sqrt(1.0 - b * b);
    const double u = 1.0 - 2.0 * a * n / w;
    return b - b * u * u * u - 2.0 * a * a * a * b * n / (w * w * w);
}

/// Root structure of (4n^2-1) x^2 - 6n x + 3 = 0. The same quadratic
/// governs both the off-axis inflection condition and the on-axis
/// degeneracy condition (the coefficients coincide).
struct CuspQuadratic {
    double discriminant{0.0};  ///< exactly 12 (1 - n^2)
    int root_count{0};
    std::array<double, 2> roots{0.0, 0.0};
};

inline CuspQuadratic circle_quadratics(int n) {
    CuspQuadratic out;
    const double A = 4.0 * n * n - 1.0, B = -6.0 * n, C = 3.0;
    out.discriminant = B * B - 4.0 * A * C;  // = 12 (1 - n^2), exact in doubles
    if (out.discriminant < 0.0) {
        out.root_count = 0;
    } else if (out.discriminant == 0.0) {
        out.root_count = 1;
        out.roots[0] = -B / (2.0 * A);
    } else {
        out.root_count = 2;
        const double sq = std::sqrt(out.discriminant);
        const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
        out.roots = {q / A, C / q};
        if (out.roots[0] > out.roots[1]) std::swap(out.roots[0], out.roots[1]);
    }
    return out;
}

}  // namespace caustics
