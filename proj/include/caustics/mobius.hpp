#pragma once
/**
 * @file mobius.hpp
 * @brief Closed-form dynamics of on-axis cusps: the mirror equation and the
 *        fractional-linear maps it generates on the table's axes.
 */

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "caustics/family.hpp"
#include "caustics/geometry.hpp"

namespace caustics {

struct ZeroDistanceError : GeometryError {
    using GeometryError::GeometryError;
};

/// A point on an axis, possibly at infinity (image at the focal distance,
/// or a Möbius pole hit).
struct AxisImage {
    bool at_infinity{false};
    double value{0.0};
};

/// Mirror equation 1/d + 1/d' = 2k for a convex mirror of curvature k:
/// image distance of an object at distance d along the normal.
/// d = 1/(2k) sends the image to infinity; d = 0 is rejected.
inline AxisImage mirror_image(double d, double k) {
    if (d == 0.0) throw ZeroDistanceError("mirror_image: object on the mirror (d = 0)");
    const double denom = 2.0 * k - 1.0 / d;
    if (std::fabs(denom) < 1e-14 * std::max(std::fabs(2.0 * k), std::fabs(1.0 / d)))
        return {true, 0.0};
    return {false, 1.0 / denom};
}

/// Real fractional-linear map x -> (m11 x + m12)/(m21 x + m22), det != 0.
/// Composition and iteration go through the 2x2 coefficient matrix.
class MobiusMap {
public:
    MobiusMap() = default;
    MobiusMap(double m11, double m12, double m21, double m22)
        : m_{{m11, m12}, {m21, m22}} {
        if (det() == 0.0) throw std::invalid_argument("MobiusMap: singular coefficient matrix");
    }

    double entry(int i, int j) const { return m_[i][j]; }
    double det() const { return m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0]; }
    double trace() const { return m_[0][0] + m_[1][1]; }

    AxisImage apply(double x) const {
        const double den = m_[1][0] * x + m_[1][1];
        const double num = m_[0][0] * x + m_[0][1];
        if (std::fabs(den) < 1e-14 * (std::fabs(m_[1][0] * x) + std::fabs(m_[1][1]) + 1.0))
            return {true, 0.0};
        return {false, num / den};
    }

    std::complex<double> apply(std::complex<double> z) const {
        return (m_[0][0] * z + m_[0][1]) / (m_[1][0] * z + m_[1][1]);
    }

    /// Multiplier (derivative) at a fixed point.
    double derivative(double x) const {
        const double den = m_[1][0] * x + m_[1][1];
        return det() / (den * den);
    }
    std::complex<double> derivative(std::complex<double> z) const {
        const std::complex<double> den = m_[1][0] * z + m_[1][1];
        return det() / (den * den);
    }

    /// this after inner (matrix product).
    MobiusMap compose(const MobiusMap& inner) const {
        MobiusMap out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out.m_[i][j] = m_[i][0] * inner.m_[0][j] + m_[i][1] * inner.m_[1][j];
        return out;
    }

    /// n-th iterate by squaring; entries are renormalized by the largest
    /// magnitude each step (hyperbolic multipliers grow geometrically).
    MobiusMap power(int n) const {
        MobiusMap result = identity();
        MobiusMap base = *this;
        base.normalize();
        while (n > 0) {
            if (n & 1) {
                result = result.compose(base);
                result.normalize();
            }
            base = base.compose(base);
            base.normalize();
            n >>= 1;
        }
        return result;
    }

    static MobiusMap identity() {
        MobiusMap m;
        m.m_[0][0] = m.m_[1][1] = 1.0;
        return m;
    }

    /// Projective distance to the identity (zero iff the map is a scalar
    /// multiple of it).
    double identity_defect() const {
        double scale = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) scale = std::max(scale, std::fabs(m_[i][j]));
        return std::max({std::fabs(m_[0][0] - m_[1][1]), std::fabs(m_[0][1]),
                         std::fabs(m_[1][0])}) / scale;
    }

private:
    void normalize() {
        double scale = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) scale = std::max(scale, std::fabs(m_[i][j]));
        if (scale > 0.0)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) m_[i][j] /= scale;
    }

    double m_[2][2]{{0.0, 0.0}, {0.0, 0.0}};
};

/// Reflection dynamics along the major axis: f(x) = ((a^2+c^2)x - 2ac^2) /
/// (-2ax + a^2+c^2). Hyperbolic with fixed points at the foci +-c for a
/// genuine ellipse, parabolic with fixed point 0 for a circle.
inline MobiusMap mobius_f(const ConicTable& t) {
    const double a = t.a(), c2 = t.c() * t.c();
    return {a * a + c2, -2.0 * a * c2, -2.0 * a, a * a + c2};
}

/// Reflection dynamics along the minor axis: g(y) = ((c^2-b^2)y - 2bc^2) /
/// (2by + c^2-b^2). Elliptic (no real fixed points), conjugate to a rotation
/// by 4*theta where c + i b = a e^{i theta}.
inline MobiusMap mobius_g(const ConicTable& t) {
    const double b = t.b(), c2 = t.c() * t.c();
    return {c2 - b * b, -2.0 * b * c2, 2.0 * b, c2 - b * b};
}

enum class MobiusClass { Hyperbolic, Parabolic, Elliptic };

struct FixedPointAnalysis {
    MobiusClass cls{MobiusClass::Hyperbolic};
    /// Real fixed points (two for hyperbolic, one for parabolic).
    std::vector<double> fixed_points;
    /// Multipliers at the real fixed points (same order).
    std::vector<double> multipliers;
    /// Complex fixed points for elliptic maps (conjugate pair; first has
    /// positive imaginary part).
    std::complex<double> complex_fixed_point{0.0, 0.0};
    /// Rotation angle in [0, pi] for elliptic maps (|arg| of the multiplier).
    double rotation_angle{0.0};
    /// Smallest q <= 1024 with rotation angle within 1e-9 of 2*pi*p/q, if any.
    std::optional<int> finite_order;
};

/// Fixed points, multipliers, and conjugacy class of a Möbius map. The
/// class is decided by the conjugacy invariant trace^2/det against 4.
inline FixedPointAnalysis fixed_point_analysis(const MobiusMap& m) {
    FixedPointAnalysis out;
    const double K = m.trace() * m.trace() / m.det();
    const double tolK = 1e-9;

    // Fixed points: m21 x^2 + (m22 - m11) x - m12 = 0.
    const double qa = m.entry(1, 0);
    const double qb = m.entry(1, 1) - m.entry(0, 0);
    const double qc = -m.entry(0, 1);
    const double disc = qb * qb - 4.0 * qa * qc;

    if (std::fabs(K - 4.0) <= tolK) {
        out.cls = MobiusClass::Parabolic;
        if (std::fabs(qa) > 0.0) {
            out.fixed_points = {-qb / (2.0 * qa)};
            out.multipliers = {m.derivative(out.fixed_points[0])};
        }
        return out;
    }
    if (K > 4.0) {
        out.cls = MobiusClass::Hyperbolic;
        const double sq = std::sqrt(std::max(disc, 0.0));
        const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        double x1, x2;
        if (std::fabs(qa) > 0.0) {
            x1 = q / qa;
            x2 = qc / q;
        } else {
            x1 = -qc / qb;  // affine map: second fixed point at infinity
            x2 = x1;
        }
        out.fixed_points = {x1, x2};
        out.multipliers = {m.derivative(x1), m.derivative(x2)};
        return out;
    }

    out.cls = MobiusClass::Elliptic;
    const std::complex<double> z(-qb / (2.0 * qa),
                                 std::sqrt(std::max(-disc, 0.0)) / (2.0 * std::fabs(qa)));
    out.complex_fixed_point = z;
    const std::complex<double> mult = m.derivative(z);
    out.rotation_angle = std::fabs(std::arg(mult));
    for (int q = 1; q <= 1024; ++q) {
        const double r = out.rotation_angle * q / kTwoPi;
        if (std::fabs(r - std::round(r)) < 1e-9 * q / kTwoPi) {
            out.finite_order = q;
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// On-axis cusp iteration
// ---------------------------------------------------------------------------

enum class TableAxis { Major, Minor };

/// The two on-axis cusps after n iterations of an axis Möbius map, for a
/// source at signed coordinate x0 on the axis:
///   forward  O_n  = (-1)^n     M^n(x0)   (trajectory leaving in +axis direction)
///   backward O'_n = (-1)^(n+1) M^n(-x0)  (trajectory leaving in -axis direction)
inline std::pair<AxisImage, AxisImage> axis_cusp_coords(const MobiusMap& m,
                                                        double x0, int n) {
    const MobiusMap mn = m.power(n);
    AxisImage fwd = mn.apply(x0);
    AxisImage bwd = mn.apply(-x0);
    const double sf = (n % 2 == 0) ? 1.0 : -1.0;
    fwd.value *= sf;
    bwd.value *= -sf;
    return {fwd, bwd};
}

struct AxisCuspPair {
    EnvelopePoint forward;   ///< O_n
    EnvelopePoint backward;  ///< O'_n
};

/// On-axis cusp points of the n-th caustic for a source on a coordinate
/// axis, via matrix powers of the axis Möbius map. Pole hits are genuine
/// at-infinity cusps and come back as at-infinity points, not errors.
inline AxisCuspPair iterate_axis_cusps(const ConicTable& t, double x0, int n,
                                       TableAxis axis) {
    const bool major = axis == TableAxis::Major;
    const double limit = major ? t.a() : t.b();
    if (!(std::fabs(x0) < limit))
        throw std::invalid_argument("iterate_axis_cusps: source must be inside the table");
    const Point O = major ? Point{x0, 0.0} : Point{0.0, x0};
    if (t.is_focal(O))
        throw FocusPointError("iterate_axis_cusps: source is a focus");

    const MobiusMap m = major ? mobius_f(t) : mobius_g(t);
    const auto [fwd, bwd] = axis_cusp_coords(m, x0, n);
    const double axis_angle = major ? 0.0 : kPi / 2.0;
    const Point u = major ? Point{1.0, 0.0} : Point{0.0, 1.0};

    auto place = [&](const AxisImage& im) -> EnvelopePoint {
        if (im.at_infinity) return {true, {}, axis_angle};
        return {false, u * im.value, axis_angle};
    };
    return {place(fwd), place(bwd)};
}

}  // namespace caustics
