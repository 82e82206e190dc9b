#pragma once
/**
 * @file geometry.hpp
 * @brief Rays in (alpha, p) line coordinates, conic billiard tables, the
 *        billiard reflection map, and the confocal family.
 *
 * A ray is an oriented line with direction (cos alpha, sin alpha) and signed
 * distance p from the origin: (x, y) lies on it iff x sin(alpha) - y cos(alpha) = p.
 * alpha is kept unwrapped (real-valued) so that finite differences along
 * 1-parameter families never see 2*pi jumps.
 */

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace caustics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

struct Point {
    double x{0.0};
    double y{0.0};

    constexpr Point() = default;
    constexpr Point(double X, double Y) : x(X), y(Y) {}

    constexpr Point operator+(const Point& r) const { return {x + r.x, y + r.y}; }
    constexpr Point operator-(const Point& r) const { return {x - r.x, y - r.y}; }
    constexpr Point operator*(double s) const { return {x * s, y * s}; }
    constexpr double dot(const Point& r) const { return x * r.x + y * r.y; }
    constexpr double cross(const Point& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

/// Oriented line: direction angle alpha (radians, unwrapped) and signed
/// distance p from the origin.
struct Ray {
    double alpha{0.0};
    double p{0.0};

    constexpr Ray() = default;
    constexpr Ray(double a, double dist) : alpha(a), p(dist) {}

    Point direction() const { return {std::cos(alpha), std::sin(alpha)}; }

    /// Closest point of the line to the origin.
    Point foot() const { return {p * std::sin(alpha), -p * std::cos(alpha)}; }

    /// Signed incidence residual of q against the line equation.
    double incidence(const Point& q) const {
        return q.x * std::sin(alpha) - q.y * std::cos(alpha) - p;
    }

    /// Same line, opposite orientation: R(alpha, p) = (alpha + pi, -p).
    Ray reversed() const { return {alpha + kPi, -p}; }
};

/// Ray through a point in a given direction.
inline Ray ray_through(const Point& q, double alpha) {
    return {alpha, q.x * std::sin(alpha) - q.y * std::cos(alpha)};
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// The line misses the open interior of the table.
struct NoIntersectionError : GeometryError {
    using GeometryError::GeometryError;
};
/// The line grazes the boundary (intersection discriminant below tolerance).
struct TangentialError : GeometryError {
    using GeometryError::GeometryError;
};
/// Source point coincides with a focus; the caustic degenerates.
struct FocusPointError : GeometryError {
    using GeometryError::GeometryError;
};
/// Ray is not tangent to the requested confocal conic.
struct NotTangentError : GeometryError {
    using GeometryError::GeometryError;
};

// ---------------------------------------------------------------------------
// Tables and the confocal family
// ---------------------------------------------------------------------------

/// Elliptic billiard table x^2/a^2 + y^2/b^2 = 1 with 0 < b <= a.
/// A circle is the case a = b.
class ConicTable {
public:
    ConicTable(double semi_major, double semi_minor)
        : a_(semi_major), b_(semi_minor) {
        if (!(b_ > 0.0) || !(a_ >= b_))
            throw std::invalid_argument("ConicTable requires 0 < b <= a");
        c_ = std::sqrt(std::max(0.0, a_ * a_ - b_ * b_));
    }

    double a() const { return a_; }
    double b() const { return b_; }
    /// Focal distance sqrt(a^2 - b^2) (zero for a circle).
    double c() const { return c_; }
    bool is_circle() const { return c_ <= 1e-14 * a_; }

    bool contains(const Point& q) const {
        return (q.x * q.x) / (a_ * a_) + (q.y * q.y) / (b_ * b_) < 1.0;
    }

    /// Tolerance below which a point counts as focal (the caustic from a
    /// focus degenerates to a point).
    double focus_tolerance() const { return 1e-8 * a_; }

    bool is_focal(const Point& q) const {
        const double tol = focus_tolerance();
        return distance(q, {c_, 0.0}) < tol || distance(q, {-c_, 0.0}) < tol;
    }

private:
    double a_, b_, c_;
};

enum class ConicKind {
    Ellipse,      ///< lambda < b^2
    Hyperbola,    ///< b^2 < lambda < a^2
    FociSegment,  ///< lambda = b^2, segment of the major axis between the foci
    AxisLine      ///< degenerate hyperbola: a coordinate axis (or the line
                  ///< through source and center for a circle)
};

/// One member C_lambda: x^2/(a^2-lambda) + y^2/(b^2-lambda) = 1 of the
/// confocal family, or one of its degenerations.
struct ConfocalConic {
    double lambda{0.0};
    ConicKind kind{ConicKind::Ellipse};
    /// Direction of the axis for FociSegment/AxisLine degenerations.
    double axis_angle{0.0};

    bool degenerate() const {
        return kind == ConicKind::FociSegment || kind == ConicKind::AxisLine;
    }
};

/// The confocal ellipse and hyperbola (possibly degenerate) through a point.
struct ConfocalPair {
    ConfocalConic ellipse;
    ConfocalConic hyperbola;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The billiard invariant lambda = (a sin alpha)^2 + (b cos alpha)^2 - p^2.
/// Constant along orbits; identifies the confocal conic all segments touch.
inline double lambda_of_ray(const ConicTable& t, const Ray& r) {
    const double sa = t.a() * std::sin(r.alpha);
    const double cb = t.b() * std::cos(r.alpha);
    return sa * sa + cb * cb - r.p * r.p;
}

namespace detail {

/// Coefficients of the intersection quadratic A t^2 + B t + C = 0 along
/// foot + t * direction against x^2/A2 + y^2/B2 = 1.
struct ConicLineQuadratic {
    double A, B, C;
    double discriminant() const { return B * B - 4.0 * A * C; }
};

inline ConicLineQuadratic intersect_quadratic(double A2, double B2, const Ray& r) {
    const Point f = r.foot();
    const double cx = std::cos(r.alpha), sy = std::sin(r.alpha);
    return {cx * cx / A2 + sy * sy / B2,
            2.0 * (f.x * cx / A2 + f.y * sy / B2),
            f.x * f.x / A2 + f.y * f.y / B2 - 1.0};
}

}  // namespace detail

namespace detail {

/// General geometric reflection path (works for circles too; reflect()
/// dispatches circles to the closed form instead).
inline Ray reflect_general(const ConicTable& t, const Ray& r) {
    const auto q2 = detail::intersect_quadratic(t.a() * t.a(), t.b() * t.b(), r);
    const double disc = q2.discriminant();
    // Normalized discriminant (half-chord squared) in length^2 units.
    const double chord2 = disc / (4.0 * q2.A * q2.A);
    if (disc < 0.0)
        throw NoIntersectionError("ray misses the table");
    if (chord2 < 1e-12 * t.a() * t.a())
        throw TangentialError("ray grazes the boundary");

    // Larger root = exit point in the travel direction; stable evaluation.
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (q2.B + (q2.B >= 0.0 ? sq : -sq));
    const double t1 = qq / q2.A, t2 = q2.C / qq;
    const double tstar = std::max(t1, t2);

    const Point d{std::cos(r.alpha), std::sin(r.alpha)};
    const Point hit = r.foot() + d * tstar;

    // Outward normal from the conic gradient, oriented tangent = rot90(normal).
    Point n{hit.x / (t.a() * t.a()), hit.y / (t.b() * t.b())};
    const double nn = n.norm();
    n = {n.x / nn, n.y / nn};
    const Point tang{-n.y, n.x};

    const double theta = std::atan2(d.dot(n), d.dot(tang));  // in (0, pi)
    const double alpha_out = r.alpha + 2.0 * theta;
    return {alpha_out, hit.x * std::sin(alpha_out) - hit.y * std::cos(alpha_out)};
}

}  // namespace detail

/**
 * One billiard reflection off the table.
 *
 * Circle (a = b = R): closed form T(alpha, p) = (alpha + 2 arccos(p/R), p).
 * Ellipse: forward intersection point q (larger parameter root along the
 * ray), reflect the direction about the tangent at q. The outgoing angle is
 * alpha + 2*theta with theta in (0, pi) the incidence angle against the
 * oriented tangent, which keeps alpha continuous (unwrapped) in the input
 * and agrees with the circle closed form when a = b.
 *
 * Throws NoIntersectionError / TangentialError.
 */
inline Ray reflect(const ConicTable& t, const Ray& r) {
    if (t.is_circle()) {
        const double R = t.a();
        if (!(std::fabs(r.p) < R))
            throw NoIntersectionError("ray misses the circle interior (|p| >= R)");
        return {r.alpha + 2.0 * std::acos(r.p / R), r.p};
    }
    return detail::reflect_general(t, r);
}

/// n-fold composition of reflect. Errors are rethrown with the failing step.
inline Ray reflect_n(const ConicTable& t, Ray r, int n) {
    for (int k = 0; k < n; ++k) {
        try {
            r = reflect(t, r);
        } catch (const GeometryError& e) {
            throw NoIntersectionError("reflect_n failed at step " +
                                      std::to_string(k + 1) + ": " + e.what());
        }
    }
    return r;
}

/**
 * The confocal ellipse and hyperbola through a point (roots of
 * (a^2-l)(b^2-l) - x0^2 (b^2-l) - y0^2 (a^2-l) = 0), with the axis
 * degenerations resolved:
 *   - y0 = 0, |x0| < c : ellipse slot degenerates to the foci segment (l = b^2);
 *   - y0 = 0, |x0| > c : hyperbola slot degenerates to the major axis (l = b^2);
 *   - x0 = 0           : hyperbola slot degenerates to the minor axis (l = a^2);
 *   - circle           : hyperbola slot is the line through the point and the
 *                        center (l = R^2).
 *
 * Valid for exterior points as well (the ellipse root then has lambda < 0).
 * Throws FocusPointError within focus tolerance of a focus.
 */
inline ConfocalPair confocal_through(const ConicTable& t, const Point& O) {
    if (t.is_focal(O))
        throw FocusPointError("confocal conics through a focus are degenerate");

    const double a2 = t.a() * t.a(), b2 = t.b() * t.b(), c = t.c();
    const double x0 = O.x, y0 = O.y;
    const double axis_tol = t.focus_tolerance();

    if (t.is_circle()) {
        // Concentric circle through O + the line through O and the center.
        const double r0 = O.norm();
        ConfocalPair out;
        out.ellipse = {b2 - r0 * r0, ConicKind::Ellipse, 0.0};
        out.hyperbola = {b2, ConicKind::AxisLine, std::atan2(y0, x0)};
        return out;
    }

    if (std::fabs(y0) < axis_tol) {
        const double l = a2 - x0 * x0;
        ConfocalPair out;
        if (std::fabs(x0) < c) {  // between the foci (includes the center)
            out.ellipse = {b2, ConicKind::FociSegment, 0.0};
            if (std::fabs(x0) < axis_tol)  // center: minor axis plays H
                out.hyperbola = {a2, ConicKind::AxisLine, kPi / 2.0};
            else
                out.hyperbola = {l, ConicKind::Hyperbola, 0.0};
        } else {
            out.ellipse = {l, ConicKind::Ellipse, 0.0};
            out.hyperbola = {b2, ConicKind::AxisLine, 0.0};
        }
        return out;
    }
    if (std::fabs(x0) < axis_tol) {
        ConfocalPair out;
        out.ellipse = {b2 - y0 * y0, ConicKind::Ellipse, 0.0};
        out.hyperbola = {a2, ConicKind::AxisLine, kPi / 2.0};
        return out;
    }

    // Generic point: stable quadratic l^2 - S l + P = 0.
    const double S = a2 + b2 - x0 * x0 - y0 * y0;
    const double P = a2 * b2 - b2 * x0 * x0 - a2 * y0 * y0;
    const double disc = S * S - 4.0 * P;
    const double sq = std::sqrt(std::max(0.0, disc));
    const double qq = -0.5 * (-S + (S <= 0.0 ? sq : -sq));  // of l^2 - S l + P
    const double r1 = qq, r2 = P / qq;
    const double le = std::min(r1, r2), lh = std::max(r1, r2);

    ConfocalPair out;
    out.ellipse = {le, ConicKind::Ellipse, 0.0};
    out.hyperbola = {lh, ConicKind::Hyperbola, 0.0};
    return out;
}

namespace detail {

/// The two oppositely oriented rays through O tangent to one confocal conic.
inline std::array<Ray, 2> tangent_ray_pair(const ConicTable& t, const Point& O,
                                           const ConfocalConic& conic) {
    double tau;
    if (conic.degenerate()) {
        tau = conic.axis_angle;
    } else {
        // Tangent direction = rot90 of the conic gradient at O.
        const double gx = O.x / (t.a() * t.a() - conic.lambda);
        const double gy = O.y / (t.b() * t.b() - conic.lambda);
        tau = std::atan2(gx, -gy);
    }
    return {ray_through(O, tau), ray_through(O, tau + kPi)};
}

}  // namespace detail

/// The four rays emanating from O tangent to the confocal ellipse and
/// hyperbola through O (two each); degenerate conics contribute the rays
/// along the corresponding axis. Order: [E+, E-, H+, H-].
inline std::array<Ray, 4> tangent_rays_at(const ConicTable& t, const Point& O) {
    const ConfocalPair pair = confocal_through(t, O);
    const auto e = detail::tangent_ray_pair(t, O, pair.ellipse);
    const auto h = detail::tangent_ray_pair(t, O, pair.hyperbola);
    return {e[0], e[1], h[0], h[1]};
}

/**
 * Point where a ray touches the confocal conic C_lambda it is tangent to
 * (the double root of the ray-conic intersection quadratic).
 * Throws NotTangentError if the ray is not tangent to C_lambda.
 */
inline Point tangency_point(const ConicTable& t, const Ray& r, double lambda) {
    const double lam_ray = lambda_of_ray(t, r);
    if (std::fabs(lam_ray - lambda) > 1e-6 * std::max(1.0, t.a() * t.a()))
        throw NotTangentError("lambda mismatch: ray is not tangent to C_lambda");
    // Work against the ray's own invariant conic: the requested lambda can
    // carry the transport drift of a long reflection chain, which a nearly
    // degenerate conic (lambda close to a^2) amplifies beyond the
    // discriminant tolerance.
    const double A2 = t.a() * t.a() - lam_ray;
    const double B2 = t.b() * t.b() - lam_ray;

    const auto q2 = detail::intersect_quadratic(A2, B2, r);
    if (std::fabs(q2.A) < 1e-14)
        throw NotTangentError("ray parallel to an asymptote of C_lambda");
    // Tangency: the discriminant vanishes up to roundoff. A^2 a^2 is the
    // natural scale (disc/4A^2 is the half-chord squared); B^2 + 4|AC|
    // covers cancellation near an asymptote; and the lambda-sensitivity of
    // the discriminant bounds the effect of the ray's own coordinate
    // roundoff, which a nearly degenerate conic amplifies by 1/(a^2-lambda)^2.
    const double disc = q2.discriminant();
    const Point f = r.foot();
    const double ca = std::cos(r.alpha), sa = std::sin(r.alpha);
    const double dA = ca * ca / (A2 * A2) + sa * sa / (B2 * B2);
    const double dB = 2.0 * (f.x * ca / (A2 * A2) + f.y * sa / (B2 * B2));
    const double dC = f.x * f.x / (A2 * A2) + f.y * f.y / (B2 * B2);
    const double disc_dlambda =
        2.0 * q2.B * dB - 4.0 * (q2.A * dC + q2.C * dA);
    const double scale = 1e-9 * (q2.A * q2.A * t.a() * t.a() + q2.B * q2.B +
                                 4.0 * std::fabs(q2.A * q2.C)) +
                         1e-11 * std::max(1.0, t.a() * t.a()) * std::fabs(disc_dlambda);
    if (std::fabs(disc) > scale)
        throw NotTangentError("intersection is transversal, not tangent");

    const double tstar = -q2.B / (2.0 * q2.A);
    return r.foot() + r.direction() * tstar;
}

}  // namespace caustics
