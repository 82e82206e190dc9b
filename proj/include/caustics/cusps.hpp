#pragma once
/**
 * @file cusps.hpp
 * @brief Cusp detection on caustics, order classification, and the
 *        predicted-cusp verification (tangency points of the four special
 *        rays, on-axis mirror dynamics for the degenerate cases).
 */

#include <algorithm>
#include <iterator>
#include <limits>
#include <optional>
#include <vector>

#include "caustics/caustic.hpp"
#include "caustics/mobius.hpp"

namespace caustics {

/// H has a zero of even contact at sampling resolution (reported entry,
/// never silently dropped).
struct UnresolvedRoot {
    double s{0.0};
    double H{0.0};
};

struct Cusp {
    double s{0.0};
    EnvelopePoint location;
    /// 2 for an ordinary (semicubical) cusp; empty when the derivative
    /// tests cannot confirm it.
    std::optional<int> order;
    /// lambda of the invariant curve the generating ray is tangent to.
    double lambda_tag{0.0};
    bool predicted{false};
    double match_distance{-1.0};
};

struct CuspScan {
    std::vector<Cusp> cusps;
    std::vector<UnresolvedRoot> unresolved;
};

namespace detail {

inline double bisect_cusp_function(const LineFamilyMap& map, double lo, double hi,
                                   double flo, double width) {
    for (int it = 0; it < 80 && hi - lo > width; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = map.cusp_function_at(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Ternary search for the minimum of |H| (even-contact candidates).
inline double minimize_abs_cusp_function(const LineFamilyMap& map, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (std::fabs(map.cusp_function_at(m1)) < std::fabs(map.cusp_function_at(m2)))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

/// Intersection of the two lines at s -+ delta (Cramer on the support
/// equations). No derivatives involved: the evaluations are exact, so this
/// stays accurate where finite differences cannot resolve the family.
inline Point chord_intersection(const LineFamilyMap& map, double s, double delta) {
    const RayCoord r1 = map(s - delta), r2 = map(s + delta);
    const double s1 = std::sin(r1.alpha), c1 = std::cos(r1.alpha);
    const double s2 = std::sin(r2.alpha), c2 = std::cos(r2.alpha);
    const double det = s2 * c1 - s1 * c2;  // sin(alpha2 - alpha1)
    return {(-r1.p * c2 + r2.p * c1) / det, (r2.p * s1 - r1.p * s2) / det};
}

/// Envelope point at s via a cascade of chord intersections, picking the
/// offset where consecutive estimates stabilize. A cascade that never
/// stabilizes and runs off to large coordinates is a vertical tangent
/// (the intersections grow like 1/delta): the point is at infinity.
inline EnvelopePoint envelope_at(const LineFamilyMap& map, double s) {
    static constexpr double kDeltas[] = {1e-4, 3e-5, 1e-5, 3e-6, 1e-6,
                                         3e-7, 1e-7, 3e-8, 1e-8};
    Point best, prev = chord_intersection(map, s, kDeltas[0]);
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < std::size(kDeltas); ++k) {
        const Point cur = chord_intersection(map, s, kDeltas[k]);
        const double gap = distance(cur, prev);
        if (gap < best_gap) {
            best_gap = gap;
            best = cur;
        }
        prev = cur;
    }
    const double alpha = map(s).alpha;
    const bool unstable = best_gap > 1e-4 * (1.0 + best.norm());
    if (!std::isfinite(best.x) || !std::isfinite(best.y) || best.norm() > 1e9 ||
        (unstable && best.norm() > 1e4))
        return {true, {}, alpha};
    return {false, best, alpha};
}

/**
 * Polish a cusp parameter by minimizing the squared chord speed
 * |Gamma(s+eps) - Gamma(s-eps)|^2 of the (derivative-free) envelope. The
 * envelope point is stationary at the cusp, so the minimum sits at the cusp
 * parameter; this repairs root placement in regions where the cusp function
 * is below the finite-difference resolution (near-separatrix shear).
 */
inline double refine_cusp_parameter(const LineFamilyMap& map, double s,
                                    double radius, double period) {
    const double eps = 1e-6 * period / kTwoPi;
    auto speed2 = [&](double at) {
        const EnvelopePoint a = envelope_at(map, at - eps);
        const EnvelopePoint b = envelope_at(map, at + eps);
        if (a.at_infinity || b.at_infinity)
            return std::numeric_limits<double>::infinity();
        const Point d = b.pt - a.pt;
        return d.dot(d);
    };
    double lo = s - radius, hi = s + radius;
    if (!std::isfinite(speed2(s))) return s;  // at-infinity cusp: keep the root
    for (int it = 0; it < 90 && hi - lo > 1e-10 * period; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (speed2(m1) < speed2(m2))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

inline Cusp make_cusp(const Caustic& c, double s) {
    Cusp cusp;
    cusp.s = s;
    // Analytic jets give the envelope point exactly; the chord cascade is
    // the fallback where finite differences cannot resolve the family.
    cusp.location = c.map.analytic() ? envelope_of_jet(c.map.jet(s))
                                     : envelope_at(c.map, s);
    const RayCoord rc = c.map(s);
    if (c.table) cusp.lambda_tag = lambda_of_ray(*c.table, Ray{rc.alpha, rc.p});
    return cusp;
}

}  // namespace detail

/**
 * All sign-change roots of the cusp function H over the caustic, refined by
 * bisection (interval width 1e-12 of the period). Even-contact zeros of H
 * are returned in `unresolved` instead of being guessed at. For caustics
 * with endpoint_cusp_check (refraction), the open-arc endpoints are probed
 * as well: H vanishes exactly there when the arc ends on grazing entry.
 *
 * Throws DegeneratePencilError when H is identically zero (a pencil: every
 * point of a "line" is inflectional, the envelope is a point).
 */
inline CuspScan find_cusps(const Caustic& c) {
    const std::size_t N = c.samples.size();
    double scale = 0.0;
    for (const auto& s : c.samples) scale = std::max(scale, std::fabs(s.H));
    // Identically-zero H: the family is (numerically) a pencil.
    double coord_scale = 0.0;
    for (const auto& s : c.samples)
        coord_scale = std::max({coord_scale, std::fabs(s.jet.p), 1.0});
    if (c.n < 1 || scale <= 1e-12 * coord_scale)
        throw DegeneratePencilError("cusp function vanishes identically (pencil)");

    CuspScan scan;
    const double width = 1e-12 * c.period();
    // Grid-H values below the noise floor have unreliable signs (exact
    // zeros at symmetric samples, finite-difference roundoff).
    const double noise_tol = 1e-9 * scale;
    std::vector<double> roots;

    // Bracket verification and refinement against the map: probe the
    // bracket for actual sign changes before bisecting. An under-resolved
    // sampling step can fabricate sign changes (rejected here) and one
    // cell can hold a pair of genuine crossings (both found here).
    auto probe_bisect = [&](double lo, double hi) -> int {
        constexpr int kProbes = 8;
        int found = 0;
        double sa = lo, ha = c.map.cusp_function_at(sa);
        for (int q = 1; q <= kProbes; ++q) {
            const double sb = lo + (hi - lo) * q / kProbes;
            const double hb = c.map.cusp_function_at(sb);
            if (hb == 0.0 && q < kProbes) {
                roots.push_back(sb);
                ++found;
            } else if (ha != 0.0 && hb != 0.0 && (ha > 0.0) != (hb > 0.0)) {
                roots.push_back(detail::bisect_cusp_function(c.map, sa, sb, ha, width));
                ++found;
            }
            sa = sb;
            ha = hb;
        }
        return found;
    };

    // A root is kept only if its sign change survives at step-stable H
    // values just outside the root's placement window. Finite differencing
    // across near-separatrix shear can fabricate a large, clean-looking
    // swing of H that vanishes under step refinement; the descent stops at
    // the first step where halving leaves both values in place.
    auto confirm_root = [&](double r) -> bool {
        if (c.map.analytic()) return true;
        const double rho = 2.5e-4 * c.period() / kTwoPi;
        double lo = r - rho, hi = r + rho;
        if (!c.closed) {
            lo = std::max(lo, c.samples.front().s);
            hi = std::min(hi, c.samples.back().s);
        }
        for (double h = c.map.fd_step(); h > 1e-9; h /= 10.0) {
            const LineFamilyMap coarse = c.map.with_fd_step(h);
            const LineFamilyMap fine = c.map.with_fd_step(0.5 * h);
            const double a1 = coarse.cusp_function_at(lo), a2 = fine.cusp_function_at(lo);
            const double b1 = coarse.cusp_function_at(hi), b2 = fine.cusp_function_at(hi);
            const bool stable =
                std::fabs(a1 - a2) <= 0.3 * std::max(std::fabs(a1), std::fabs(a2)) &&
                std::fabs(b1 - b2) <= 0.3 * std::max(std::fabs(b1), std::fabs(b2));
            if (stable) return (a2 > 0.0) != (b2 > 0.0);
        }
        return true;  // never step-stable: keep the root rather than guess
    };

    auto sample_s = [&](std::size_t i, std::size_t wrapped) {
        // s of sample `wrapped`, continued past the seam when the scan
        // wrapped around a closed family.
        return c.samples[wrapped].s + (wrapped < i ? c.period() : 0.0);
    };

    const std::size_t pairs = c.closed ? N : N - 1;
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t k = (i + 1) % N;
        const double h0 = c.samples[i].H, h1 = c.samples[k].H;
        if (std::fabs(h0) <= noise_tol) continue;  // runs handled below
        if (std::fabs(h1) <= noise_tol) continue;
        if ((h0 > 0.0) != (h1 > 0.0)) {
            const double s0 = c.samples[i].s, s1 = sample_s(i, k);
            if (probe_bisect(s0, s1) == 0) {
                // Grid truncation can mis-sign a sample close to a root,
                // shifting the observed change one cell over. Retry on a
                // window extended by one cell each way (the final dedup
                // pass absorbs any overlap with neighboring brackets).
                const double cell = s1 - s0;
                double lo = s0 - cell, hi = s1 + cell;
                if (!c.closed) {
                    lo = std::max(lo, c.samples.front().s);
                    hi = std::min(hi, c.samples.back().s);
                }
                probe_bisect(lo, hi);
            }
            continue;
        }
        // Even-contact candidate: local dip of |H| below tolerance without
        // a sign change.
        if (c.closed || i + 2 < N) {
            const std::size_t k2 = (i + 2) % N;
            const double h2 = c.samples[k2].H;
            const bool local_min =
                (std::fabs(h1) <= std::fabs(h0) && std::fabs(h1) < std::fabs(h2)) ||
                (std::fabs(h1) < std::fabs(h0) && std::fabs(h1) <= std::fabs(h2));
            if ((h2 > 0.0) == (h0 > 0.0) && local_min && std::fabs(h1) < 1e-6 * scale) {
                const double smin = detail::minimize_abs_cusp_function(
                    c.map, c.samples[i].s, sample_s(i, k2));
                const double hmin = c.map.cusp_function_at(smin);
                if (std::fabs(hmin) < 1e-9 * scale) scan.unresolved.push_back({smin, hmin});
            }
        }
    }

    // Maximal runs of below-noise samples: bracketed by the nearest
    // reliable neighbors. A sign change across the run is a root (refined
    // in the bracket); matching signs are an even-contact zero, reported
    // as unresolved.
    for (std::size_t i = 0; i < N; ++i) {
        if (std::fabs(c.samples[i].H) <= noise_tol) continue;
        std::size_t j = i + 1;
        const std::size_t jmax = c.closed ? i + N : N;
        while (j < jmax && std::fabs(c.samples[j % N].H) <= noise_tol) ++j;
        if (j == i + 1) continue;  // no run after sample i
        if (j >= jmax) break;  // run reaches the open end (or is everything)
        const std::size_t right = j % N;
        const double hL = c.samples[i].H, hR = c.samples[right].H;
        const double sL = c.samples[i].s, sR = sample_s(i, right);
        if ((hL > 0.0) != (hR > 0.0)) {
            probe_bisect(sL, sR);
        } else {
            const double smin = detail::minimize_abs_cusp_function(c.map, sL, sR);
            scan.unresolved.push_back({smin, c.map.cusp_function_at(smin)});
        }
    }

    if (c.endpoint_cusp_check) {
        for (const double s : {c.s_begin, c.s_end}) {
            const double h = c.map.cusp_function_at(s);
            if (std::fabs(h) < 1e-9 * scale) roots.push_back(s);
        }
    }

    // Normalize into one period, dedup, and materialize. Besides exact
    // s-duplicates, nearby roots with the same envelope point are merged:
    // where the sampling step cannot resolve the family, the sign pattern
    // of H can split one crossing into a small cluster, all of which land
    // on the same cusp.
    std::sort(roots.begin(), roots.end());
    const double s_dedup = 1e-8 * c.period();
    const double cluster = 1e-3 * c.period();
    const double polish_radius = 5e-4 * c.period() / kTwoPi;
    for (double r : roots) {
        if (c.closed && r >= c.s_begin + c.period()) r -= c.period();
        if (!confirm_root(r)) {
            scan.unresolved.push_back({r, c.map.cusp_function_at(r)});
            continue;
        }
        if (!c.map.analytic())
            r = detail::refine_cusp_parameter(c.map, r, polish_radius, c.period());
        Cusp cand = detail::make_cusp(c, r);
        bool dup = false;
        for (const Cusp& have : scan.cusps) {
            double ds = std::fabs(have.s - r);
            if (c.closed) ds = std::min(ds, std::fabs(ds - c.period()));
            if (ds < s_dedup) {
                dup = true;
                break;
            }
            if (ds < cluster && have.location.at_infinity == cand.location.at_infinity) {
                const double gap =
                    have.location.at_infinity
                        ? 0.0
                        : distance(have.location.pt, cand.location.pt);
                const double loc_scale =
                    1.0 + (cand.location.at_infinity ? 0.0 : cand.location.pt.norm());
                if (gap < 2e-6 * loc_scale) {
                    dup = true;
                    break;
                }
            }
        }
        if (!dup) scan.cusps.push_back(std::move(cand));
    }

    std::sort(scan.cusps.begin(), scan.cusps.end(),
              [](const Cusp& a, const Cusp& b) { return a.s < b.s; });
    return scan;
}

// ---------------------------------------------------------------------------
// Order classification
// ---------------------------------------------------------------------------

namespace detail {

struct Derivs3 {
    Point d1, d2, d3;
    Point value;
    /// Residual error estimates from the step-halving pair, per derivative.
    double err1{0.0}, err2{0.0}, err3{0.0};
};

/// First three derivatives of the envelope curve at s0: 5-point stencils at
/// step h with one Richardson halving. The difference between the two step
/// sizes doubles as an error estimate for the extrapolated values.
inline Derivs3 envelope_derivatives(const LineFamilyMap& map, double s0, double h) {
    auto gamma = [&](double s) -> Point {
        const FamilyJet j = map.jet(s);
        return envelope_point(j.alpha, j.p, j.p_s / j.alpha_s);
    };
    auto stencil = [&](double step) -> Derivs3 {
        const Point m2 = gamma(s0 - 2.0 * step), m1 = gamma(s0 - step);
        const Point c0 = gamma(s0);
        const Point p1 = gamma(s0 + step), p2 = gamma(s0 + 2.0 * step);
        Derivs3 d;
        d.value = c0;
        d.d1 = (m2 - m1 * 8.0 + p1 * 8.0 - p2) * (1.0 / (12.0 * step));
        d.d2 = (m2 * -1.0 + m1 * 16.0 - c0 * 30.0 + p1 * 16.0 - p2) *
               (1.0 / (12.0 * step * step));
        d.d3 = (m2 * -1.0 + m1 * 2.0 - p1 * 2.0 + p2) *
               (1.0 / (2.0 * step * step * step));
        return d;
    };
    const Derivs3 a = stencil(h), b = stencil(0.5 * h);
    Derivs3 out;
    out.value = a.value;
    out.d1 = (b.d1 * 16.0 - a.d1) * (1.0 / 15.0);  // both stencils are 4th order
    out.d2 = (b.d2 * 16.0 - a.d2) * (1.0 / 15.0);
    out.d3 = (b.d3 * 4.0 - a.d3) * (1.0 / 3.0);    // 2nd-order stencil
    out.err1 = (a.d1 - b.d1).norm() / 15.0;
    out.err2 = (a.d2 - b.d2).norm() / 15.0;
    out.err3 = (a.d3 - b.d3).norm() / 3.0;
    return out;
}

/// Third s-derivative of alpha along the family (vertical-tangent chart).
inline std::pair<double, double> alpha_sss_estimate(const LineFamilyMap& map,
                                                    double s0, double h) {
    auto stencil = [&](double step) {
        const double m2 = map(s0 - 2.0 * step).alpha, m1 = map(s0 - step).alpha;
        const double p1 = map(s0 + step).alpha, p2 = map(s0 + 2.0 * step).alpha;
        return (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * step * step * step);
    };
    const double a = stencil(h), b = stencil(0.5 * h);
    return {(4.0 * b - a) / 3.0, std::fabs(b - a)};
}

}  // namespace detail

/**
 * Order classification of a located cusp. Finite cusps use the semicubical
 * normal-form criterion on the envelope derivatives: Gamma' vanishes,
 * Gamma'' does not, and det(Gamma'', Gamma''') does not. Cusps at infinity
 * (vertical tangent of the family curve) are classified in the alpha(p)
 * chart instead: there the cusp is ordinary iff d^3 alpha/dp^3 != 0, which
 * at a point with alpha_s = alpha_ss = 0 reduces to alpha_sss != 0.
 *
 * Returns 2 for an ordinary cusp, std::nullopt when the tests cannot
 * confirm it (never throws: unresolved is a value).
 */
inline std::optional<int> classify_cusp(const Caustic& c, const Cusp& cusp,
                                        double rel_tol = 1e-6) {
    const double h = 1e-4 * c.period();

    if (cusp.location.at_infinity) {
        const FamilyJet j = c.map.jet(cusp.s);
        if (std::fabs(j.p_s) < 1e-9) return std::nullopt;
        const auto [a3, err] = detail::alpha_sss_estimate(c.map, cusp.s, h);
        if (std::fabs(a3) > std::max(100.0 * err, 1e-9 * (1.0 + std::fabs(j.p_s))))
            return 2;
        return std::nullopt;
    }

    const auto d = detail::envelope_derivatives(c.map, cusp.s, h);
    const double g1 = d.d1.norm(), g2 = d.d2.norm(), g3 = d.d3.norm();
    const double noise = (c.map.analytic() ? 1e-14 : 1e-11) * (1.0 + d.value.norm());

    // A value counts as nonzero only when it clears both the relative
    // threshold and its own finite-difference error estimate.
    const bool stationary = g1 <= rel_tol * g2 * h + 5.0 * d.err1 + 3.0 * noise / h;
    const bool second_nonzero =
        g2 > std::max(50.0 * d.err2, rel_tol * (g3 * h + g1 / h));
    const bool semicubical = std::fabs(d.d2.cross(d.d3)) >
                             rel_tol * g2 * g3 + 5.0 * (d.err2 * g3 + d.err3 * g2);
    if (stationary && second_nonzero && semicubical) return 2;
    return std::nullopt;
}

/// find_cusps + classification in one pass.
inline CuspScan find_classified_cusps(const Caustic& c) {
    CuspScan scan = find_cusps(c);
    for (Cusp& cusp : scan.cusps) cusp.order = classify_cusp(c, cusp);
    return scan;
}

// ---------------------------------------------------------------------------
// Predicted cusps (tangency points of the four special rays)
// ---------------------------------------------------------------------------

struct PredictedCusp {
    Ray source_ray;          ///< ray of the pencil through O (before reflection)
    Ray final_ray;           ///< the same ray after n reflections
    EnvelopePoint location;  ///< tangency point with the confocal conic
    ConfocalConic conic;     ///< the invariant conic it is tangent to
};

namespace detail {

/// Predicted on-axis cusp pair via the mirror-equation Möbius dynamics,
/// along an axis through the center at the given angle (a coordinate axis,
/// or the line through source and center for a circle).
inline std::pair<EnvelopePoint, EnvelopePoint> axis_predictions(
    const ConicTable& t, const Point& O, int n, double axis_angle) {
    const Point u{std::cos(axis_angle), std::sin(axis_angle)};
    const double coord = O.dot(u);
    const bool minor = !t.is_circle() && std::fabs(std::sin(axis_angle)) > 0.5;
    const MobiusMap m = minor ? mobius_g(t) : mobius_f(t);
    const auto [fwd, bwd] = axis_cusp_coords(m, coord, n);
    auto place = [&](const AxisImage& im) -> EnvelopePoint {
        if (im.at_infinity) return {true, {}, axis_angle};
        return {false, u * im.value, axis_angle};
    };
    return {place(fwd), place(bwd)};
}

}  // namespace detail

/**
 * The four predicted cusps of the n-th caustic from O: each tangent ray at
 * O is reflected n times and its tangency point with the confocal conic is
 * the cusp. Degenerate (axis) conics take their on-axis cusps from the
 * mirror-equation dynamics instead. Throws FocusPointError for focal O.
 */
inline std::array<PredictedCusp, 4> predicted_cusps(const ConicTable& t,
                                                    const Point& O, int n) {
    const ConfocalPair pair = confocal_through(t, O);
    std::array<PredictedCusp, 4> out;
    int idx = 0;
    for (const ConfocalConic& conic : {pair.ellipse, pair.hyperbola}) {
        const auto rays = detail::tangent_ray_pair(t, O, conic);
        if (conic.degenerate()) {
            const auto [fwd, bwd] = detail::axis_predictions(t, O, n, conic.axis_angle);
            out[idx++] = {rays[0], reflect_n(t, rays[0], n), fwd, conic};
            out[idx++] = {rays[1], reflect_n(t, rays[1], n), bwd, conic};
        } else {
            for (const Ray& r : rays) {
                const Ray fin = reflect_n(t, r, n);
                out[idx++] = {r, fin, {false, tangency_point(t, fin, conic.lambda), fin.alpha},
                              conic};
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verification (predicted vs. detected)
// ---------------------------------------------------------------------------

struct CuspMatch {
    int predicted_index{-1};
    int detected_index{-1};
    double distance{-1.0};
};

struct PredictionReport {
    std::array<PredictedCusp, 4> predicted;
    CuspScan detected;
    std::vector<CuspMatch> matches;  ///< one entry per prediction
    bool pass{false};
    double tolerance{0.0};
};

namespace detail {

/// Distance between cusp locations; at-infinity points compare by line
/// direction mod pi (scaled to length units by the table size), mixed
/// finite/infinite pairs never match.
inline double location_distance(const EnvelopePoint& a, const EnvelopePoint& b,
                                double length_scale) {
    if (a.at_infinity != b.at_infinity) return std::numeric_limits<double>::infinity();
    if (!a.at_infinity) return distance(a.pt, b.pt);
    double d = std::fabs(a.direction - b.direction);
    d = std::fmod(d, kPi);
    d = std::min(d, kPi - d);
    return d * length_scale;
}

}  // namespace detail

/**
 * Runs the caustic, detects cusps, and matches each of the four predicted
 * cusps to a detected one (nearest neighbor under mutual uniqueness; ties
 * by smaller distance then smaller s). Pass iff all four match within tol.
 * Extra detected cusps are reported, never judged: count exactness for a
 * non-circular table is an open question.
 */
inline PredictionReport verify_predicted_cusps(const ConicTable& t, const Point& O, int n,
                                     double tol = -1.0, int samples = 4096) {
    if (tol <= 0.0) tol = 1e-5 * t.a();
    PredictionReport rep;
    rep.tolerance = tol;
    rep.predicted = predicted_cusps(t, O, n);

    const Caustic c = caustic(t, O, n, samples);
    rep.detected = find_classified_cusps(c);

    struct Cand {
        double d;
        int pi, di;
    };
    std::vector<Cand> cands;
    for (int pi = 0; pi < 4; ++pi)
        for (int di = 0; di < static_cast<int>(rep.detected.cusps.size()); ++di) {
            const double d = detail::location_distance(
                rep.predicted[pi].location, rep.detected.cusps[di].location, t.a());
            if (d <= tol) cands.push_back({d, pi, di});
        }
    std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        return rep.detected.cusps[a.di].s < rep.detected.cusps[b.di].s;
    });

    rep.matches.assign(4, CuspMatch{});
    std::vector<bool> used(rep.detected.cusps.size(), false);
    for (const Cand& cand : cands) {
        if (rep.matches[cand.pi].detected_index >= 0 || used[cand.di]) continue;
        rep.matches[cand.pi] = {cand.pi, cand.di, cand.d};
        used[cand.di] = true;
        auto& det = rep.detected.cusps[cand.di];
        det.predicted = true;
        det.match_distance = cand.d;
    }
    rep.pass = std::all_of(rep.matches.begin(), rep.matches.end(),
                           [](const CuspMatch& m) { return m.detected_index >= 0; });
    return rep;
}

/// Exact structure for the circle: the n-th caustic from an
/// interior non-central source has exactly 4 cusps, two on the line through
/// the source and the center, two on the concentric circle through the
/// source, and all four ordinary.
struct CircleCuspReport {
    CuspScan scan;
    int count{0};
    int on_center_line{0};
    int on_concentric_circle{0};
    int ordinary{0};
    bool pass{false};
};

inline CircleCuspReport verify_circle_cusps(double radius, const Point& O, int n,
                                            int samples = 4096,
                                            double axis_tol = 1e-6,
                                            double radial_tol = 1e-5) {
    const ConicTable t(radius, radius);
    const Caustic c = caustic(t, O, n, samples);
    CircleCuspReport rep;
    rep.scan = find_classified_cusps(c);
    rep.count = static_cast<int>(rep.scan.cusps.size());

    const double r0 = O.norm();
    const double line_angle = std::atan2(O.y, O.x);
    for (Cusp& cusp : rep.scan.cusps) {
        if (cusp.order == 2) ++rep.ordinary;
        if (cusp.location.at_infinity) {
            double d = std::fabs(cusp.location.direction - line_angle);
            d = std::fmod(d, kPi);
            d = std::min(d, kPi - d);
            if (d < axis_tol) ++rep.on_center_line;
        } else {
            const Point& p = cusp.location.pt;
            const double off_line = std::fabs(p.x * std::sin(line_angle) -
                                              p.y * std::cos(line_angle));
            if (off_line < axis_tol * radius)
                ++rep.on_center_line;
            else if (std::fabs(p.norm() - r0) < radial_tol * radius)
                ++rep.on_concentric_circle;
        }
    }
    rep.pass = rep.count == 4 && rep.on_center_line == 2 &&
               rep.on_concentric_circle == 2 && rep.ordinary == 4;
    return rep;
}

}  // namespace caustics
