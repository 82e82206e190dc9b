#pragma once
/**
 * @file caustic.hpp
 * @brief Envelopes (caustics) of ray families: sampling, the cusp function,
 *        points at infinity, and external-source pencils.
 */

#include <optional>
#include <vector>

#include "caustics/family.hpp"
#include "caustics/geometry.hpp"

namespace caustics {

/// Source point coincides with a focus: the caustic degenerates to a point.
struct DegenerateSourceError : GeometryError {
    using GeometryError::GeometryError;
};
/// A pencil (n = 0) has cusp function identically zero; cusps are undefined.
struct DegeneratePencilError : GeometryError {
    using GeometryError::GeometryError;
};
/// external_pencil requires an exterior source.
struct InsidePointError : GeometryError {
    using GeometryError::GeometryError;
};
/// alpha_s touches zero without changing sign at sampling resolution.
struct UnresolvedCrossingError : GeometryError {
    using GeometryError::GeometryError;
};

struct CausticSample {
    double s{0.0};
    FamilyJet jet;
    double H{0.0};  ///< cusp function value
    EnvelopePoint gamma;
};

/// The n-th caustic by reflection: sampled envelope points, cusp-function
/// samples, and vertical-tangent (infinity) bookkeeping.
struct Caustic {
    Point source;
    int n{1};
    bool closed{true};
    double s_begin{0.0};
    double s_end{kTwoPi};
    std::vector<CausticSample> samples;
    int infinity_count{0};
    /// Refined parameters of the resolved sign changes of alpha_s (the
    /// vertical tangents of the family curve, where the caustic escapes to
    /// infinity).
    std::vector<double> infinity_parameters;
    /// Parameters where alpha_s touches zero without a sign change.
    std::vector<double> unresolved_crossings;
    LineFamilyMap map;
    std::optional<ConicTable> table;
    /// Check the open-arc endpoints for cusps (refraction families, where
    /// the cusp function vanishes exactly at the arc ends).
    bool endpoint_cusp_check{false};

    double period() const { return s_end - s_begin; }
};

/// Envelope of a sampled family: per-sample cusp function and envelope
/// point, plus the count of sign changes of alpha_s (vertical tangents).
inline Caustic envelope_of(const LineFamily& fam) {
    Caustic c;
    c.closed = fam.closed;
    c.s_begin = fam.s_begin;
    c.s_end = fam.s_end;
    c.map = fam.map;
    const std::size_t N = fam.samples.size();
    c.samples.resize(N);

    double as_scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& fs = fam.samples[i];
        c.samples[i] = {fs.s, fs.jet, cusp_function(fs.jet), envelope_of_jet(fs.jet)};
        as_scale = std::max(as_scale, std::fabs(fs.jet.alpha_s));
    }

    // Sign changes of alpha_s, skipping (near-)zero samples. For closed
    // families the sign sequence is cyclic, so the count is automatically
    // even. A zero sample whose nearest nonzero neighbors agree in sign is
    // an unresolved touch (reported, not guessed at).
    const double ztol = 1e-12 * as_scale;
    std::vector<int> signs;
    signs.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double v = c.samples[i].jet.alpha_s;
        if (std::fabs(v) > ztol) signs.push_back(v > 0.0 ? 1 : -1);
    }
    int count = 0;
    if (signs.size() > 1) {
        const std::size_t M = signs.size();
        const std::size_t pairs = fam.closed ? M : M - 1;
        for (std::size_t i = 0; i < pairs; ++i)
            if (signs[i] != signs[(i + 1) % M]) ++count;
    }
    c.infinity_count = count;

    // Refine the crossings bracketed by adjacent reliable samples
    // (bisection on alpha_s to width 1e-10).
    const std::size_t adj = fam.closed ? N : N - 1;
    for (std::size_t i = 0; i < adj; ++i) {
        const std::size_t k = (i + 1) % N;
        const double a0 = c.samples[i].jet.alpha_s, a1 = c.samples[k].jet.alpha_s;
        if (std::fabs(a0) <= ztol || std::fabs(a1) <= ztol) continue;
        if ((a0 > 0.0) == (a1 > 0.0)) continue;
        double lo = c.samples[i].s;
        double hi = c.samples[k].s + (fam.closed && k == 0 ? c.period() : 0.0);
        double flo = a0;
        for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = c.map.jet(mid).alpha_s;
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        c.infinity_parameters.push_back(0.5 * (lo + hi));
    }

    auto nearest_nonzero = [&](std::size_t i, int dir) -> double {
        for (std::size_t step = 1; step < N; ++step) {
            const std::ptrdiff_t k =
                static_cast<std::ptrdiff_t>(i) + dir * static_cast<std::ptrdiff_t>(step);
            if (!fam.closed && (k < 0 || k >= static_cast<std::ptrdiff_t>(N))) return 0.0;
            const double v = c.samples[(k % static_cast<std::ptrdiff_t>(N) + N) % N].jet.alpha_s;
            if (std::fabs(v) > ztol) return v;
        }
        return 0.0;
    };
    for (std::size_t i = 0; i < N; ++i) {
        if (std::fabs(c.samples[i].jet.alpha_s) > ztol) continue;
        if (!fam.closed && (i == 0 || i + 1 == N)) continue;
        const double before = nearest_nonzero(i, -1);
        const double after = nearest_nonzero(i, +1);
        if (before * after > 0.0)
            c.unresolved_crossings.push_back(c.samples[i].s);
    }
    return c;
}

/**
 * The n-th caustic by reflection from an interior source O.
 * Builds the pencil through O, applies the billiard map n times samplewise,
 * and computes envelope points and the cusp function H per sample.
 *
 * Throws DegeneratePencilError for n < 1, DegenerateSourceError if O is a
 * focus, std::invalid_argument if O is not strictly interior or samples are
 * too few.
 */
inline Caustic caustic(const ConicTable& t, const Point& O, int n,
                       int samples = 4096) {
    if (n < 1)
        throw DegeneratePencilError("caustic requires n >= 1 (pencil envelope is the point O)");
    if (samples < 512) throw std::invalid_argument("caustic requires samples >= 512");
    if (!t.contains(O)) throw std::invalid_argument("source must lie strictly inside the table");
    if (t.is_focal(O))
        throw DegenerateSourceError("source is a focus: caustic degenerates to a point");

    Caustic c = envelope_of(image_family(t, pencil(O, samples), n));
    c.source = O;
    c.n = n;
    c.table = t;
    return c;
}

/// Number of times the caustic passes through infinity (sign changes of
/// alpha_s over one period). Throws UnresolvedCrossingError when alpha_s
/// has a zero without sign change at sampling resolution.
inline int infinity_crossings(const Caustic& c) {
    if (!c.unresolved_crossings.empty())
        throw UnresolvedCrossingError(
            "alpha_s touches zero without sign change at s = " +
            std::to_string(c.unresolved_crossings.front()));
    return c.infinity_count;
}

// ---------------------------------------------------------------------------
// External light source
// ---------------------------------------------------------------------------

namespace detail {

/// lambda along the pencil through O as M + K cos(2s - phi); lambda > 0 is
/// exactly "the line meets the table's interior".
struct PencilLambdaWave {
    double M, K, phi;
};

inline PencilLambdaWave pencil_lambda_wave(const ConicTable& t, const Point& O) {
    const double A = t.a() * t.a() - O.x * O.x;
    const double B = t.b() * t.b() - O.y * O.y;
    return {0.5 * (A + B), std::hypot(0.5 * (B - A), O.x * O.y),
            std::atan2(O.x * O.y, 0.5 * (B - A))};
}

}  // namespace detail

/**
 * The two oppositely oriented ray families through an exterior source O that
 * meet the table's interior. Each is an open arc of the pencil through O;
 * the arc endpoints are the two tangent lines from O to the table. Samples
 * are inset from the endpoints by a relative margin of 1e-3.
 *
 * Throws InsidePointError for interior sources.
 */
inline std::array<LineFamily, 2> external_pencil(const ConicTable& t, const Point& O,
                                                 int samples = 2048) {
    if (t.contains(O)) throw InsidePointError("external_pencil requires an exterior source");

    const auto wave = detail::pencil_lambda_wave(t, O);
    // Exterior points see negative lambda in some directions.
    const double theta = std::acos(std::clamp(-wave.M / wave.K, -1.0, 1.0));
    const double lo = 0.5 * (wave.phi - theta);
    const double hi = 0.5 * (wave.phi + theta);
    const double margin = 1e-3 * (hi - lo);

    std::array<LineFamily, 2> out;
    for (int half = 0; half < 2; ++half) {
        LineFamily& fam = out[half];
        const double shift = half * kPi;
        fam.closed = false;
        fam.s_begin = lo + shift;
        fam.s_end = hi + shift;
        fam.winding = 0;
        fam.map = pencil_map(O);
        fam.samples.reserve(static_cast<std::size_t>(samples));
        const double a0 = lo + shift + margin, a1 = hi + shift - margin;
        for (int i = 0; i < samples; ++i) {
            const double s = a0 + (a1 - a0) * i / (samples - 1);
            fam.samples.push_back({s, fam.map.jet(s)});
        }
    }
    return out;
}

/// Caustic of one of the two external-source families (half = 0 or 1) after
/// n reflections.
inline Caustic external_caustic(const ConicTable& t, const Point& O, int n,
                                int half, int samples = 2048) {
    if (n < 1) throw DegeneratePencilError("external caustic requires n >= 1");
    auto fams = external_pencil(t, O, samples);
    const LineFamily& base = fams[half & 1];
    // The FD stencil of the composed map must stay inside the sampled arc.
    const double fd = std::min(kImageFdStep, 1.25e-4 * base.period());
    LineFamily img = image_family(t, base, n);
    img.map = image_map(t, base.map, n, fd);
    Caustic c = envelope_of(img);
    c.source = O;
    c.n = n;
    c.table = t;
    return c;
}

}  // namespace caustics
