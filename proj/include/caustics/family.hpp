#pragma once
/**
 * @file family.hpp
 * @brief 1-parameter families of rays (pencils and their billiard images),
 *        derivative jets along them, and envelope points.
 */

#include <functional>
#include <utility>
#include <vector>

#include "caustics/geometry.hpp"

namespace caustics {

struct RayCoord {
    double alpha{0.0};
    double p{0.0};
};

/// Value and first two s-derivatives of a family s -> (alpha(s), p(s)).
struct FamilyJet {
    double alpha{0.0}, p{0.0};
    double alpha_s{0.0}, p_s{0.0};
    double alpha_ss{0.0}, p_ss{0.0};
};

/// Numerator of p + d^2 p/d alpha^2 along a family, multiplied through by
/// alpha_s^3 so it stays finite at vertical tangents. Its sign changes are
/// the cusp parameters of the envelope.
inline double cusp_function(const FamilyJet& j) {
    return j.p * j.alpha_s * j.alpha_s * j.alpha_s + j.p_ss * j.alpha_s -
           j.p_s * j.alpha_ss;
}

/**
 * Evaluator for a ray family: point evaluation plus a jet, either analytic
 * (closed form) or by 5-point central differences at a configurable step.
 * Evaluation must be smooth on the family's domain for the FD jet to make
 * sense; billiard image families are (no grazing rays from interior sources).
 */
class LineFamilyMap {
public:
    using Eval = std::function<RayCoord(double)>;
    using Jet = std::function<FamilyJet(double)>;

    LineFamilyMap() = default;
    LineFamilyMap(Eval eval, double fd_step) : eval_(std::move(eval)), h_(fd_step) {}
    LineFamilyMap(Eval eval, Jet jet)
        : eval_(std::move(eval)), jet_(std::move(jet)) {}

    bool valid() const { return static_cast<bool>(eval_); }
    bool analytic() const { return static_cast<bool>(jet_); }
    double fd_step() const { return h_; }

    /// Same family with a different finite-difference step (no effect on
    /// analytic jets).
    LineFamilyMap with_fd_step(double h) const {
        if (jet_) return *this;
        LineFamilyMap out(eval_, h);
        return out;
    }

    RayCoord operator()(double s) const { return eval_(s); }

    FamilyJet jet(double s) const {
        if (jet_) return jet_(s);
        const RayCoord m2 = eval_(s - 2.0 * h_), m1 = eval_(s - h_);
        const RayCoord c0 = eval_(s), p1 = eval_(s + h_), p2 = eval_(s + 2.0 * h_);
        FamilyJet j;
        j.alpha = c0.alpha;
        j.p = c0.p;
        j.alpha_s = (m2.alpha - 8.0 * m1.alpha + 8.0 * p1.alpha - p2.alpha) / (12.0 * h_);
        j.p_s = (m2.p - 8.0 * m1.p + 8.0 * p1.p - p2.p) / (12.0 * h_);
        j.alpha_ss = (-m2.alpha + 16.0 * m1.alpha - 30.0 * c0.alpha + 16.0 * p1.alpha -
                      p2.alpha) / (12.0 * h_ * h_);
        j.p_ss = (-m2.p + 16.0 * m1.p - 30.0 * c0.p + 16.0 * p1.p - p2.p) /
                 (12.0 * h_ * h_);
        return j;
    }

    double cusp_function_at(double s) const { return cusp_function(jet(s)); }

private:
    Eval eval_;
    Jet jet_;
    double h_{1e-3};
};

struct FamilySample {
    double s{0.0};
    FamilyJet jet;
};

/// A sampled 1-parameter ray family with derivative estimates, plus the
/// map it was sampled from (used for refinement between samples).
struct LineFamily {
    std::vector<FamilySample> samples;
    bool closed{true};
    double s_begin{0.0};
    double s_end{kTwoPi};
    /// alpha winding per period (closed families): alpha(s+L) = alpha(s) + 2*pi*w.
    int winding{1};
    LineFamilyMap map;

    double period() const { return s_end - s_begin; }
};

// ---------------------------------------------------------------------------
// Pencils
// ---------------------------------------------------------------------------

/// Map of the pencil of rays through O: alpha(s) = s, p(s) = x0 sin s - y0 cos s.
inline LineFamilyMap pencil_map(const Point& O) {
    auto eval = [O](double s) -> RayCoord {
        return {s, O.x * std::sin(s) - O.y * std::cos(s)};
    };
    auto jet = [O](double s) -> FamilyJet {
        const double p = O.x * std::sin(s) - O.y * std::cos(s);
        const double ps = O.x * std::cos(s) + O.y * std::sin(s);
        return {s, p, 1.0, ps, 0.0, -p};
    };
    return {eval, jet};
}

/// Closed pencil through O, sampled uniformly with analytic derivatives.
inline LineFamily pencil(const Point& O, int samples = 4096) {
    LineFamily fam;
    fam.map = pencil_map(O);
    fam.closed = true;
    fam.s_begin = 0.0;
    fam.s_end = kTwoPi;
    fam.winding = 1;
    fam.samples.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double s = kTwoPi * i / samples;
        fam.samples.push_back({s, fam.map.jet(s)});
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Billiard image families
// ---------------------------------------------------------------------------

namespace detail {

/// Circle tables compose in closed form: alpha~ = alpha + 2n arccos(p/R),
/// p~ = p, so the image jet follows from the base jet by the chain rule.
inline FamilyJet circle_image_jet(const FamilyJet& base, double R, int n) {
    const double w2 = std::max(R * R - base.p * base.p, 0.0);
    const double w = std::sqrt(w2);
    FamilyJet j;
    j.alpha = base.alpha + 2.0 * n * std::acos(std::clamp(base.p / R, -1.0, 1.0));
    j.p = base.p;
    j.alpha_s = base.alpha_s - 2.0 * n * base.p_s / w;
    j.p_s = base.p_s;
    j.alpha_ss = base.alpha_ss -
                 2.0 * n * (base.p_ss / w + base.p * base.p_s * base.p_s / (w2 * w));
    j.p_ss = base.p_ss;
    return j;
}

}  // namespace detail

/// Default local step for finite-difference jets of billiard image maps.
/// Small enough to resolve the near-separatrix shear of high iterates;
/// second-derivative roundoff (~1e-16/h^2) stays below the working scales.
inline constexpr double kImageFdStep = 1e-5;

/// Map of the n-fold billiard image of a base family.
inline LineFamilyMap image_map(const ConicTable& t, const LineFamilyMap& base,
                               int n, double fd_step = kImageFdStep) {
    auto eval = [t, base, n](double s) -> RayCoord {
        const RayCoord rc = base(s);
        const Ray out = reflect_n(t, Ray{rc.alpha, rc.p}, n);
        return {out.alpha, out.p};
    };
    if (t.is_circle() && base.analytic()) {
        const double R = t.a();
        auto jet = [base, R, n](double s) -> FamilyJet {
            return detail::circle_image_jet(base.jet(s), R, n);
        };
        return {eval, jet};
    }
    return {eval, fd_step};
}

/**
 * Applies reflect_n samplewise to a sampled family. Circle tables get
 * analytic derivatives via the closed form; other tables use second-order
 * central differences in s at the sampling step (periodic continuation for
 * closed families, one-sided stencils at open ends).
 */
inline LineFamily image_family(const ConicTable& t, const LineFamily& fam, int n) {
    LineFamily out;
    out.closed = fam.closed;
    out.s_begin = fam.s_begin;
    out.s_end = fam.s_end;
    out.map = image_map(t, fam.map, n);
    const std::size_t N = fam.samples.size();
    out.samples.resize(N);

    if (n == 0) {
        out.samples = fam.samples;
        out.winding = fam.winding;
        out.map = fam.map;
        return out;
    }

    if (t.is_circle()) {
        const double R = t.a();
        for (std::size_t i = 0; i < N; ++i) {
            out.samples[i].s = fam.samples[i].s;
            out.samples[i].jet = detail::circle_image_jet(fam.samples[i].jet, R, n);
        }
        out.winding = fam.winding;
        return out;
    }

    // Map the samples, then difference the mapped values.
    std::vector<double> al(N), pp(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double s = fam.samples[i].s;
        const Ray r = reflect_n(t, Ray{fam.samples[i].jet.alpha, fam.samples[i].jet.p}, n);
        al[i] = r.alpha;
        pp[i] = r.p;
        out.samples[i].s = s;
        out.samples[i].jet.alpha = r.alpha;
        out.samples[i].jet.p = r.p;
    }

    const double h = (N > 1) ? (fam.samples[1].s - fam.samples[0].s) : 1.0;
    int winding = fam.winding;
    if (fam.closed) {
        const RayCoord wrap = out.map(fam.s_begin + fam.period());
        winding = static_cast<int>(std::lround((wrap.alpha - al[0]) / kTwoPi));
    }
    out.winding = winding;
    const double jump = kTwoPi * winding;

    auto aval = [&](std::ptrdiff_t i) {
        if (i < 0) return al[N + i] - jump;
        if (i >= static_cast<std::ptrdiff_t>(N)) return al[i - N] + jump;
        return al[i];
    };
    auto pval = [&](std::ptrdiff_t i) {
        if (i < 0) return pp[N + i];
        if (i >= static_cast<std::ptrdiff_t>(N)) return pp[i - N];
        return pp[i];
    };

    for (std::size_t i = 0; i < N; ++i) {
        auto& j = out.samples[i].jet;
        const auto k = static_cast<std::ptrdiff_t>(i);
        if (fam.closed || (i > 0 && i + 1 < N)) {
            j.alpha_s = (aval(k + 1) - aval(k - 1)) / (2.0 * h);
            j.p_s = (pval(k + 1) - pval(k - 1)) / (2.0 * h);
            j.alpha_ss = (aval(k + 1) - 2.0 * al[i] + aval(k - 1)) / (h * h);
            j.p_ss = (pval(k + 1) - 2.0 * pp[i] + pval(k - 1)) / (h * h);
        } else {
            const std::ptrdiff_t d = (i == 0) ? 1 : -1;
            j.alpha_s = d * (-3.0 * aval(k) + 4.0 * aval(k + d) - aval(k + 2 * d)) / (2.0 * h);
            j.p_s = d * (-3.0 * pval(k) + 4.0 * pval(k + d) - pval(k + 2 * d)) / (2.0 * h);
            j.alpha_ss = (aval(k) - 2.0 * aval(k + d) + aval(k + 2 * d)) / (h * h);
            j.p_ss = (pval(k) - 2.0 * pval(k + d) + pval(k + 2 * d)) / (h * h);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Envelope points
// ---------------------------------------------------------------------------

/// Envelope point of a line family in support form: the unique solution of
/// { x sin a - y cos a = p, x cos a + y sin a = p' }.
inline Point envelope_point(double alpha, double p, double p_prime) {
    const double sa = std::sin(alpha), ca = std::cos(alpha);
    return {p * sa + p_prime * ca, -p * ca + p_prime * sa};
}

/// A caustic point: finite, or at infinity in the direction of its
/// generating line (vertical tangent of the family curve).
struct EnvelopePoint {
    bool at_infinity{false};
    Point pt;
    double direction{0.0};  ///< generating-line direction when at infinity
};

/// Envelope point from a family jet; emits an at-infinity marker where
/// |alpha_s| vanishes relative to |p_s| (the point would exceed ~1e12).
inline EnvelopePoint envelope_of_jet(const FamilyJet& j) {
    if (std::fabs(j.alpha_s) * 1e12 <= std::fabs(j.p_s) || j.alpha_s == 0.0)
        return {true, {}, j.alpha};
    return {false, envelope_point(j.alpha, j.p, j.p_s / j.alpha_s), j.alpha};
}

}  // namespace caustics
