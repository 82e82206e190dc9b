#pragma once
/**
 * @file refraction.hpp
 * @brief First caustic by refraction of a parallel beam entering a circle
 *        (index mu > 1): the refracted ray family and its envelope.
 *
 * Geometry: the beam travels along +x and enters through the illuminated
 * half of the circle, entry point (R cos u, R sin u) with u in (pi/2, 3pi/2).
 * Snell's law sin i = mu sin r at the inward normal gives the refracted ray
 * in closed form:
 *
 *     alpha(u) = u - pi + arcsin(sin u / mu),   p(u) = -(R/mu) sin u.
 *
 * The cusp function of this family vanishes at u = pi (the paraxial focus
 * at distance R/(mu-1) on the axis) and exactly at the arc endpoints, whose
 * envelope points sit on the concentric circle of radius R/mu — these are
 * the off-axis cusps.
 */

#include "caustics/caustic.hpp"
#include "caustics/family.hpp"

namespace caustics {

struct RefractionSetup {
    double mu{2.0};      ///< refraction index of the circle's interior
    double radius{1.0};  ///< circle radius

    RefractionSetup(double index, double R) : mu(index), radius(R) {
        if (!(mu > 1.0)) throw std::invalid_argument("refraction requires mu > 1");
        if (!(R > 0.0)) throw std::invalid_argument("refraction requires radius > 0");
    }
};

/// Analytic map of the refracted family (valid for all u; the physical beam
/// covers u in [pi/2, 3pi/2]).
inline LineFamilyMap refraction_map(const RefractionSetup& setup) {
    const double mu = setup.mu, R = setup.radius;
    auto eval = [mu, R](double u) -> RayCoord {
        return {u - kPi + std::asin(std::sin(u) / mu), -(R / mu) * std::sin(u)};
    };
    auto jet = [mu, R](double u) -> FamilyJet {
        const double su = std::sin(u), cu = std::cos(u);
        const double w2 = mu * mu - su * su;
        const double w = std::sqrt(w2);
        FamilyJet j;
        j.alpha = u - kPi + std::asin(su / mu);
        j.p = -(R / mu) * su;
        j.alpha_s = 1.0 + cu / w;
        j.alpha_ss = -su * (mu * mu - 1.0) / (w2 * w);
        j.p_s = -(R / mu) * cu;
        j.p_ss = (R / mu) * su;
        return j;
    };
    return {eval, jet};
}

/// The refracted ray family over the illuminated half, sampled with a
/// relative endpoint margin of 1e-3 (derivatives are analytic; the margin
/// keeps the sampled envelope away from the arc ends, which are reported
/// separately as endpoint cusps).
inline LineFamily refract_parallel_beam(const RefractionSetup& setup,
                                        int samples = 4096) {
    LineFamily fam;
    fam.closed = false;
    fam.s_begin = kPi / 2.0;
    fam.s_end = 3.0 * kPi / 2.0;
    fam.winding = 0;
    fam.map = refraction_map(setup);
    const double margin = 1e-3 * fam.period();
    const double a0 = fam.s_begin + margin, a1 = fam.s_end - margin;
    fam.samples.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double u = a0 + (a1 - a0) * i / (samples - 1);
        fam.samples.push_back({u, fam.map.jet(u)});
    }
    return fam;
}

/// Envelope of the refracted family with endpoint-cusp probing enabled
/// (the radius R/mu cusps live at the arc ends).
inline Caustic refraction_caustic(const RefractionSetup& setup, int samples = 4096) {
    Caustic c = envelope_of(refract_parallel_beam(setup, samples));
    c.n = 1;
    c.endpoint_cusp_check = true;
    return c;
}

}  // namespace caustics
