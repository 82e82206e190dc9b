#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "caustics/circle_criteria.hpp"
#include "caustics/cusps.hpp"

using namespace caustics;

TEST_CASE("four cusps of the first circle caustic, at the known points") {
    const Caustic c = caustic(ConicTable(1, 1), {0.4, 0.0}, 1, 4096);
    const CuspScan scan = find_cusps(c);
    REQUIRE(scan.cusps.size() == 4);
    REQUIRE(scan.unresolved.empty());

    // Axis cusps from the mirror dynamics: (-2, 0) and (-2/9, 0).
    int found_far = 0, found_near = 0, found_circle = 0;
    for (const Cusp& cusp : scan.cusps) {
        REQUIRE_FALSE(cusp.location.at_infinity);
        const Point& pt = cusp.location.pt;
        if (distance(pt, {-2.0, 0.0}) < 1e-9) ++found_far;
        if (distance(pt, {-2.0 / 9.0, 0.0}) < 1e-9) ++found_near;
        if (std::fabs(pt.norm() - 0.4) < 1e-9 && std::fabs(pt.y) > 0.1) ++found_circle;
    }
    REQUIRE(found_far == 1);
    REQUIRE(found_near == 1);
    REQUIRE(found_circle == 2);
}

TEST_CASE("circle cusps for n up to 8: counts, lines, circles, orders") {
    for (int n = 1; n <= 8; ++n) {
        const auto rep = verify_circle_cusps(1.0, {0.4, 0.0}, n);
        INFO("n = " << n);
        REQUIRE(rep.count == 4);
        REQUIRE(rep.on_center_line == 2);
        REQUIRE(rep.on_concentric_circle == 2);
        REQUIRE(rep.ordinary == 4);
        REQUIRE(rep.pass);
    }
}

TEST_CASE("circle cusps for an off-axis source (rotation covariance)") {
    const auto rep = verify_circle_cusps(1.0, {0.3, 0.28}, 2);
    REQUIRE(rep.pass);
}

TEST_CASE("pole configurations put an axis cusp at infinity, still ordinary") {
    // 1 - 2nd = 0 sends one on-axis cusp through infinity: d = 0.5 at n = 1
    // (the first caustic's far cusp), d = 0.25 at n = 2, d = 0.1 at n = 5.
    for (const auto& [d, n] : {std::pair{0.5, 1}, {0.25, 2}, {0.1, 5}}) {
        INFO("d = " << d << ", n = " << n);
        const auto rep = verify_circle_cusps(1.0, {d, 0.0}, n);
        REQUIRE(rep.count == 4);
        int infinite = 0;
        for (const Cusp& cusp : rep.scan.cusps)
            if (cusp.location.at_infinity) ++infinite;
        REQUIRE(infinite == 1);
        REQUIRE(rep.pass);
    }
}

TEST_CASE("fabricated separatrix sign swings are rejected, not reported as cusps") {
    // Rays of the pencil through the foci cross the separatrix of the
    // billiard map; finite differences there can show a large sign swing of
    // H that disappears under step refinement. The detector must keep the
    // four genuine cusps only.
    const ConicTable t(2, 1);
    for (int n : {4, 5}) {
        INFO("n = " << n);
        const CuspScan scan = find_cusps(caustic(t, {1.2, 0.1}, n, 4096));
        REQUIRE(scan.cusps.size() == 4);
    }
}

TEST_CASE("find_cusps rejects pencils") {
    Caustic c = envelope_of(pencil({0.3, 0.1}, 1024));
    c.n = 0;
    REQUIRE_THROWS_AS(find_cusps(c), DegeneratePencilError);
}

TEST_CASE("even-contact zeros of H are reported as unresolved") {
    // p(s) = 3 + cos 2s gives H = p + p'' = 3 - 3 cos 2s >= 0: zeros of even
    // contact at s = 0 and pi, no sign changes anywhere.
    auto make = [](double phase) {
        LineFamilyMap map(
            [phase](double s) -> RayCoord { return {s, 3.0 + std::cos(2.0 * (s - phase))}; },
            [phase](double s) -> FamilyJet {
                const double t = s - phase;
                return {s, 3.0 + std::cos(2.0 * t), 1.0, -2.0 * std::sin(2.0 * t),
                        0.0, -4.0 * std::cos(2.0 * t)};
            });
        LineFamily fam;
        fam.map = map;
        fam.closed = true;
        for (int i = 0; i < 4096; ++i) {
            const double s = kTwoPi * i / 4096;
            fam.samples.push_back({s, map.jet(s)});
        }
        Caustic c = envelope_of(fam);
        c.n = 1;
        return c;
    };
    // Touch points at samples (phase 0) and between samples (shifted phase).
    for (double phase : {0.0, 0.3 * kTwoPi / 4096}) {
        INFO("phase = " << phase);
        const CuspScan scan = find_cusps(make(phase));
        REQUIRE(scan.cusps.empty());
        REQUIRE(scan.unresolved.size() >= 2);
        for (const auto& u : scan.unresolved) {
            const double d0 = std::fmod(std::fabs(u.s - phase), kPi);
            REQUIRE(std::min(d0, kPi - d0) < 1e-3);
        }
    }
}

TEST_CASE("degenerate inflection is not classified as ordinary") {
    // At the even-contact point the envelope has Gamma'' = 0: order != 2.
    LineFamilyMap map(
        [](double s) -> RayCoord { return {s, 3.0 + std::cos(2.0 * s)}; },
        [](double s) -> FamilyJet {
            return {s, 3.0 + std::cos(2.0 * s), 1.0, -2.0 * std::sin(2.0 * s),
                    0.0, -4.0 * std::cos(2.0 * s)};
        });
    LineFamily fam;
    fam.map = map;
    fam.closed = true;
    for (int i = 0; i < 1024; ++i) {
        const double s = kTwoPi * i / 1024;
        fam.samples.push_back({s, map.jet(s)});
    }
    Caustic c = envelope_of(fam);
    c.n = 1;
    Cusp fake;
    fake.s = 0.0;
    fake.location = envelope_of_jet(map.jet(0.0));
    REQUIRE(classify_cusp(c, fake) == std::nullopt);
}

TEST_CASE("predicted cusps for the circle") {
    const ConicTable circle(1, 1);
    const Point O{0.4, 0.0};
    {
        const auto pred = predicted_cusps(circle, O, 1);
        // Ellipse slot: tangency with the concentric circle, radius 0.4.
        REQUIRE(pred[0].location.pt.norm() == Catch::Approx(0.4));
        REQUIRE(pred[1].location.pt.norm() == Catch::Approx(0.4));
        // Axis slot: the mirror-equation points.
        REQUIRE(distance(pred[2].location.pt, {-2.0, 0.0}) < 1e-12);
        REQUIRE(distance(pred[3].location.pt, {-2.0 / 9.0, 0.0}) < 1e-12);
    }
    for (int n = 1; n <= 5; ++n) {
        const auto pred = predicted_cusps(circle, O, n);
        REQUIRE(pred[0].location.pt.norm() == Catch::Approx(0.4));
        REQUIRE(pred[1].location.pt.norm() == Catch::Approx(0.4));
    }
}

TEST_CASE("predicted cusps satisfy their conic equations in an ellipse") {
    const ConicTable t(2, 1);
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> ux(-1.5, 1.5), uy(-0.7, 0.7);
    int tested = 0;
    while (tested < 50) {
        const Point O{ux(rng), uy(rng)};
        if (!t.contains({O.x / 0.95, O.y / 0.95}) || t.is_focal(O)) continue;
        if (std::fabs(O.x) < 1e-3 || std::fabs(O.y) < 1e-3) continue;
        ++tested;
        const int n = 1 + tested % 5;
        const auto pred = predicted_cusps(t, O, n);
        for (const auto& pc : pred) {
            REQUIRE_FALSE(pc.location.at_infinity);
            const double lam = pc.conic.lambda;
            const Point& pt = pc.location.pt;
            const double res =
                pt.x * pt.x / (4.0 - lam) + pt.y * pt.y / (1.0 - lam) - 1.0;
            REQUIRE(std::fabs(res) < 1e-8);
        }
    }
}

TEST_CASE("prediction verification: circle") {
    for (int n : {1, 3, 8}) {
        const PredictionReport rep = verify_predicted_cusps(ConicTable(1, 1), {0.4, 0.0}, n);
        INFO("n = " << n);
        REQUIRE(rep.pass);
        REQUIRE(rep.detected.cusps.size() == 4);
    }
}

TEST_CASE("prediction verification: generic source in an ellipse") {
    const ConicTable t(2, 1);
    for (int n : {1, 2, 3}) {
        const PredictionReport rep = verify_predicted_cusps(t, {0.8, 0.3}, n);
        INFO("n = " << n);
        REQUIRE(rep.pass);
        for (const auto& m : rep.matches) REQUIRE(m.distance < 1e-5 * t.a());
    }
}

TEST_CASE("prediction verification: sources on the axes (degenerate conics)") {
    const ConicTable t(2, 1);
    REQUIRE(verify_predicted_cusps(t, {0.2, 0.0}, 2).pass);   // between the foci
    REQUIRE(verify_predicted_cusps(t, {1.8, 0.0}, 1).pass);   // beyond a focus
    REQUIRE(verify_predicted_cusps(t, {0.0, 0.4}, 1).pass);   // minor axis
    REQUIRE(verify_predicted_cusps(t, {0.0, 0.4}, 3).pass);   // g^3 = id: coincident pair
}

TEST_CASE("detected cusps are stable under resampling and phase rotation") {
    const ConicTable t(2, 1);
    const Point O{0.8, 0.3};
    const int n = 2;
    const CuspScan base = find_cusps(caustic(t, O, n, 4096));
    const CuspScan doubled = find_cusps(caustic(t, O, n, 8192));
    REQUIRE(base.cusps.size() == doubled.cusps.size());
    for (std::size_t i = 0; i < base.cusps.size(); ++i) {
        REQUIRE(distance(base.cusps[i].location.pt, doubled.cusps[i].location.pt) <
                1e-6);
    }

    // Same family sampled with a rotated s-origin.
    LineFamily fam = pencil(O, 4096);
    const double shift = 0.37;
    for (int i = 0; i < 4096; ++i) {
        const double s = shift + kTwoPi * i / 4096;
        fam.samples[i] = {s, fam.map.jet(s)};
    }
    fam.s_begin = shift;
    fam.s_end = shift + kTwoPi;
    Caustic rotated = envelope_of(image_family(t, fam, n));
    rotated.n = n;
    rotated.table = t;
    const CuspScan rot = find_cusps(rotated);
    REQUIRE(rot.cusps.size() == base.cusps.size());
    for (const Cusp& cusp : base.cusps) {
        double best = 1e300;
        for (const Cusp& other : rot.cusps)
            best = std::min(best, distance(cusp.location.pt, other.location.pt));
        REQUIRE(best < 1e-6);
    }
}

TEST_CASE("random configurations: predictions match detections") {
    // Randomized sweep over tables, sources, and reflection counts. Remote
    // cusps (near-degenerate confocal hyperbola for sources close to an
    // axis) are located to relative precision, so the acceptance figure
    // 1e-5*a gets a relative allowance for locations tens of table lengths
    // out.
    std::mt19937_64 rng(20260811);
    std::uniform_real_distribution<double> ua(1.0, 3.0), ub(0.5, 1.0);
    int tested = 0;
    for (int trial = 0; trial < 40 && tested < 25; ++trial) {
        const double a = ua(rng), b = ub(rng) * a;
        const ConicTable t(a, std::min(a, b));
        std::uniform_real_distribution<double> ux(-0.97 * t.a(), 0.97 * t.a()),
            uy(-0.97 * t.b(), 0.97 * t.b());
        const Point O{ux(rng), uy(rng)};
        if (!t.contains({O.x / 0.98, O.y / 0.98}) || t.is_focal(O)) continue;
        ++tested;
        const int n = 1 + trial % 5;
        INFO("a=" << t.a() << " b=" << t.b() << " O=(" << O.x << "," << O.y
                  << ") n=" << n);
        const PredictionReport rep = verify_predicted_cusps(t, O, n);
        for (int i = 0; i < 4; ++i) {
            if (rep.matches[i].detected_index >= 0) continue;
            // Unmatched at the absolute tolerance: must still match at
            // relative precision.
            const EnvelopePoint& want = rep.predicted[i].location;
            REQUIRE_FALSE(want.at_infinity);
            double best = 1e300;
            for (const Cusp& cusp : rep.detected.cusps) {
                if (cusp.location.at_infinity) continue;
                best = std::min(best, distance(cusp.location.pt, want.pt));
            }
            REQUIRE(best < 1e-6 * (t.a() + want.pt.norm()));
        }
    }
    REQUIRE(tested >= 20);
}

TEST_CASE("external-source cusps sit where the reflected tangent rays touch") {
    // The ray through an exterior source tangent to the confocal hyperbola
    // at the source maps, after n reflections, to a ray whose tangency
    // point with the same hyperbola is the detected cusp.
    const ConicTable t(2, 1);
    const Point O{3.0, 0.5};
    const ConfocalPair conics = confocal_through(t, O);
    const double lam = conics.hyperbola.lambda;
    const auto rays = detail::tangent_ray_pair(t, O, conics.hyperbola);
    for (int n : {1, 2}) {
        std::vector<Point> predicted;
        for (const Ray& r : rays) {
            if (lambda_of_ray(t, Ray{r.alpha, r.p}) < 0.0) continue;
            predicted.push_back(tangency_point(t, reflect_n(t, r, n), lam));
        }
        std::vector<Cusp> detected;
        for (int half = 0; half < 2; ++half) {
            const CuspScan scan = find_cusps(external_caustic(t, O, n, half, 2048));
            detected.insert(detected.end(), scan.cusps.begin(), scan.cusps.end());
        }
        REQUIRE(detected.size() == 2);
        REQUIRE(predicted.size() == 2);
        for (const Point& want : predicted) {
            double best = 1e300;
            for (const Cusp& cusp : detected)
                best = std::min(best, distance(cusp.location.pt, want));
            REQUIRE(best < 1e-5 * t.a());
        }
    }
}

// ---------------------------------------------------------------------------
// Closed-form circle criteria
// ---------------------------------------------------------------------------

TEST_CASE("inflection residual vanishes exactly on the axes") {
    for (int n = 1; n <= 10; ++n) {
        for (double v = 0.05; v < 1.0; v += 0.05) {
            REQUIRE(circle_inflection_residual(0.0, v, n) == 0.0);
            REQUIRE(circle_inflection_residual(v, 0.0, n) == 0.0);
        }
    }
}

TEST_CASE("inflection residual is positive off the axes") {
    // residual = 2 n b x Q(x) with Q > 0 for n >= 2 and Q = 3(x-1)^2 for
    // n = 1; no zeros inside the open disk away from the axes.
    for (int n = 1; n <= 10; ++n) {
        for (int i = 1; i < 100; ++i) {
            for (int j = 1; j < 100; ++j) {
                const double a = i / 100.0, b = j / 100.0;
                if (a * a + b * b >= 1.0 - 1e-3) continue;
                REQUIRE(circle_inflection_residual(a, b, n) > 0.0);
            }
        }
    }
}

TEST_CASE("cusp quadratic root structure") {
    {
        const auto q = circle_quadratics(1);
        REQUIRE(q.discriminant == 0.0);
        REQUIRE(q.root_count == 1);
        REQUIRE(q.roots[0] == Catch::Approx(1.0));
    }
    {
        const auto q = circle_quadratics(2);
        REQUIRE(q.discriminant == -36.0);
        REQUIRE(q.root_count == 0);
    }
    for (int n = 1; n <= 20; ++n)
        REQUIRE(circle_quadratics(n).discriminant == 12.0 * (1.0 - double(n) * n));
}

TEST_CASE("inflection condition: identity map and circle substitution") {
    // phi = 0 reduces to the plain inflection condition p'' + p.
    REQUIRE(inflection_condition(0.7, 2.0, -1.3, 0.0, 0.0, 0.0) ==
            Catch::Approx(-1.3 + 0.7));

    // The circle jet substitution reproduces the closed-form residual.
    std::mt19937_64 rng(127);
    std::uniform_real_distribution<double> uni(0.01, 0.9);
    for (int trial = 0; trial < 100; ++trial) {
        double a = uni(rng), b = uni(rng);
        if (a * a + b * b >= 0.98) continue;
        const int n = 1 + trial % 10;
        const double w = std::sqrt(1.0 - b * b);
        const double resid = inflection_condition(
            -b, a, b, 0.0, -2.0 * n / w, 2.0 * b * n / (w * w * w));
        REQUIRE(resid == Catch::Approx(circle_inflection_residual(a, b, n))
                             .margin(1e-12)
                             .epsilon(1e-12));
    }
}

TEST_CASE("inflection condition against a numerical jet-composition oracle") {
    // Map the 2-jet through T(alpha, p) = (alpha + phi(p), p) numerically,
    // reparametrize by the image abscissa, and measure p'' + p0 there.
    std::mt19937_64 rng(131);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const double p0 = uni(rng), p1 = uni(rng), p2 = uni(rng);
        const double phi1 = uni(rng), phi2 = uni(rng);
        const double u = 1.0 + p1 * phi1;
        if (std::fabs(u) < 0.2) continue;  // stay away from the chart flip

        auto A = [&](double e) {
            const double dp = p1 * e + 0.5 * p2 * e * e;
            return e + phi1 * dp + 0.5 * phi2 * dp * dp;
        };
        auto P = [&](double e) { return p0 + p1 * e + 0.5 * p2 * e * e; };
        const double h = 1e-4;
        auto dPdA = [&](double e) {
            const double dA = (A(e + h) - A(e - h)) / (2.0 * h);
            const double dP = (P(e + h) - P(e - h)) / (2.0 * h);
            return dP / dA;
        };
        const double dA0 = (A(h) - A(-h)) / (2.0 * h);
        const double second = (dPdA(h) - dPdA(-h)) / (2.0 * h) / dA0;
        const double oracle = (second + p0) * u * u * u;
        const double resid = inflection_condition(p0, p1, p2, 0.0, phi1, phi2);
        REQUIRE(resid == Catch::Approx(oracle).margin(1e-5).epsilon(1e-5));
    }
}
