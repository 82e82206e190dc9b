// Command-line front end: caustic computation with deterministic exports,
// verification suites for the predicted cusp structure, complexity tables,
// and the on-axis mirror dynamics.

#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caustics/caustic.hpp"
#include "caustics/circle_criteria.hpp"
#include "caustics/cusps.hpp"
#include "caustics/io.hpp"
#include "caustics/mobius.hpp"
#include "caustics/refraction.hpp"

namespace {

using namespace caustics;

constexpr int kExitOk = 0;
constexpr int kExitClaimFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError(std::string(what) + " expects \"x,y\"");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + " expects numeric \"x,y\"");
    }
}

Viewport parse_viewport(const std::string& text) {
    Viewport vp;
    double* slot[4] = {&vp.xmin, &vp.xmax, &vp.ymin, &vp.ymax};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const auto next = i < 3 ? text.find(',', pos) : text.size();
        if (next == std::string::npos)
            throw CLI::ValidationError("--viewport expects xmin,xmax,ymin,ymax");
        try {
            *slot[i] = std::stod(text.substr(pos, next - pos));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--viewport expects numeric bounds");
        }
        pos = next + 1;
    }
    if (vp.xmax <= vp.xmin || vp.ymax <= vp.ymin)
        throw CLI::ValidationError("--viewport bounds must be increasing");
    return vp;
}

struct Claim {
    std::string name;
    bool pass;
    json detail;
};

int emit_claims(const std::string& suite, std::vector<Claim>& claims,
                const RunStamp& stamp) {
    json doc = json::object();
    doc["suite"] = suite;
    doc["config"] = stamp.to_json();
    doc["claims"] = json::array();
    bool all = true;
    for (auto& c : claims) {
        json e = json::object();
        e["claim"] = c.name;
        e["pass"] = c.pass;
        if (!c.detail.is_null()) e["detail"] = std::move(c.detail);
        doc["claims"].push_back(std::move(e));
        all = all && c.pass;
    }
    doc["pass"] = all;
    std::cout << doc.dump(2) << "\n";
    return all ? kExitOk : kExitClaimFailed;
}

double max_lambda_drift(const ConicTable& t, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), uni(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const double alpha = ang(rng);
        const double sa = t.a() * std::sin(alpha), cb = t.b() * std::cos(alpha);
        const Ray r{alpha, 0.99 * std::sqrt(sa * sa + cb * cb) * uni(rng)};
        worst = std::max(worst,
                         std::fabs(lambda_of_ray(t, reflect(t, r)) - lambda_of_ray(t, r)));
    }
    return worst;
}

// --------------------------------------------------------------------------
// caustic subcommand
// --------------------------------------------------------------------------

struct CausticArgs {
    double a = 1.0, b = 1.0;
    std::string source;
    int n = 1;
    int samples = 4096;
    double tol = 1e-6;
    std::string csv_path = "caustic.csv";
    std::string json_path = "cusps.json";
    std::string svg_path;
    std::string viewport;
    bool degrees = false;
};

int run_caustic(const CausticArgs& args) {
    const ConicTable table(args.a, args.b);
    const auto [sx, sy] = parse_pair(args.source, "--source");
    const Point source{sx, sy};
    if (args.n < 1) throw CLI::ValidationError("--n must be >= 1");

    RunStamp stamp;
    stamp.add("command", "caustic");
    stamp.add("a", args.a);
    stamp.add("b", args.b);
    stamp.add("source", args.source);
    stamp.add("n", args.n);
    stamp.add("samples", args.samples);
    stamp.add("tol", args.tol);
    if (args.degrees) stamp.add("degrees", "1");

    const PredictionReport rep =
        verify_predicted_cusps(table, source, args.n, 1e-5 * table.a(), args.samples);
    const Caustic c = caustic(table, source, args.n, args.samples);

    {
        std::ofstream os(args.csv_path, std::ios::binary);
        if (!os) throw CLI::ValidationError("cannot open " + args.csv_path);
        write_caustic_csv(os, c, stamp, args.degrees);
    }
    {
        std::ofstream os(args.json_path, std::ios::binary);
        if (!os) throw CLI::ValidationError("cannot open " + args.json_path);
        os << prediction_report_json(rep, stamp, args.degrees).dump(2) << "\n";
    }
    if (!args.svg_path.empty()) {
        Viewport vp;
        if (!args.viewport.empty()) {
            vp = parse_viewport(args.viewport);
        } else {
            // Default: square window covering the table and every finite cusp.
            double extent = 1.1 * table.a();
            for (const Cusp& cusp : rep.detected.cusps)
                if (!cusp.location.at_infinity)
                    extent = std::max({extent, std::fabs(cusp.location.pt.x),
                                       std::fabs(cusp.location.pt.y)});
            extent *= 1.1;
            vp = {-extent, extent, -extent, extent};
        }
        std::ofstream os(args.svg_path, std::ios::binary);
        if (!os) throw CLI::ValidationError("cannot open " + args.svg_path);
        write_caustic_svg(os, c, rep.detected.cusps, vp, stamp);
    }

    std::cout << "caustic n=" << args.n << ": " << rep.detected.cusps.size()
              << " cusps, " << c.infinity_count << " infinity crossings, "
              << (rep.pass ? "4/4" : "not all") << " predictions matched\n";
    return kExitOk;
}

// --------------------------------------------------------------------------
// verify subcommands
// --------------------------------------------------------------------------

struct VerifyArgs {
    double a = 1.0, b = 1.0;
    double radius = 1.0;
    double mu = 2.0;
    double x0 = 0.0;
    std::string source;
    int n_max = 0;
    int samples = 4096;
    double tol = 1e-6;
    std::uint64_t seed = 1234;
};

int verify_circle_suite(const VerifyArgs& args) {
    const auto [sx, sy] = parse_pair(args.source, "--source");
    const int n_max = args.n_max > 0 ? args.n_max : 8;
    RunStamp stamp;
    stamp.add("command", "verify-circle");
    stamp.add("radius", args.radius);
    stamp.add("source", args.source);
    stamp.add("n_max", n_max);
    stamp.add("samples", args.samples);
    stamp.add("seed", std::to_string(args.seed));

    std::vector<Claim> claims;
    {
        const double drift = max_lambda_drift(ConicTable(args.radius, args.radius),
                                              10000, args.seed);
        json d;
        d["max_drift"] = drift;
        claims.push_back({"lambda-invariance", drift < 1e-9, d});
    }
    for (int n = 1; n <= n_max; ++n) {
        const auto rep = verify_circle_cusps(args.radius, {sx, sy}, n, args.samples);
        json d;
        d["count"] = rep.count;
        d["on_center_line"] = rep.on_center_line;
        d["on_concentric_circle"] = rep.on_concentric_circle;
        d["ordinary"] = rep.ordinary;
        claims.push_back({"four-ordinary-cusps-n" + std::to_string(n), rep.pass, d});
    }
    return emit_claims("circle", claims, stamp);
}

int verify_ellipse_suite(const VerifyArgs& args) {
    const ConicTable table(args.a, args.b);
    const auto [sx, sy] = parse_pair(args.source, "--source");
    const int n_max = args.n_max > 0 ? args.n_max : 5;
    RunStamp stamp;
    stamp.add("command", "verify-ellipse");
    stamp.add("a", args.a);
    stamp.add("b", args.b);
    stamp.add("source", args.source);
    stamp.add("n_max", n_max);
    stamp.add("samples", args.samples);
    stamp.add("seed", std::to_string(args.seed));

    std::vector<Claim> claims;
    {
        const double drift = max_lambda_drift(table, 10000, args.seed);
        json d;
        d["max_drift"] = drift;
        claims.push_back({"lambda-invariance", drift < 1e-9, d});
    }
    for (int n = 1; n <= n_max; ++n) {
        const auto rep = verify_predicted_cusps(table, {sx, sy}, n, 1e-5 * table.a(),
                                         args.samples);
        json d;
        d["detected_count"] = rep.detected.cusps.size();
        json dist = json::array();
        for (const auto& m : rep.matches)
            dist.push_back(m.detected_index >= 0 ? json(m.distance) : json(nullptr));
        d["match_distances"] = dist;
        claims.push_back(
            {"predicted-cusps-matched-n" + std::to_string(n), rep.pass, d});
    }
    return emit_claims("ellipse", claims, stamp);
}

int verify_axis_suite(const VerifyArgs& args) {
    const ConicTable table(args.a, args.b);
    const int n_max = args.n_max > 0 ? args.n_max : 6;
    RunStamp stamp;
    stamp.add("command", "verify-axis");
    stamp.add("a", args.a);
    stamp.add("b", args.b);
    stamp.add("x0", args.x0);
    stamp.add("n_max", n_max);
    stamp.add("samples", args.samples);

    std::vector<Claim> claims;
    const double match_tol = 1e-5 * table.a();
    for (int n = 1; n <= n_max; ++n) {
        const auto pair = iterate_axis_cusps(table, args.x0, n, TableAxis::Major);
        const Caustic c = caustic(table, {args.x0, 0.0}, n, args.samples);
        const CuspScan scan = find_cusps(c);
        // On-axis detected cusps (finite on the x-axis, or escaping along it).
        int matched = 0;
        json dists = json::array();
        for (const EnvelopePoint& want : {pair.forward, pair.backward}) {
            double best = 1e300;
            for (const Cusp& cusp : scan.cusps) {
                const auto& loc = cusp.location;
                if (want.at_infinity != loc.at_infinity) continue;
                if (want.at_infinity) {
                    double d = std::fmod(std::fabs(loc.direction - want.direction), kPi);
                    best = std::min(best, std::min(d, kPi - d) * table.a());
                } else {
                    best = std::min(best, distance(loc.pt, want.pt));
                }
            }
            dists.push_back(best);
            if (best < match_tol) ++matched;
        }
        json d;
        d["distances"] = dists;
        claims.push_back(
            {"mobius-matches-detected-n" + std::to_string(n), matched == 2, d});
    }

    if (table.is_circle()) {
        // |O_n| -> 0, decreasing once past the peak of the parabolic orbit.
        std::vector<double> norms;
        for (int n = 1; n <= 20; ++n) {
            const auto pair = iterate_axis_cusps(table, args.x0, n, TableAxis::Major);
            norms.push_back(pair.forward.at_infinity ? 1e300 : pair.forward.pt.norm());
        }
        const std::size_t peak =
            std::max_element(norms.begin(), norms.end()) - norms.begin();
        bool decreasing = true;
        for (std::size_t k = peak + 1; k + 1 < norms.size(); ++k)
            if (norms[k + 1] >= norms[k]) decreasing = false;
        const auto tail = iterate_axis_cusps(table, args.x0, 40, TableAxis::Major);
        claims.push_back({"circle-axis-cusps-converge-to-center",
                          decreasing && tail.forward.pt.norm() < 0.05, json{}});
    } else {
        const double c = table.c();
        bool monotone = true;
        double prev = 1e300;
        for (int n = 1; n <= 10; ++n) {
            const auto pair = iterate_axis_cusps(table, args.x0, 2 * n, TableAxis::Major);
            const double d = distance(pair.forward.pt, {-c, 0.0});
            if (prev > 1e-12 && d >= prev) monotone = false;
            prev = d;
        }
        json d;
        d["final_distance_to_stable_focus"] = prev;
        claims.push_back({"even-iterates-approach-stable-focus",
                          monotone && prev < 1e-8, d});
    }
    return emit_claims("axis", claims, stamp);
}

int verify_refraction_suite(const VerifyArgs& args) {
    const RefractionSetup setup(args.mu, args.radius);
    RunStamp stamp;
    stamp.add("command", "verify-refraction");
    stamp.add("mu", args.mu);
    stamp.add("radius", args.radius);
    stamp.add("samples", args.samples);

    std::vector<Claim> claims;
    {
        const LineFamily fam = refract_parallel_beam(setup, args.samples);
        double worst = 0.0;
        for (const auto& s : fam.samples) {
            const Point entry{setup.radius * std::cos(s.s), setup.radius * std::sin(s.s)};
            const Point n_in{-std::cos(s.s), -std::sin(s.s)};
            const Ray ray{s.jet.alpha, s.jet.p};
            const double sin_i = std::fabs(Point{1.0, 0.0}.cross(n_in));
            const double sin_r = std::fabs(ray.direction().cross(n_in));
            worst = std::max(worst, std::fabs(sin_i - setup.mu * sin_r));
            worst = std::max(worst, std::fabs(ray.incidence(entry)));
        }
        json d;
        d["max_residual"] = worst;
        claims.push_back({"snell-residual", worst < 1e-12, d});
    }
    {
        const Caustic c = refraction_caustic(setup, args.samples);
        const CuspScan scan = find_classified_cusps(c);
        int off_axis = 0;
        double worst = 0.0;
        for (const Cusp& cusp : scan.cusps) {
            if (cusp.location.at_infinity) continue;
            if (std::fabs(cusp.location.pt.y) < 1e-3 * setup.radius) continue;
            ++off_axis;
            worst = std::max(worst, std::fabs(cusp.location.pt.norm() -
                                              setup.radius / setup.mu));
        }
        json d;
        d["off_axis_count"] = off_axis;
        d["max_radius_error"] = worst;
        claims.push_back({"off-axis-cusps-on-circle-radius-R-over-mu",
                          off_axis == 2 && worst < 1e-5 * setup.radius, d});
    }
    return emit_claims("refraction", claims, stamp);
}

int verify_external_suite(const VerifyArgs& args) {
    const ConicTable table(args.a, args.b);
    const auto [sx, sy] = parse_pair(args.source, "--source");
    const Point source{sx, sy};
    const int n_max = args.n_max > 0 ? args.n_max : 2;
    RunStamp stamp;
    stamp.add("command", "verify-external");
    stamp.add("a", args.a);
    stamp.add("b", args.b);
    stamp.add("source", args.source);
    stamp.add("n_max", n_max);
    stamp.add("samples", args.samples);

    const ConfocalPair conics = confocal_through(table, source);
    std::vector<Claim> claims;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<Cusp> cusps;
        for (int half = 0; half < 2; ++half) {
            const Caustic c = external_caustic(table, source, n, half, args.samples);
            const CuspScan scan = find_cusps(c);
            cusps.insert(cusps.end(), scan.cusps.begin(), scan.cusps.end());
        }
        bool located = true;
        json d;
        d["count"] = cusps.size();
        json res = json::array();
        for (const Cusp& cusp : cusps) {
            if (cusp.location.at_infinity) {
                located = false;
                continue;
            }
            const Point& pt = cusp.location.pt;
            double r;
            if (conics.hyperbola.degenerate()) {
                // Degenerate hyperbola: the line from the source through the
                // center.
                const double ang = conics.hyperbola.axis_angle;
                r = std::fabs(pt.x * std::sin(ang) - pt.y * std::cos(ang));
            } else {
                const double lam = conics.hyperbola.lambda;
                r = std::fabs(pt.x * pt.x / (table.a() * table.a() - lam) +
                              pt.y * pt.y / (table.b() * table.b() - lam) - 1.0);
            }
            res.push_back(r);
            located = located && r < 1e-5;
        }
        d["hyperbola_residuals"] = res;
        claims.push_back({"two-cusps-on-confocal-hyperbola-n" + std::to_string(n),
                          cusps.size() == 2 && located, d});
    }
    return emit_claims("external", claims, stamp);
}

// --------------------------------------------------------------------------
// complexity subcommand
// --------------------------------------------------------------------------

struct ComplexityArgs {
    double a = 1.0, b = 1.0;
    std::string source;
    std::vector<int> n_list;
    int n_max = 0;
    int samples = 4096;
    std::string csv_path;
};

int run_complexity(const ComplexityArgs& args) {
    const ConicTable table(args.a, args.b);
    const auto [sx, sy] = parse_pair(args.source, "--source");
    std::vector<int> ns = args.n_list;
    if (ns.empty())
        for (int n = 1; n <= std::max(args.n_max, 1); ++n) ns.push_back(n);
    for (int n : ns)
        if (n < 1) throw CLI::ValidationError("complexity requires n >= 1");

    RunStamp stamp;
    stamp.add("command", "complexity");
    stamp.add("a", args.a);
    stamp.add("b", args.b);
    stamp.add("source", args.source);
    stamp.add("samples", args.samples);

    std::vector<std::array<int, 4>> rows;
    for (int n : ns) {
        const Caustic c = caustic(table, {sx, sy}, n, args.samples);
        const CuspScan scan = find_cusps(c);
        rows.push_back({n, c.infinity_count, static_cast<int>(scan.cusps.size()),
                        static_cast<int>(c.unresolved_crossings.size() +
                                         scan.unresolved.size())});
    }
    if (args.csv_path.empty()) {
        write_complexity_csv(std::cout, rows, stamp);
    } else {
        std::ofstream os(args.csv_path, std::ios::binary);
        if (!os) throw CLI::ValidationError("cannot open " + args.csv_path);
        write_complexity_csv(os, rows, stamp);
    }
    return kExitOk;
}

// --------------------------------------------------------------------------
// axis subcommand
// --------------------------------------------------------------------------

struct AxisArgs {
    double a = 1.0, b = 1.0;
    double coord = 0.0;
    bool minor = false;
    int n_max = 6;
};

json envelope_point_json(const EnvelopePoint& pt) {
    json j = json::object();
    if (pt.at_infinity) {
        j["at_infinity"] = 1;
        j["direction"] = pt.direction;
    } else {
        j["x"] = pt.pt.x;
        j["y"] = pt.pt.y;
        j["at_infinity"] = 0;
    }
    return j;
}

int run_axis(const AxisArgs& args) {
    const ConicTable table(args.a, args.b);
    const TableAxis axis = args.minor ? TableAxis::Minor : TableAxis::Major;

    RunStamp stamp;
    stamp.add("command", "axis");
    stamp.add("a", args.a);
    stamp.add("b", args.b);
    stamp.add(args.minor ? "y0" : "x0", args.coord);
    stamp.add("n_max", args.n_max);

    json doc = json::object();
    doc["config"] = stamp.to_json();

    const MobiusMap m = args.minor ? mobius_g(table) : mobius_f(table);
    const auto an = fixed_point_analysis(m);
    json mj = json::object();
    mj["class"] = an.cls == MobiusClass::Hyperbolic  ? "hyperbolic"
                  : an.cls == MobiusClass::Parabolic ? "parabolic"
                                                     : "elliptic";
    if (!an.fixed_points.empty()) {
        mj["fixed_points"] = an.fixed_points;
        mj["multipliers"] = an.multipliers;
    }
    if (an.cls == MobiusClass::Elliptic) {
        mj["rotation_angle"] = an.rotation_angle;
        if (an.finite_order) mj["finite_order"] = *an.finite_order;
    }
    doc["mobius"] = mj;

    doc["cusps"] = json::array();
    for (int n = 1; n <= args.n_max; ++n) {
        const auto pair = iterate_axis_cusps(table, args.coord, n, axis);
        json e = json::object();
        e["n"] = n;
        e["forward"] = envelope_point_json(pair.forward);
        e["backward"] = envelope_point_json(pair.backward);
        doc["cusps"].push_back(e);
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Caustics by reflection in circular and elliptic billiards"};
    app.require_subcommand(1);

    CausticArgs ca;
    CLI::App* cmd_caustic = app.add_subcommand(
        "caustic", "Compute the n-th caustic and its cusp report");
    cmd_caustic->add_option("--a", ca.a, "semi-major axis")->required();
    cmd_caustic->add_option("--b", ca.b, "semi-minor axis")->required();
    cmd_caustic->add_option("--source", ca.source, "source point \"x,y\"")->required();
    cmd_caustic->add_option("--n", ca.n, "number of reflections")->required();
    cmd_caustic->add_option("--samples", ca.samples, "family samples (default 4096)");
    cmd_caustic->add_option("--tol", ca.tol, "working tolerance (default 1e-6)");
    cmd_caustic->add_option("--csv", ca.csv_path, "caustic points CSV path");
    cmd_caustic->add_option("--json", ca.json_path, "cusp report JSON path");
    cmd_caustic->add_option("--svg", ca.svg_path, "optional SVG plot path");
    cmd_caustic->add_option("--viewport", ca.viewport, "xmin,xmax,ymin,ymax");
    cmd_caustic->add_flag("--degrees", ca.degrees, "angles in degrees (human inspection)");

    VerifyArgs va;
    CLI::App* cmd_verify = app.add_subcommand("verify", "Run a verification suite");
    cmd_verify->require_subcommand(1);
    CLI::App* v_circle = cmd_verify->add_subcommand("circle", "exactly four ordinary cusps");
    v_circle->add_option("--source", va.source, "source \"x,y\"")->required();
    v_circle->add_option("--radius", va.radius, "circle radius (default 1)");
    v_circle->add_option("--n-max", va.n_max, "max reflections (default 8)");
    v_circle->add_option("--samples", va.samples, "family samples");
    v_circle->add_option("--seed", va.seed, "seed for the random-ray check");

    CLI::App* v_ellipse = cmd_verify->add_subcommand("ellipse", "predicted cusps are detected");
    v_ellipse->add_option("--a", va.a, "semi-major axis")->required();
    v_ellipse->add_option("--b", va.b, "semi-minor axis")->required();
    v_ellipse->add_option("--source", va.source, "source \"x,y\"")->required();
    v_ellipse->add_option("--n-max", va.n_max, "max reflections (default 5)");
    v_ellipse->add_option("--samples", va.samples, "family samples");
    v_ellipse->add_option("--seed", va.seed, "seed for the random-ray check");

    CLI::App* v_axis = cmd_verify->add_subcommand("axis", "mirror-equation dynamics");
    v_axis->add_option("--a", va.a, "semi-major axis")->required();
    v_axis->add_option("--b", va.b, "semi-minor axis")->required();
    v_axis->add_option("--x0", va.x0, "source abscissa on the major axis")->required();
    v_axis->add_option("--n-max", va.n_max, "max reflections (default 6)");
    v_axis->add_option("--samples", va.samples, "family samples");

    CLI::App* v_refr = cmd_verify->add_subcommand("refraction", "Cayley refraction caustic");
    v_refr->add_option("--mu", va.mu, "refraction index > 1")->required();
    v_refr->add_option("--radius", va.radius, "circle radius (default 1)");
    v_refr->add_option("--samples", va.samples, "family samples");

    CLI::App* v_ext = cmd_verify->add_subcommand("external", "external light source");
    v_ext->add_option("--a", va.a, "semi-major axis")->required();
    v_ext->add_option("--b", va.b, "semi-minor axis")->required();
    v_ext->add_option("--source", va.source, "exterior source \"x,y\"")->required();
    v_ext->add_option("--n-max", va.n_max, "max reflections (default 2)");
    v_ext->add_option("--samples", va.samples, "family samples");

    ComplexityArgs xa;
    CLI::App* cmd_complexity =
        app.add_subcommand("complexity", "infinity crossings and cusp counts vs n");
    cmd_complexity->add_option("--a", xa.a, "semi-major axis")->required();
    cmd_complexity->add_option("--b", xa.b, "semi-minor axis")->required();
    cmd_complexity->add_option("--source", xa.source, "source \"x,y\"")->required();
    cmd_complexity->add_option("--n-list", xa.n_list, "explicit n values");
    cmd_complexity->add_option("--n-max", xa.n_max, "or 1..n-max");
    cmd_complexity->add_option("--samples", xa.samples, "family samples");
    cmd_complexity->add_option("--csv", xa.csv_path, "output path (default stdout)");

    AxisArgs aa;
    CLI::App* cmd_axis = app.add_subcommand("axis", "on-axis cusps via Mobius powers");
    cmd_axis->add_option("--a", aa.a, "semi-major axis")->required();
    cmd_axis->add_option("--b", aa.b, "semi-minor axis")->required();
    CLI::Option* optx = cmd_axis->add_option("--x0", aa.coord, "major-axis source");
    CLI::Option* opty = cmd_axis->add_option("--y0", aa.coord, "minor-axis source");
    optx->excludes(opty);
    cmd_axis->add_option("--n-max", aa.n_max, "max reflections (default 6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (cmd_caustic->parsed()) return run_caustic(ca);
        if (cmd_verify->parsed()) {
            if (v_circle->parsed()) return verify_circle_suite(va);
            if (v_ellipse->parsed()) return verify_ellipse_suite(va);
            if (v_axis->parsed()) return verify_axis_suite(va);
            if (v_refr->parsed()) return verify_refraction_suite(va);
            if (v_ext->parsed()) return verify_external_suite(va);
        }
        if (cmd_complexity->parsed()) return run_complexity(xa);
        if (cmd_axis->parsed()) {
            aa.minor = opty->count() > 0;
            if (optx->count() == 0 && opty->count() == 0)
                throw CLI::ValidationError("axis requires --x0 or --y0");
            return run_axis(aa);
        }
    } catch (const DegenerateSourceError& e) {
        std::cerr << "error: degenerate-source: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const FocusPointError& e) {
        std::cerr << "error: degenerate-source: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const DegeneratePencilError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GeometryError& e) {
        std::cerr << "error: computation: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
