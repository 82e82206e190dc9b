#pragma once
/**
 * @file io.hpp
 * @brief Deterministic exports: CSV caustic points, JSON cusp reports, and
 *        SVG plots with explicit viewports.
 *
 * All floating-point output is locale-independent. CSV uses 17 significant
 * digits (exact double round-trip); JSON uses the serializer's shortest
 * round-trip form. Points at infinity are written as direction-only
 * markers, never as large coordinates. File headers echo the generating
 * configuration; no timestamps.
 */

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "caustics/caustic.hpp"
#include "caustics/cusps.hpp"

namespace caustics {

using json = nlohmann::ordered_json;

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Key-value pairs describing a run, echoed into every output header.
struct RunStamp {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) {
        entries.emplace_back(key, value);
    }
    void add(const std::string& key, double value) { add(key, format_g17(value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }

    std::string line() const {
        std::string out;
        for (const auto& [k, v] : entries) {
            if (!out.empty()) out += ' ';
            out += k + '=' + v;
        }
        return out;
    }
    json to_json() const {
        json j = json::object();
        for (const auto& [k, v] : entries) j[k] = v;
        return j;
    }
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Columns: s, alpha, p, x, y, H, at_infinity. x and y are left empty on
/// at-infinity rows (alpha is the direction of escape).
inline void write_caustic_csv(std::ostream& os, const Caustic& c,
                              const RunStamp& stamp, bool degrees = false) {
    const double ascale = degrees ? 180.0 / kPi : 1.0;
    os << "# caustic-points " << stamp.line() << "\n";
    os << "s,alpha,p,x,y,H,at_infinity\n";
    for (const auto& s : c.samples) {
        os << format_g17(s.s * ascale) << ',' << format_g17(s.jet.alpha * ascale)
           << ',' << format_g17(s.jet.p) << ',';
        if (s.gamma.at_infinity)
            os << ",";
        else
            os << format_g17(s.gamma.pt.x) << ',' << format_g17(s.gamma.pt.y);
        os << ',' << format_g17(s.H) << ',' << (s.gamma.at_infinity ? 1 : 0) << "\n";
    }
}

/// Rows: n, infinity_crossings, cusp_count, unresolved.
inline void write_complexity_csv(
    std::ostream& os, const std::vector<std::array<int, 4>>& rows,
    const RunStamp& stamp) {
    os << "# caustic-complexity " << stamp.line() << "\n";
    os << "n,infinity_crossings,cusp_count,unresolved\n";
    for (const auto& r : rows)
        os << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << "\n";
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json cusp_to_json(const Cusp& cusp, bool degrees = false) {
    const double ascale = degrees ? 180.0 / kPi : 1.0;
    json j = json::object();
    j["s"] = cusp.s * ascale;
    if (cusp.location.at_infinity) {
        j["at_infinity"] = 1;
        j["direction"] = cusp.location.direction * ascale;
    } else {
        j["x"] = cusp.location.pt.x;
        j["y"] = cusp.location.pt.y;
        j["at_infinity"] = 0;
    }
    if (cusp.order)
        j["order"] = *cusp.order;
    else
        j["order"] = "unresolved";
    j["lambda"] = cusp.lambda_tag;
    j["predicted"] = cusp.predicted;
    if (cusp.match_distance >= 0.0)
        j["match_distance"] = cusp.match_distance;
    else
        j["match_distance"] = nullptr;
    return j;
}

inline json cusp_report_json(const CuspScan& scan, const RunStamp& stamp,
                             bool degrees = false) {
    json j = json::object();
    j["config"] = stamp.to_json();
    j["cusps"] = json::array();
    for (const Cusp& cusp : scan.cusps) j["cusps"].push_back(cusp_to_json(cusp, degrees));
    j["unresolved_roots"] = json::array();
    for (const auto& u : scan.unresolved) {
        json e = json::object();
        e["s"] = u.s;
        e["H"] = u.H;
        j["unresolved_roots"].push_back(e);
    }
    return j;
}

inline json prediction_report_json(const PredictionReport& rep, const RunStamp& stamp,
                                bool degrees = false) {
    json j = cusp_report_json(rep.detected, stamp, degrees);
    j["predicted"] = json::array();
    for (int i = 0; i < 4; ++i) {
        const auto& pc = rep.predicted[i];
        json e = json::object();
        if (pc.location.at_infinity) {
            e["at_infinity"] = 1;
            e["direction"] = pc.location.direction;
        } else {
            e["x"] = pc.location.pt.x;
            e["y"] = pc.location.pt.y;
            e["at_infinity"] = 0;
        }
        e["lambda"] = pc.conic.lambda;
        e["matched"] = rep.matches[i].detected_index >= 0;
        if (rep.matches[i].detected_index >= 0)
            e["match_distance"] = rep.matches[i].distance;
        j["predicted"].push_back(e);
    }
    j["tolerance"] = rep.tolerance;
    j["all_predictions_matched"] = rep.pass;
    return j;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct Viewport {
    double xmin{-2.0}, xmax{2.0}, ymin{-2.0}, ymax{2.0};

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

/// Liang-Barsky segment clip against the viewport; false if fully outside.
inline bool clip_segment(const Viewport& vp, Point& a, Point& b) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - vp.xmin, vp.xmax - a.x, a.y - vp.ymin, vp.ymax - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
    }
    const Point na{a.x + t0 * dx, a.y + t0 * dy};
    const Point nb{a.x + t1 * dx, a.y + t1 * dy};
    a = na;
    b = nb;
    return true;
}

}  // namespace detail

/**
 * SVG plot: the table outline, the caustic polyline (split at infinity
 * crossings and clipped to the viewport), cusp markers, and the source.
 * Fixed 800-unit width; deterministic output.
 */
inline void write_caustic_svg(std::ostream& os, const Caustic& c,
                              const std::vector<Cusp>& cusps, const Viewport& vp,
                              const RunStamp& stamp) {
    const double W = 800.0;
    const double scale = W / vp.width();
    const double H = vp.height() * scale;
    auto X = [&](double x) { return (x - vp.xmin) * scale; };
    auto Y = [&](double y) { return (vp.ymax - y) * scale; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(W)
       << "\" height=\"" << detail::svg_num(H) << "\" viewBox=\"0 0 "
       << detail::svg_num(W) << ' ' << detail::svg_num(H) << "\">\n";
    os << "<!-- " << stamp.line() << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (c.table) {
        os << "<ellipse cx=\"" << detail::svg_num(X(0.0)) << "\" cy=\""
           << detail::svg_num(Y(0.0)) << "\" rx=\"" << detail::svg_num(c.table->a() * scale)
           << "\" ry=\"" << detail::svg_num(c.table->b() * scale)
           << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1.5\"/>\n";
    }

    // Caustic: consecutive finite samples, segment-clipped; breaks at
    // infinity markers and at the clipping boundary.
    std::string path;
    bool open = false;
    auto flush = [&]() {
        if (open && !path.empty())
            os << "<polyline fill=\"none\" stroke=\"#1060c0\" stroke-width=\"1\" points=\""
               << path << "\"/>\n";
        path.clear();
        open = false;
    };
    const std::size_t N = c.samples.size();
    const std::size_t segs = c.closed ? N : N - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        const auto& g0 = c.samples[i].gamma;
        const auto& g1 = c.samples[(i + 1) % N].gamma;
        if (g0.at_infinity || g1.at_infinity) {
            flush();
            continue;
        }
        Point a = g0.pt, b = g1.pt;
        if (!detail::clip_segment(vp, a, b)) {
            flush();
            continue;
        }
        if (!open) {
            path += detail::svg_num(X(a.x)) + "," + detail::svg_num(Y(a.y));
            open = true;
        }
        path += " " + detail::svg_num(X(b.x)) + "," + detail::svg_num(Y(b.y));
        // A clipped exit point ends the current polyline.
        if (b.x != c.samples[(i + 1) % N].gamma.pt.x ||
            b.y != c.samples[(i + 1) % N].gamma.pt.y)
            flush();
    }
    flush();

    for (const Cusp& cusp : cusps) {
        if (cusp.location.at_infinity) continue;
        const Point& pt = cusp.location.pt;
        if (pt.x < vp.xmin || pt.x > vp.xmax || pt.y < vp.ymin || pt.y > vp.ymax)
            continue;
        os << "<circle cx=\"" << detail::svg_num(X(pt.x)) << "\" cy=\""
           << detail::svg_num(Y(pt.y))
           << "\" r=\"4\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\"/>\n";
    }

    os << "<circle cx=\"" << detail::svg_num(X(c.source.x)) << "\" cy=\""
       << detail::svg_num(Y(c.source.y)) << "\" r=\"3\" fill=\"#208020\"/>\n";
    os << "</svg>\n";
}

}  // namespace caustics
