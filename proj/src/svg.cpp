#include "twofold/svg.hpp"

#include "twofold/errors.hpp"

#include <cstdio>
#include <sstream>

namespace twofold {

namespace {

constexpr double kMargin = 40.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

Vec3 normalized(const Vec3& v) {
    const double n = euclidean_norm(v);
    if (!(n > 0.0)) {
        throw ContractViolation("plot axis must be non-zero");
    }
    return (1.0 / n) * v;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

const char* mode_color(ModeKind mode) {
    switch (mode) {
        case ModeKind::FlowPlus: return "#1f77b4";
        case ModeKind::FlowMinus: return "#d62728";
        case ModeKind::Sliding: return "#2ca02c";
        case ModeKind::Layer: return "#9467bd";
    }
    return "#000000";
}

const char* region_color(RegionClass r) {
    switch (r) {
        case RegionClass::Crossing: return "#dddddd";
        case RegionClass::AttractingSliding: return "#8fd18f";
        case RegionClass::RepellingSliding: return "#f2a0a0";
        case RegionClass::Tangency: return "#333333";
    }
    return "#ffffff";
}

struct Frame {
    double x0, x1, y0, y1;
    double w, h;

    double sx(double u) const { return kMargin + (u - x0) / (x1 - x0) * (w - 2 * kMargin); }
    double sy(double v) const { return h - kMargin - (v - y0) / (y1 - y0) * (h - 2 * kMargin); }
};

Frame frame_for(double x0, double x1, double y0, double y1, const PlotStyle& style) {
    auto widen = [](double& lo, double& hi) {
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
    };
    widen(x0, x1);
    widen(y0, y1);
    return {x0, x1, y0, y1, static_cast<double>(style.width), static_cast<double>(style.height)};
}

void header(std::ostringstream& out, const PlotStyle& style) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
        << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty()) {
        out << "<text x=\"" << style.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
            << style.title << "</text>\n";
    }
}

void axes(std::ostringstream& out, const Frame& f, const PlotStyle& style) {
    out << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(f.w - 2 * kMargin)
        << "\" height=\"" << num(f.h - 2 * kMargin) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(f.w / 2) << "\" y=\"" << num(f.h - 10) << "\" text-anchor=\"middle\" font-size=\"12\">"
        << style.horizontal_label << " [" << num(f.x0) << ", " << num(f.x1) << "]</text>\n";
    out << "<text x=\"12\" y=\"" << num(f.h / 2) << "\" font-size=\"12\" transform=\"rotate(-90 12 " << num(f.h / 2)
        << ")\" text-anchor=\"middle\">" << style.vertical_label << " [" << num(f.y0) << ", " << num(f.y1)
        << "]</text>\n";
}

}  // namespace

Vec2 project(const PlotStyle& style, const Vec3& x) {
    const Vec3 v = normalized(style.view);
    const Vec3 up = normalized(style.up - dot(style.up, v) * v);
    const Vec3 right = cross(up, v);
    return {dot(right, x), dot(up, x)};
}

std::string emit_plot(const Trajectory& traj, const PlotStyle& style) {
    if (traj.empty()) {
        throw ContractViolation("nothing to plot: empty trajectory");
    }
    std::vector<Vec2> pts;
    pts.reserve(traj.samples.size());
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : traj.samples) {
        pts.push_back(project(style, s.state));
        x0 = std::min(x0, pts.back()[0]);
        x1 = std::max(x1, pts.back()[0]);
        y0 = std::min(y0, pts.back()[1]);
        y1 = std::max(y1, pts.back()[1]);
    }
    const Frame f = frame_for(x0, x1, y0, y1, style);
    std::ostringstream out;
    header(out, style);
    axes(out, f, style);
    if (pts.size() == 1) {
        out << "<circle cx=\"" << num(f.sx(pts[0][0])) << "\" cy=\"" << num(f.sy(pts[0][1]))
            << "\" r=\"3\" fill=\"black\"/>\n";
    }
    // One polyline per run of equal mode; the event sample closes the run.
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
        const ModeKind mode = traj.samples[i].mode;
        std::size_t j = i + 1;
        while (j + 1 < pts.size() && traj.samples[j].mode == mode) {
            ++j;
        }
        out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << mode_color(mode) << "\" points=\"";
        for (std::size_t k = i; k <= j; ++k) {
            out << num(f.sx(pts[k][0])) << ',' << num(f.sy(pts[k][1])) << (k < j ? " " : "");
        }
        out << "\"/>\n";
        i = j;
    }
    for (const auto& e : traj.events) {
        const Vec2 p = project(style, e.state);
        out << "<circle cx=\"" << num(f.sx(p[0])) << "\" cy=\"" << num(f.sy(p[1])) << "\" r=\"2\" fill=\"black\"><title>"
            << to_string(e.kind) << "</title></circle>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string emit_plot(const SlideMap& map, const PlotStyle& style) {
    if (map.regions.empty()) {
        throw ContractViolation("nothing to plot: empty slide map");
    }
    const Frame f = frame_for(map.lo, map.hi, map.lo, map.hi, style);
    std::ostringstream out;
    header(out, style);
    const double cell = (map.hi - map.lo) / (map.steps - 1);
    for (int j = 0; j < map.steps; ++j) {
        for (int i = 0; i < map.steps; ++i) {
            const auto r = map.regions[static_cast<std::size_t>(j * map.steps + i)];
            const double u = map.coordinate(i) - 0.5 * cell;
            const double v = map.coordinate(j) + 0.5 * cell;
            out << "<rect x=\"" << num(f.sx(u)) << "\" y=\"" << num(f.sy(v)) << "\" width=\""
                << num(f.sx(u + cell) - f.sx(u)) << "\" height=\"" << num(f.sy(v - cell) - f.sy(v)) << "\" fill=\""
                << region_color(r) << "\"/>\n";
        }
    }
    PlotStyle labels = style;
    labels.horizontal_label = "x2";
    labels.vertical_label = "x3";
    axes(out, f, labels);
    out << "</svg>\n";
    return out.str();
}

}  // namespace twofold
