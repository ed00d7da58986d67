#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "polyflow/error.hpp"
#include "polyflow/geometry.hpp"
#include "polyflow/io.hpp"

namespace polyflow {

/// World-coordinate window mapped onto the picture. Keep one per run so
/// frames are comparable.
struct Viewport {
    double xmin = -1.0;
    double ymin = -1.0;
    double xmax = 1.0;
    double ymax = 1.0;

    static Viewport around(const Polygon& p, double margin = 0.1) {
        const auto w = vertices(p);
        Viewport v{w[0].x, w[0].y, w[0].x, w[0].y};
        for (const Vec2& q : w) {
            v.xmin = std::min(v.xmin, q.x);
            v.xmax = std::max(v.xmax, q.x);
            v.ymin = std::min(v.ymin, q.y);
            v.ymax = std::max(v.ymax, q.y);
        }
        const double pad = margin * std::max(v.xmax - v.xmin, v.ymax - v.ymin);
        return {v.xmin - pad, v.ymin - pad, v.xmax + pad, v.ymax + pad};
    }
};

struct Caption {
    double t = 0.0;
    double area = 0.0;
    double length = 0.0;
};

/// Path data stays in math coordinates; a group transform flips y for the
/// screen.
inline std::string svg_document(const Polygon& p, const Viewport& view, const Caption& caption,
                                double pixels = 512.0) {
    if (!validate(p).valid()) throw Error(Errc::InvalidPolygon, "refusing to render an invalid polygon");
    const auto w = vertices(p);
    const double span = std::max(view.xmax - view.xmin, view.ymax - view.ymin);
    const double s = pixels / span;
    const double width = s * (view.xmax - view.xmin);
    const double height = s * (view.ymax - view.ymin);
    const double caption_height = 24.0;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(width) << "\" height=\""
        << format_double(height + caption_height) << "\" viewBox=\"0 0 " << format_double(width) << ' '
        << format_double(height + caption_height) << "\">\n";
    out << "<!-- vertices (math coordinates):";
    for (const Vec2& q : w) out << " (" << format_double(q.x) << ", " << format_double(q.y) << ')';
    out << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g transform=\"matrix(" << format_double(s) << " 0 0 " << format_double(-s) << ' '
        << format_double(-s * view.xmin) << ' ' << format_double(s * view.ymax) << ")\">\n";
    out << "<path d=\"M " << format_double(w[0].x) << ' ' << format_double(w[0].y);
    for (std::size_t i = 1; i < w.size(); ++i) out << " L " << format_double(w[i].x) << ' ' << format_double(w[i].y);
    out << " Z\" fill=\"#cfe2f3\" stroke=\"#1f4e79\" stroke-width=\"" << format_double(1.5 / s) << "\"/>\n";
    for (const Vec2& q : w) {
        out << "<circle cx=\"" << format_double(q.x) << "\" cy=\"" << format_double(q.y) << "\" r=\""
            << format_double(3.0 / s) << "\" fill=\"#c00000\"/>\n";
    }
    out << "</g>\n";
    out << "<text x=\"8\" y=\"" << format_double(height + 17.0) << "\" font-family=\"monospace\" font-size=\"13\">"
        << "t=" << format_double(caption.t) << " area=" << format_double(caption.area)
        << " length=" << format_double(caption.length) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

inline void render_svg(const Polygon& p, const Viewport& view, const std::filesystem::path& path,
                       const Caption& caption) {
    const std::string doc = svg_document(p, view, caption);
    std::ofstream out(path);
    if (!out) throw Error(Errc::IOFailure, "cannot write " + path.string());
    out << doc;
    if (!out) throw Error(Errc::IOFailure, "write failed for " + path.string());
}

inline void render_svg(const Polygon& p, const Viewport& view, const std::filesystem::path& path) {
    render_svg(p, view, path, Caption{0.0, area(p), total_length(p)});
}

}  // namespace polyflow
