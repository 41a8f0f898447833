#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dkm::cli {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string log_log_svg(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title) {
    const int width = 480, height = 360, pad = 50;
    double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log10(x[i]);
        ly[i] = std::log10(y[i]);
        lx0 = std::min(lx0, lx[i]);
        lx1 = std::max(lx1, lx[i]);
        ly0 = std::min(ly0, ly[i]);
        ly1 = std::max(ly1, ly[i]);
    }
    if (lx1 - lx0 < 1e-9) lx1 = lx0 + 1.0;
    if (ly1 - ly0 < 1e-9) ly1 = ly0 + 1.0;
    const auto px = [&](double v) { return pad + (v - lx0) / (lx1 - lx0) * (width - 2 * pad); };
    const auto py = [&](double v) { return height - pad - (v - ly0) / (ly1 - ly0) * (height - 2 * pad); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
        << title << "</text>\n";
    for (int e = static_cast<int>(std::floor(lx0)); e <= static_cast<int>(std::ceil(lx1)); ++e) {
        if (e < lx0 || e > lx1) continue;
        out << "<line x1=\"" << fmt(px(e)) << "\" y1=\"" << pad << "\" x2=\"" << fmt(px(e))
            << "\" y2=\"" << height - pad << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << fmt(px(e)) << "\" y=\"" << height - pad + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">1e" << e << "</text>\n";
    }
    for (int e = static_cast<int>(std::floor(ly0)); e <= static_cast<int>(std::ceil(ly1)); ++e) {
        if (e < ly0 || e > ly1) continue;
        out << "<line x1=\"" << pad << "\" y1=\"" << fmt(py(e)) << "\" x2=\"" << width - pad
            << "\" y2=\"" << fmt(py(e)) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << pad - 6 << "\" y=\"" << fmt(py(e) + 3)
            << "\" text-anchor=\"end\" font-size=\"10\">1e" << e << "</text>\n";
    }
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << width - 2 * pad
        << "\" height=\"" << height - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < lx.size(); ++i) out << fmt(px(lx[i])) << ',' << fmt(py(ly[i])) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < lx.size(); ++i) {
        out << "<circle cx=\"" << fmt(px(lx[i])) << "\" cy=\"" << fmt(py(ly[i]))
            << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace dkm::cli
