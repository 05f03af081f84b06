#include "segmenter/svg.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "segmenter/textio.hpp"

namespace segmenter {

namespace {

// Golden-angle hue stepping keeps neighboring labels visually distinct.
std::string cluster_color(int label) {
    int hue = (label * 137) % 360;
    int light = 38 + (label % 3) * 9;
    return "hsl(" + std::to_string(hue) + ",64%," + std::to_string(light) + "%)";
}

std::string num(double v) {
    // two decimals is plenty for pixel coordinates
    double r = v >= 0 ? v : -v;
    long long scaled = static_cast<long long>(r * 100.0 + 0.5);
    std::string s = std::to_string(scaled / 100) + "." + (scaled % 100 < 10 ? "0" : "") +
                    std::to_string(scaled % 100);
    return v < 0 ? "-" + s : s;
}

}  // namespace

std::string embedding_scatter_svg(const Embedding& e, const ClusterAssignment& a) {
    int n = e.coords.rows;
    if (static_cast<int>(a.labels.size()) != n)
        throw std::invalid_argument("assignment does not match embedding");

    constexpr double kWidth = 920, kHeight = 640, kMargin = 40, kPlotWidth = 660;
    double xmin = e.coords(0, 0), xmax = xmin, ymin = e.coords(0, 1), ymax = ymin;
    for (int i = 0; i < n; ++i) {
        xmin = std::min(xmin, e.coords(i, 0));
        xmax = std::max(xmax, e.coords(i, 0));
        ymin = std::min(ymin, e.coords(i, 1));
        ymax = std::max(ymax, e.coords(i, 1));
    }
    double xspan = std::max(xmax - xmin, 1e-9);
    double yspan = std::max(ymax - ymin, 1e-9);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"white\"/>\n";

    for (int i = 0; i < n; ++i) {
        double px = kMargin + (e.coords(i, 0) - xmin) / xspan * (kPlotWidth - 2 * kMargin);
        double py = kHeight - kMargin - (e.coords(i, 1) - ymin) / yspan * (kHeight - 2 * kMargin);
        svg += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) +
               "\" r=\"3\" fill-opacity=\"0.75\" fill=\"" + cluster_color(a.labels[i]) + "\"/>\n";
    }

    constexpr int kMaxLegend = 12;
    int shown = std::min(a.n_clusters(), kMaxLegend);
    double lx = kPlotWidth + 20, ly = kMargin;
    svg += "<text x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" font-family=\"sans-serif\" "
           "font-size=\"14\" fill=\"#333\">" + std::to_string(n) + " points, " +
           std::to_string(a.n_clusters()) + " clusters</text>\n";
    for (int k = 0; k < shown; ++k) {
        double y = ly + 24 + k * 22;
        svg += "<rect x=\"" + num(lx) + "\" y=\"" + num(y - 11) +
               "\" width=\"13\" height=\"13\" fill=\"" + cluster_color(k) + "\"/>\n";
        svg += "<text x=\"" + num(lx + 20) + "\" y=\"" + num(y) +
               "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333\">cluster " +
               std::to_string(k) + " (" + std::to_string(a.cluster_sizes[k]) + " pts)</text>\n";
    }
    if (a.n_clusters() > shown) {
        double y = ly + 24 + shown * 22;
        svg += "<text x=\"" + num(lx) + "\" y=\"" + num(y) +
               "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#666\">+" +
               std::to_string(a.n_clusters() - shown) + " smaller clusters</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace segmenter
