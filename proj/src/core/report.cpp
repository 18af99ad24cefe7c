#include "core/report.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace stochham {

std::string csv_num(double v) {
    return g17(v);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") != std::string::npos) {
            out_ << '"';
            for (char c : f) {
                if (c == '"') out_ << '"';
                out_ << c;
            }
            out_ << '"';
        } else {
            out_ << f;
        }
    }
    out_ << "\r\n";
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw IoError("failed writing " + path_);
    out_.close();
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

json vec_json(const std::vector<double>& v) {
    json j = json::array();
    for (double x : v) j.push_back(x);
    return j;
}

void write_histogram_svg(const std::string& path, const std::vector<double>& samples, int bins,
                         double mean, double var, const std::string& title) {
    if (samples.empty()) throw SpecError("histogram: empty sample");
    if (bins < 2) throw SpecError("histogram: need at least 2 bins");
    const double width = 800.0, height = 400.0, ml = 55.0, mr = 15.0, mt = 30.0, mb = 35.0;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    double sd = var > 0.0 ? std::sqrt(var) : 0.0;
    double lo = *std::min_element(samples.begin(), samples.end());
    double hi = *std::max_element(samples.begin(), samples.end());
    if (sd > 0.0) {
        lo = std::min(lo, mean - 4.0 * sd);
        hi = std::max(hi, mean + 4.0 * sd);
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    double bin_w = (hi - lo) / bins;
    std::vector<double> density(static_cast<size_t>(bins), 0.0);
    for (double x : samples) {
        int b = static_cast<int>((x - lo) / bin_w);
        b = std::clamp(b, 0, bins - 1);
        density[static_cast<size_t>(b)] += 1.0;
    }
    double n = static_cast<double>(samples.size());
    for (double& d : density) d /= n * bin_w;

    double y_max = 0.0;
    for (double d : density) y_max = std::max(y_max, d);
    if (sd > 0.0) y_max = std::max(y_max, 1.0 / (sd * std::sqrt(2.0 * M_PI)));
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.08;

    auto sx = [&](double x) { return ml + (x - lo) / (hi - lo) * plot_w; };
    auto sy = [&](double y) { return mt + plot_h - y / y_max * plot_h; };
    auto c6 = [](double v) { return g6(v); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
         "viewBox=\"0 0 800 400\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"400\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"14\" fill=\"#222222\">" +
         title + "</text>\n";
    for (int b = 0; b < bins; ++b) {
        double x0 = sx(lo + b * bin_w);
        double x1 = sx(lo + (b + 1) * bin_w);
        double y = sy(density[static_cast<size_t>(b)]);
        s += "<rect x=\"" + c6(x0) + "\" y=\"" + c6(y) + "\" width=\"" + c6(x1 - x0) +
             "\" height=\"" + c6(mt + plot_h - y) + "\" fill=\"#9ecae1\" stroke=\"#6baed6\" "
             "stroke-width=\"0.5\"/>\n";
    }
    if (sd > 0.0) {
        s += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
        const int pts = 200;
        for (int i = 0; i <= pts; ++i) {
            double x = lo + (hi - lo) * static_cast<double>(i) / pts;
            double z = (x - mean) / sd;
            double y = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
            if (i) s += " ";
            s += c6(sx(x)) + "," + c6(sy(y));
        }
        s += "\"/>\n";
    }
    // Axes and tick labels (5 x-ticks, 4 y-ticks).
    s += "<line x1=\"" + c6(ml) + "\" y1=\"" + c6(mt + plot_h) + "\" x2=\"" + c6(ml + plot_w) +
         "\" y2=\"" + c6(mt + plot_h) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + c6(ml) + "\" y1=\"" + c6(mt) + "\" x2=\"" + c6(ml) + "\" y2=\"" +
         c6(mt + plot_h) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double x = lo + (hi - lo) * i / 4.0;
        s += "<text x=\"" + c6(sx(x)) + "\" y=\"" + c6(mt + plot_h + 18.0) +
             "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\" "
             "fill=\"#333333\">" +
             g6(x) + "</text>\n";
    }
    for (int i = 0; i <= 3; ++i) {
        double y = y_max * i / 3.0;
        s += "<text x=\"" + c6(ml - 6.0) + "\" y=\"" + c6(sy(y) + 4.0) +
             "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" "
             "fill=\"#333333\">" +
             g6(y) + "</text>\n";
    }
    s += "</svg>\n";
    write_text_file(path, s);
}

} // namespace stochham
