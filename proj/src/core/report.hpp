#pragma once
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace stochham {

using json = nlohmann::ordered_json;

inline constexpr const char* kCodeVersion = "stochham 1.0.0";

// Numbers rendered at 17 significant digits (round-trip exact for doubles).
std::string csv_num(double v);

// RFC-4180 CSV: CRLF row terminators, '.' decimal separator, fields quoted
// only when they contain a comma, quote, or newline.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void row(const std::vector<std::string>& fields);
    void close(); // flushes and throws IoError on failure

  private:
    std::ofstream out_;
    std::string path_;
};

void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

// Canonical SVG histogram: fixed 800x400 canvas, `bins` equal-width density
// bars over the sample range, and (when var > 0) the Gaussian density
// polyline for N(mean, var). All coordinates serialized at 6 significant
// digits, so the file is byte-stable for identical inputs.
void write_histogram_svg(const std::string& path, const std::vector<double>& samples, int bins,
                         double mean, double var, const std::string& title);

// Matrix/vector JSON helpers (row-major nested arrays).
json vec_json(const std::vector<double>& v);

} // namespace stochham
