#include "core/system.hpp"

#include <cmath>
#include <filesystem>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace stochham {

double CustomFrequencyMap::bound() const {
    double b = 0.0;
    for (double v : base) b = std::max(b, std::abs(v));
    return b * (1.0 + std::abs(amp));
}

void CustomFrequencyMap::validate() const {
    if (base.empty()) throw SpecError("custom frequency map: base must be non-empty");
    for (double v : base)
        if (!std::isfinite(v)) throw SpecError("custom frequency map: base must be finite");
    if (!std::isfinite(amp) || !std::isfinite(center))
        throw SpecError("custom frequency map: amp and center must be finite");
    if (!(width > 0.0)) throw SpecError("custom frequency map: width must be positive");
}

void CustomFrequencyMap::omega(const double* I, double* out) const {
    double mean = 0.0;
    size_t d = base.size();
    for (size_t p = 0; p < d; ++p) mean += I[p];
    mean /= static_cast<double>(d);
    double mod = 1.0 + amp * std::tanh((mean - center) / width);
    for (size_t p = 0; p < d; ++p) out[p] = base[p] * mod;
}

System System::make_pendulum(double g, double l) {
    System sys;
    sys.kind_ = SystemKind::pendulum;
    sys.dim_ = 1;
    sys.pendulum_ = Pendulum{g, l};
    sys.pendulum_omega_ = sys.pendulum_.omega(); // validates g, l > 0
    return sys;
}

System System::make_oscillator(int m, double tol, const std::string& cache_dir) {
    System sys;
    sys.kind_ = SystemKind::oscillator;
    sys.dim_ = 1;
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        std::string path =
            cache_dir + "/chart_m" + std::to_string(m) + "_tol" + strfmt("%.9g", tol) + ".txt";
        sys.chart_ = OscillatorChart::load_cache(path, m, tol);
        if (!sys.chart_) {
            sys.chart_ = OscillatorChart::build(m, tol);
            sys.chart_->save_cache(path);
        }
    } else {
        sys.chart_ = OscillatorChart::build(m, tol);
    }
    return sys;
}

System System::make_custom(CustomFrequencyMap map) {
    map.validate();
    System sys;
    sys.kind_ = SystemKind::custom;
    sys.dim_ = map.dim();
    sys.custom_ = std::move(map);
    return sys;
}

bool System::domain_ok(const double* I) const {
    for (size_t p = 0; p < dim_; ++p)
        if (!std::isfinite(I[p])) return false;
    if (kind_ == SystemKind::oscillator) return I[0] > 0.0;
    return true;
}

void System::omega(const double* I, double* out) const {
    switch (kind_) {
        case SystemKind::pendulum:
            out[0] = pendulum_omega_;
            return;
        case SystemKind::oscillator:
            out[0] = chart_->frequency(I[0]);
            return;
        case SystemKind::custom:
            custom_.omega(I, out);
            return;
    }
}

const Pendulum& System::pendulum() const {
    if (kind_ != SystemKind::pendulum) throw SpecError("system: not a pendulum");
    return pendulum_;
}

const OscillatorChart& System::chart() const {
    if (kind_ != SystemKind::oscillator) throw SpecError("system: not an oscillator");
    return *chart_;
}

const CustomFrequencyMap& System::custom() const {
    if (kind_ != SystemKind::custom) throw SpecError("system: not a custom map");
    return custom_;
}

} // namespace stochham
