#include "core/density.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace stochham {

PiecewiseLinearDensity::PiecewiseLinearDensity(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    finalize();
}

void PiecewiseLinearDensity::finalize() {
    if (x_.size() != y_.size())
        throw SpecError("jump density: node abscissae and values differ in length");
    if (x_.size() < 2) throw SpecError("jump density: needs at least two nodes");
    for (size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
            throw SpecError("jump density: non-finite node at index " + std::to_string(i));
        if (y_[i] < 0.0)
            throw SpecError("jump density: negative value at index " + std::to_string(i));
        if (i > 0 && !(x_[i] > x_[i - 1]))
            throw SpecError("jump density: abscissae must be strictly increasing (index " +
                            std::to_string(i) + ")");
    }
    cum_mass_.assign(x_.size() - 1, 0.0);
    double acc = 0.0;
    for (size_t c = 0; c + 1 < x_.size(); ++c) {
        acc += 0.5 * (y_[c] + y_[c + 1]) * (x_[c + 1] - x_[c]);
        cum_mass_[c] = acc;
    }
    total_mass_ = acc;
    if (!(total_mass_ > 0.0)) throw SpecError("jump density: total mass must be positive");
}

PiecewiseLinearDensity PiecewiseLinearDensity::uniform(double lo, double hi, double total_mass) {
    if (!(hi > lo)) throw SpecError("uniform jump density: needs hi > lo");
    if (!(total_mass > 0.0)) throw SpecError("uniform jump density: mass must be positive");
    double level = total_mass / (hi - lo);
    return PiecewiseLinearDensity({lo, hi}, {level, level});
}

PiecewiseLinearDensity PiecewiseLinearDensity::triangular(double lo, double peak, double hi,
                                                          double total_mass) {
    if (!(lo < peak && peak < hi))
        throw SpecError("triangular jump density: needs lo < peak < hi");
    if (!(total_mass > 0.0)) throw SpecError("triangular jump density: mass must be positive");
    double height = 2.0 * total_mass / (hi - lo);
    return PiecewiseLinearDensity({lo, peak, hi}, {0.0, height, 0.0});
}

PiecewiseLinearDensity PiecewiseLinearDensity::tabulated(std::vector<double> x,
                                                         std::vector<double> y,
                                                         double total_mass) {
    PiecewiseLinearDensity d(std::move(x), std::move(y));
    if (total_mass > 0.0) {
        double scale = total_mass / d.total_mass_;
        for (double& v : d.y_) v *= scale;
        d.finalize();
    }
    return d;
}

double PiecewiseLinearDensity::support_radius() const {
    return std::max(std::abs(support_lo()), std::abs(support_hi()));
}

double PiecewiseLinearDensity::value(double x) const {
    if (empty() || x < x_.front() || x > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    size_t c = it == x_.begin() ? 0 : static_cast<size_t>(it - x_.begin()) - 1;
    if (c + 1 >= x_.size()) c = x_.size() - 2;
    double t = (x - x_[c]) / (x_[c + 1] - x_[c]);
    return y_[c] + t * (y_[c + 1] - y_[c]);
}

double PiecewiseLinearDensity::moment(int p) const {
    // On a cell with y(x) = y0 + s (x - x0), integrate x^p y(x) dx exactly.
    double acc = 0.0;
    for (size_t c = 0; c + 1 < x_.size(); ++c) {
        double x0 = x_[c], x1 = x_[c + 1];
        double y0 = y_[c], y1 = y_[c + 1];
        double dx = x1 - x0;
        double s = (y1 - y0) / dx;
        double b = y0 - s * x0; // y(x) = s x + b
        auto ipow = [](double v, int k) {
            double r = 1.0;
            for (int i = 0; i < k; ++i) r *= v;
            return r;
        };
        // integral of x^p (s x + b) = s x^{p+2}/(p+2) + b x^{p+1}/(p+1)
        acc += s * (ipow(x1, p + 2) - ipow(x0, p + 2)) / (p + 2) +
               b * (ipow(x1, p + 1) - ipow(x0, p + 1)) / (p + 1);
    }
    return acc;
}

double PiecewiseLinearDensity::sample(Stream& rng) const {
    double target = rng.uniform01() * total_mass_;
    auto it = std::lower_bound(cum_mass_.begin(), cum_mass_.end(), target);
    size_t c = it == cum_mass_.end() ? cum_mass_.size() - 1
                                     : static_cast<size_t>(it - cum_mass_.begin());
    double below = c == 0 ? 0.0 : cum_mass_[c - 1];
    double u = target - below; // mass to cover inside cell c
    double x0 = x_[c], x1 = x_[c + 1];
    double y0 = y_[c];
    double dx = x1 - x0;
    double s = (y_[c + 1] - y0) / dx;
    // Solve y0 t + s t^2 / 2 = u for t in [0, dx]; the sqrt form is stable
    // for all admissible (y0, s) including y0 = 0.
    double disc = y0 * y0 + 2.0 * s * u;
    if (disc < 0.0) disc = 0.0;
    double denom = y0 + std::sqrt(disc);
    double t;
    if (denom > 0.0) {
        t = 2.0 * u / denom;
    } else {
        t = 0.0;
    }
    if (t > dx) t = dx;
    return x0 + t;
}

} // namespace stochham
