#pragma once
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace stochham {

// A finite-activity jump intensity on a compact interval, represented as a
// piecewise-linear function through (x, y) nodes. The y values are intensity
// (jumps per unit time per unit length), so the integral over the support is
// the total jump rate. Built-ins: uniform (2 nodes), triangular (3 nodes),
// tabulated (caller-supplied nodes, linearly interpolated).
class PiecewiseLinearDensity {
  public:
    PiecewiseLinearDensity() = default;
    PiecewiseLinearDensity(std::vector<double> x, std::vector<double> y);

    static PiecewiseLinearDensity uniform(double lo, double hi, double total_mass);
    static PiecewiseLinearDensity triangular(double lo, double peak, double hi,
                                             double total_mass);
    // Tabulated nodes, rescaled so the integral equals total_mass when
    // total_mass > 0 (total_mass <= 0 keeps the tabulated scale).
    static PiecewiseLinearDensity tabulated(std::vector<double> x, std::vector<double> y,
                                            double total_mass);

    bool empty() const { return x_.empty(); }
    double total_mass() const { return total_mass_; }
    double support_lo() const { return x_.front(); }
    double support_hi() const { return x_.back(); }
    double support_radius() const;
    const std::vector<double>& nodes_x() const { return x_; }
    const std::vector<double>& nodes_y() const { return y_; }

    double value(double x) const;

    // Exact closed-form moments of the intensity (per unit time):
    // integral of z^p * rho(z) dz over the support, p = 0, 1, 2.
    double moment(int p) const;

    // One jump size from the normalized law rho / total_mass, by exact
    // inversion of the per-cell quadratic CDF. Consumes one uniform draw.
    double sample(Stream& rng) const;

  private:
    void finalize();

    std::vector<double> x_, y_;
    std::vector<double> cum_mass_; // cumulative mass at cell right edges
    double total_mass_ = 0.0;
};

} // namespace stochham
