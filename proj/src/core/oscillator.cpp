#include "core/oscillator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/format.hpp"
#include "core/ode.hpp"
#include "core/quadrature.hpp"

namespace stochham {

namespace {

constexpr double kSafetyHorizon = 200.0; // upper bound on one period, any m

double ipow_odd(double x, int m) {
    // x^(2m+1) with integer exponent, no pow() in the ODE right-hand side.
    double x2 = x * x;
    double r = x;
    for (int i = 0; i < m; ++i) r *= x2;
    return r;
}

} // namespace

double t_star_quadrature(int m, double tol) {
    if (m < 1) throw SpecError("t_star_quadrature: m must be >= 1");
    // Quarter period = sqrt(m+1) * integral_0^1 dx / sqrt(1 - x^(2m+2));
    // substitute x = 1 - s^2 to remove the endpoint singularity:
    // integrand becomes 2 / sqrt(sum_{j=0}^{2m+1} (1 - s^2)^j), smooth on [0,1].
    int terms = 2 * m + 2;
    auto f = [terms](double s) {
        double base = 1.0 - s * s;
        double sum = 0.0;
        double p = 1.0;
        for (int j = 0; j < terms; ++j) {
            sum += p;
            p *= base;
        }
        return 2.0 / std::sqrt(sum);
    };
    double quarter = std::sqrt(static_cast<double>(m + 1)) * adaptive_simpson(f, 0.0, 1.0, tol);
    return 4.0 * quarter;
}

void OscillatorChart::derive_constants() {
    alpha_ = 1.0 / (m_ + 2);
    beta_ = 1.0 - alpha_;
    c_ = static_cast<double>(m_ + 2) / t_star_;
}

std::shared_ptr<const OscillatorChart> OscillatorChart::build(int m, double tol) {
    if (m < 1) throw SpecError("oscillator chart: m must be >= 1");
    if (!(tol > 0.0)) throw SpecError("oscillator chart: tol must be positive");
    auto chart = std::shared_ptr<OscillatorChart>(new OscillatorChart());
    chart->m_ = m;
    chart->tol_ = tol;

    Dop853::Rhs rhs = [m](double, const double* w, double* dw) {
        dw[0] = w[1];
        dw[1] = -ipow_odd(w[0], m);
    };
    double ode_tol = std::min(tol * 1e-2, 1e-12);
    Dop853 ode(2, rhs, ode_tol, ode_tol);

    // Minimal period of the reference orbit from (1, 0): the orbit leaves the
    // section {y = 0} downward, crosses it once at the half period (where
    // x = -1), and returns at the full period; skip the half-period crossing.
    std::vector<double> w = {1.0, 0.0};
    double t_star = ode.integrate_to_event(
        0.0, kSafetyHorizon, w, [](const double* s) { return s[1]; }, 1);
    if (!(w[0] > 0.0))
        throw NumericError("oscillator chart: section return landed at x <= 0");
    chart->t_star_ = t_star;
    chart->derive_constants();

    // Dense reference-orbit table over one period.
    std::vector<double> w0 = {1.0, 0.0};
    std::vector<std::vector<double>> snaps;
    Dop853 ode2(2, rhs, ode_tol, ode_tol);
    ode2.integrate_snapshots(0.0, t_star, w0, kNodes + 1, snaps);
    chart->node_x_.resize(snaps.size());
    chart->node_y_.resize(snaps.size());
    for (size_t j = 0; j < snaps.size(); ++j) {
        chart->node_x_[j] = snaps[j][0];
        chart->node_y_[j] = snaps[j][1];
    }

    double e0 = 1.0 / (2.0 * m + 2.0);
    double drift = 0.0;
    for (size_t j = 0; j < snaps.size(); ++j) {
        double h = chart->hamiltonian(chart->node_x_[j], chart->node_y_[j]);
        drift = std::max(drift, std::abs(h - e0));
    }
    chart->energy_drift_ = drift;
    if (drift > tol)
        throw NumericError("oscillator chart: energy drift " + g17(drift) +
                           " exceeds tolerance " + g17(tol));
    return chart;
}

double OscillatorChart::hamiltonian(double x, double y) const {
    double xp = 1.0;
    for (int i = 0; i < 2 * m_ + 2; ++i) xp *= x;
    return 0.5 * y * y + xp / (2.0 * m_ + 2.0);
}

namespace {

inline double hermite(double f0, double f1, double d0, double d1, double h, double u) {
    double u2 = u * u, u3 = u2 * u;
    return (2.0 * u3 - 3.0 * u2 + 1.0) * f0 + (u3 - 2.0 * u2 + u) * h * d0 +
           (-2.0 * u3 + 3.0 * u2) * f1 + (u3 - u2) * h * d1;
}

} // namespace

double OscillatorChart::C(double s) const {
    double p = s - std::floor(s / t_star_) * t_star_;
    double hcell = t_star_ / kNodes;
    int j = static_cast<int>(p / hcell);
    if (j >= kNodes) j = kNodes - 1;
    double u = (p - j * hcell) / hcell;
    // C' = S exactly along the reference orbit.
    return hermite(node_x_[j], node_x_[j + 1], node_y_[j], node_y_[j + 1], hcell, u);
}

double OscillatorChart::S(double s) const {
    double p = s - std::floor(s / t_star_) * t_star_;
    double hcell = t_star_ / kNodes;
    int j = static_cast<int>(p / hcell);
    if (j >= kNodes) j = kNodes - 1;
    double u = (p - j * hcell) / hcell;
    // S' = -C^(2m+1) exactly along the reference orbit.
    double d0 = -ipow_odd(node_x_[j], m_);
    double d1 = -ipow_odd(node_x_[j + 1], m_);
    return hermite(node_y_[j], node_y_[j + 1], d0, d1, hcell, u);
}

void OscillatorChart::to_cartesian(double I, double theta, double& x, double& y) const {
    if (!(I > 0.0)) throw DomainError("oscillator chart: action must be positive");
    double s = theta * t_star_;
    x = std::pow(c_ * I, alpha_) * C(s);
    y = std::pow(c_, beta_) * std::pow(I, beta_) * S(s);
}

double OscillatorChart::frequency(double I) const {
    if (!(I > 0.0)) throw DomainError("oscillator chart: action must be positive");
    return beta_ * std::pow(c_, 2.0 * beta_) * std::pow(I, 2.0 * beta_ - 1.0) / (m_ + 1);
}

double OscillatorChart::energy_of_action(double I) const {
    if (!(I > 0.0)) throw DomainError("oscillator chart: action must be positive");
    return std::pow(c_ * I, 2.0 * beta_) / (2.0 * m_ + 2.0);
}

double OscillatorChart::amplitude_of_action(double I) const {
    if (!(I > 0.0)) throw DomainError("oscillator chart: action must be positive");
    return std::pow(c_ * I, alpha_);
}

double OscillatorChart::measure_period(double I) const {
    double amplitude = amplitude_of_action(I);
    int m = m_;
    Dop853::Rhs rhs = [m](double, const double* w, double* dw) {
        dw[0] = w[1];
        dw[1] = -ipow_odd(w[0], m);
    };
    double ode_tol = std::min(tol_ * 1e-2, 1e-12);
    Dop853 ode(2, rhs, ode_tol, ode_tol);
    std::vector<double> w = {amplitude, 0.0};
    // Scaling law T(A) = T_star * A^(-m) bounds the horizon.
    double expect = t_star_ * std::pow(amplitude, -static_cast<double>(m));
    return ode.integrate_to_event(
        0.0, 3.0 * expect, w, [](const double* s) { return s[1]; }, 1);
}

void OscillatorChart::save_cache(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("oscillator chart: cannot write cache file " + path);
    out << "stochham-chart v1\n";
    out << "m " << m_ << "\n";
    out << "tol " << g17(tol_) << "\n";
    out << "t_star " << g17(t_star_) << "\n";
    out << "energy_drift " << g17(energy_drift_) << "\n";
    out << "nodes " << node_x_.size() << "\n";
    for (size_t j = 0; j < node_x_.size(); ++j)
        out << g17(node_x_[j]) << " " << g17(node_y_[j]) << "\n";
    if (!out) throw IoError("oscillator chart: failed writing cache file " + path);
}

std::shared_ptr<const OscillatorChart> OscillatorChart::load_cache(const std::string& path,
                                                                   int m, double tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    std::string line;
    if (!std::getline(in, line) || line != "stochham-chart v1") return nullptr;
    auto chart = std::shared_ptr<OscillatorChart>(new OscillatorChart());
    std::string key;
    size_t count = 0;
    in >> key >> chart->m_;
    if (key != "m") return nullptr;
    in >> key >> chart->tol_;
    if (key != "tol") return nullptr;
    in >> key >> chart->t_star_;
    if (key != "t_star") return nullptr;
    in >> key >> chart->energy_drift_;
    if (key != "energy_drift") return nullptr;
    in >> key >> count;
    if (key != "nodes" || count != static_cast<size_t>(kNodes) + 1) return nullptr;
    if (chart->m_ != m || chart->tol_ != tol) return nullptr;
    chart->node_x_.resize(count);
    chart->node_y_.resize(count);
    for (size_t j = 0; j < count; ++j) {
        if (!(in >> chart->node_x_[j] >> chart->node_y_[j])) return nullptr;
    }
    chart->derive_constants();
    return chart;
}

} // namespace stochham
