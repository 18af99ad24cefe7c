#pragma once
#include <memory>
#include <string>
#include <vector>

namespace stochham {

// Action-angle chart for the anharmonic oscillator x'' + x^(2m+1) = 0 with
// Hamiltonian h(x, y) = y^2/2 + x^(2m+2)/(2m+2). The reference orbit starts
// at (1, 0); T_star is its minimal period, measured by ODE section return.
// With alpha = 1/(m+2), beta = 1 - alpha and c = 1/(T_star * alpha):
//   x = c^alpha I^alpha C(theta T_star),  y = c^beta I^beta S(theta T_star),
// where (C, S) is the reference orbit stored as a cubic-Hermite interpolant
// (derivatives are exact: C' = S, S' = -C^(2m+1)).
class OscillatorChart {
  public:
    static constexpr int kNodes = 4096; // interpolation cells per period

    // Integrates the reference orbit and builds the interpolant; throws
    // NumericError if the orbit fails to return to the section {y=0, x>0}
    // within a safety horizon or if the energy drift exceeds tol.
    static std::shared_ptr<const OscillatorChart> build(int m, double tol);

    // Versioned text cache (round-trip exact via 17-digit floats); load
    // returns nullptr on any mismatch (missing file, version, m, tol).
    static std::shared_ptr<const OscillatorChart> load_cache(const std::string& path, int m,
                                                             double tol);
    void save_cache(const std::string& path) const;

    int m() const { return m_; }
    double tol() const { return tol_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double t_star() const { return t_star_; }
    double c() const { return c_; }
    double energy_drift() const { return energy_drift_; }

    // Reference-orbit interpolants, periodic with period T_star.
    double C(double s) const;
    double S(double s) const;

    // Chart maps and derived quantities (I > 0 required).
    void to_cartesian(double I, double theta, double& x, double& y) const;
    double frequency(double I) const;        // beta c^(2 beta) I^(2 beta - 1)/(m+1)
    double energy_of_action(double I) const; // c^(2 beta) I^(2 beta) / (2m+2)
    double amplitude_of_action(double I) const; // (c I)^alpha
    double hamiltonian(double x, double y) const;

    // Independent period measurement: integrate the orbit from (A(I), 0) and
    // return the first section-return time (used by the duality check).
    double measure_period(double I) const;

  private:
    OscillatorChart() = default;
    void derive_constants();

    int m_ = 1;
    double tol_ = 1e-10;
    double t_star_ = 0.0;
    double alpha_ = 0.0, beta_ = 0.0, c_ = 0.0;
    double energy_drift_ = 0.0;
    std::vector<double> node_x_, node_y_; // reference orbit samples at j*T_star/kNodes
};

// Independent quadrature oracle for the reference period:
// T_star(m) = 4 sqrt(m+1) * integral_0^1 dx / sqrt(1 - x^(2m+2))  [regularized]
double t_star_quadrature(int m, double tol = 1e-12);

} // namespace stochham
