#pragma once
#include <memory>
#include <string>
#include <vector>

#include "core/oscillator.hpp"
#include "core/pendulum.hpp"

namespace stochham {

enum class SystemKind { pendulum, oscillator, custom };

// Bounded, continuous d-dimensional frequency family used by the custom
// system kind: omega_p(I) = base_p * (1 + amp * tanh((mean(I) - center)/width)).
// The tanh keeps every component within base_p * (1 +/- amp), so the sup-norm
// bound is max_p |base_p| * (1 + |amp|).
struct CustomFrequencyMap {
    std::vector<double> base; // per-component base frequencies (the long-run mean)
    double amp = 0.0;         // relative modulation amplitude
    double center = 0.0;      // action level where the modulation vanishes
    double width = 1.0;       // modulation length scale (> 0)

    size_t dim() const { return base.size(); }
    double bound() const;
    void validate() const;
    void omega(const double* I, double* out) const;
};

// One of the three integrable base systems: the constant-frequency pendulum,
// the anharmonic oscillator through its action-angle chart, or a user-defined
// bounded frequency map. Frequency evaluation is pure and thread-safe.
class System {
  public:
    static System make_pendulum(double g, double l);
    // Builds the oscillator chart, or loads it from cache_dir when a matching
    // cache file exists there (writing one after a fresh build).
    static System make_oscillator(int m, double tol, const std::string& cache_dir);
    static System make_custom(CustomFrequencyMap map);

    SystemKind kind() const { return kind_; }
    size_t dim() const { return dim_; }

    // True when the frequency map is defined at I (oscillator: I > 0).
    bool domain_ok(const double* I) const;
    // Frequency map; callers must check or repair the domain first.
    void omega(const double* I, double* out) const;

    const Pendulum& pendulum() const;
    const OscillatorChart& chart() const;
    const CustomFrequencyMap& custom() const;

  private:
    System() = default;
    SystemKind kind_ = SystemKind::pendulum;
    size_t dim_ = 1;
    Pendulum pendulum_{};
    double pendulum_omega_ = 0.0;
    std::shared_ptr<const OscillatorChart> chart_;
    CustomFrequencyMap custom_{};
};

} // namespace stochham
