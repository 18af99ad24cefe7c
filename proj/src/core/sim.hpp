#pragma once
#include <cstdint>
#include <vector>

#include "core/noise.hpp"
#include "core/system.hpp"

namespace stochham {

// What to do when the action path leaves the frequency map's domain (only
// the oscillator has a restricted domain, I > 0): abort discards the replica
// (the Monte Carlo driver counts it against a 0.1% budget); reflect evaluates
// the frequency at |I|; clamp_at_epsilon evaluates it at max(I, epsilon).
// Repaired evaluations are counted on the path either way.
enum class DomainPolicy { abort_replica, reflect, clamp_at_epsilon };

constexpr double kDomainEpsilon = 1e-9;

// One angle-noise or action-noise source: standard Brownian motion or a Levy
// process given by its generating triplet.
struct NoiseModel {
    bool is_levy = false;
    LevyTriplet triplet; // used only when is_levy

    void validate(size_t dim) const;
};

struct SimSpec {
    std::vector<double> I0, theta0;
    double sigma = 0.0; // action-noise intensity
    double zeta = 0.0;  // angle-noise intensity (zeta or eta)
    NoiseModel action_noise, angle_noise;
    TimeGrid grid;
    bool interlace = false; // drop angle jumps of size > 1 (the large-jump part)
    DomainPolicy policy = DomainPolicy::abort_replica;

    void validate(const System& sys) const;
};

// Sampled trajectory: action, unwrapped angle, and the accumulated frequency
// integral, all on the simulation grid (row-major, (steps+1) x dim).
struct ActionAnglePath {
    TimeGrid grid;
    size_t dim = 1;
    std::vector<double> I, theta, freq_integral;
    int64_t repaired_evals = 0; // frequency evaluations repaired by the policy

    double action(int64_t k, size_t p) const { return I[static_cast<size_t>(k) * dim + p]; }
    double angle(int64_t k, size_t p) const { return theta[static_cast<size_t>(k) * dim + p]; }
    double freq(int64_t k, size_t p) const {
        return freq_integral[static_cast<size_t>(k) * dim + p];
    }
};

// Samples one replica. The action path is the initial value plus the
// intensity-scaled noise path (exact, no integration error); the frequency
// integral uses the composite trapezoidal rule on the grid; the angle is
// theta0 + freq_integral + intensity-scaled angle noise. Action and angle
// noises draw from independent sub-streams of `master`. Throws DomainError
// under the abort policy when the action leaves the frequency map's domain.
ActionAnglePath simulate(const System& sys, const SimSpec& spec, uint64_t master,
                         uint32_t replica);

struct BirkhoffResult {
    std::vector<double> w_bar; // long-time average frequency, per component
    std::vector<double> se;    // standard error from replica spread
    bool nonconverged = false; // running averages at horizon vs horizon/2 differ > 5 se
    double horizon = 0.0;
    int64_t replicas = 0;
};

// Replica-averaged long-time average of omega along action paths; stands in
// for the spatial average of the frequency map downstream. The nonconvergence
// diagnostic compares the running average at the full and half horizons.
BirkhoffResult birkhoff_average(const System& sys, const SimSpec& spec, double horizon,
                                int64_t replicas, uint64_t master);

} // namespace stochham
